use serde::{Deserialize, Serialize};

use super::{congruence, strain_rotation};
use crate::error::{ensure_finite, Error, Result};

/// Plain-concrete parameters for the smeared-crack model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcreteParams {
    /// Young's modulus, MPa.
    pub e: f64,
    pub nu: f64,
    /// Compressive strength f'c, MPa (positive).
    pub fc: f64,
    /// Tensile strength, MPa.
    pub ft: f64,
    /// Crushing strain (positive magnitude).
    pub ecu: f64,
    /// Strain at which tension softening reaches zero stress.
    pub etu: f64,
    /// Shear retention on cracked planes.
    pub beta_shear: f64,
}

/// Ratio of the terminal softening strain to the cracking strain when not given.
pub const DEFAULT_SOFTENING_RATIO: f64 = 10.0;
pub const DEFAULT_SHEAR_RETENTION: f64 = 0.2;
/// Residual stiffness of crushed points relative to the elastic one.
pub const CRUSHED_STIFFNESS_RATIO: f64 = 1e-6;

impl ConcreteParams {
    /// Parameters with the default softening strain and shear retention.
    pub fn new(e: f64, nu: f64, fc: f64, ft: f64, ecu: f64) -> Result<Self> {
        let p = Self {
            e,
            nu,
            fc,
            ft,
            ecu,
            etu: DEFAULT_SOFTENING_RATIO * ft / e,
            beta_shear: DEFAULT_SHEAR_RETENTION,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite(
            &[self.e, self.nu, self.fc, self.ft, self.ecu, self.etu, self.beta_shear],
            "concrete parameter",
        )?;
        let bad = |m: &str| Err(Error::InvalidInput(format!("concrete: {m}")));
        if self.e <= 0.0 {
            return bad("E must be > 0");
        }
        if !(0.0 < self.ft && self.ft < self.fc) {
            return bad("requires 0 < ft < f'c");
        }
        if self.ecu <= 0.0 {
            return bad("crushing strain must be > 0");
        }
        if self.etu <= self.ft / self.e {
            return bad("terminal tension strain must exceed ft/E");
        }
        if !(0.0..0.5).contains(&self.nu) {
            return bad("Poisson ratio must be in [0, 0.5)");
        }
        if !(0.0..=1.0).contains(&self.beta_shear) {
            return bad("shear retention must be in [0, 1]");
        }
        Ok(())
    }

    pub fn cracking_strain(&self) -> f64 {
        self.ft / self.e
    }

    /// Strain at the compressive peak of the parabola.
    pub fn peak_strain(&self) -> f64 {
        2.0 * self.fc / self.e
    }

    pub fn shear_modulus(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    /// Isotropic plane-stress elasticity matrix.
    pub fn plane_stress(&self) -> [[f64; 3]; 3] {
        let k = self.e / (1.0 - self.nu * self.nu);
        [
            [k, k * self.nu, 0.0],
            [k * self.nu, k, 0.0],
            [0.0, 0.0, self.shear_modulus()],
        ]
    }
}

/// Committed history of one concrete integration point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConcretePointState {
    /// Angle of the first crack normal from global x, radians. The second
    /// crack, if any, is normal to the first.
    pub crack_angle: Option<f64>,
    pub cracked: [bool; 2],
    /// Largest tensile strain reached normal to each crack.
    pub crack_strain: [f64; 2],
    pub crushed: bool,
    /// Most compressive equivalent uniaxial strain reached (<= 0).
    pub peak_compressive_strain: f64,
}

impl ConcretePointState {
    pub fn is_cracked(&self) -> bool {
        self.cracked[0]
    }

    /// Adopts the cracks that `trial` opened, at the cracking strain and
    /// without the trial's opening.
    pub fn latch_cracks(&mut self, trial: &ConcretePointState, p: &ConcreteParams) {
        if self.crushed {
            return;
        }
        if self.crack_angle.is_none() && trial.crack_angle.is_some() {
            self.crack_angle = trial.crack_angle;
            self.cracked[0] = true;
            self.crack_strain[0] = p.cracking_strain();
        }
        if self.crack_angle.is_some() && !self.cracked[1] && trial.cracked[1] {
            self.cracked[1] = true;
            self.crack_strain[1] = p.cracking_strain();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcreteResponse {
    /// `[sxx, syy, sxy]`, MPa.
    pub stress: [f64; 3],
    /// d stress / d `[exx, eyy, gxy]`.
    pub tangent: [[f64; 3]; 3],
    pub state: ConcretePointState,
}

/// Hognestad parabola for a compressive strain (`strain <= 0`).
///
/// Returns stress (<= 0) and its derivative. Past twice the peak strain the
/// parabola would turn tensile, so it is floored at zero.
pub fn hognestad(strain: f64, p: &ConcreteParams) -> (f64, f64) {
    let r = -strain / p.peak_strain();
    if r >= 2.0 {
        return (0.0, 0.0);
    }
    (-p.fc * (2.0 * r - r * r), p.e * (1.0 - r))
}

/// Normal stress across a crack whose largest opening strain so far is
/// `max_strain`: linear softening envelope, secant unloading to the origin
/// and the compression parabola once the crack closes.
pub fn tension_law(strain: f64, max_strain: f64, p: &ConcreteParams) -> (f64, f64) {
    if strain <= 0.0 {
        return hognestad(strain, p);
    }
    let ecr = p.cracking_strain();
    let envelope = |e: f64| {
        let s = p.ft * (1.0 - (e - ecr) / (p.etu - ecr));
        if s > 0.0 {
            (s, -p.ft / (p.etu - ecr))
        } else {
            (0.0, 0.0)
        }
    };
    if strain >= max_strain {
        envelope(strain)
    } else {
        let secant = envelope(max_strain).0 / max_strain;
        (secant * strain, secant)
    }
}

fn uncracked_uniaxial(strain: f64, p: &ConcreteParams) -> (f64, f64) {
    if strain >= 0.0 {
        (p.e * strain, p.e)
    } else {
        hognestad(strain, p)
    }
}

fn crushed_response(mut state: ConcretePointState, p: &ConcreteParams) -> ConcreteResponse {
    state.crushed = true;
    let mut tangent = p.plane_stress();
    tangent
        .iter_mut()
        .flatten()
        .for_each(|v| *v *= CRUSHED_STIFFNESS_RATIO);
    ConcreteResponse { stress: [0.0; 3], tangent, state }
}

fn to_global(local: [f64; 3], t: &[[f64; 3]; 3]) -> [f64; 3] {
    let mut s = [0.0; 3];
    for (i, si) in s.iter_mut().enumerate() {
        *si = (0..3).map(|k| t[k][i] * local[k]).sum();
    }
    s
}

fn rotate(strain: &[f64; 3], t: &[[f64; 3]; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..3).map(|k| t[i][k] * strain[k]).sum();
    }
    out
}

/// Plane-stress update at one concrete point.
///
/// `strain` is `[exx, eyy, gxy]` at the point, membrane plus curvature
/// contribution at the layer height. The returned state is a trial state; the
/// solver commits it only after the load step converges.
pub fn concrete_update(
    strain: [f64; 3],
    state: &ConcretePointState,
    p: &ConcreteParams,
) -> Result<ConcreteResponse> {
    ensure_finite(&strain, "concrete strain")?;
    if state.crushed {
        return Ok(crushed_response(*state, p));
    }
    match state.crack_angle {
        Some(angle) => Ok(cracked(strain, angle, *state, p)),
        None => Ok(uncracked(strain, *state, p)),
    }
}

fn uncracked(strain: [f64; 3], mut state: ConcretePointState, p: &ConcreteParams) -> ConcreteResponse {
    let [exx, eyy, gxy] = strain;
    let phi = 0.5 * gxy.atan2(exx - eyy);
    let mean = 0.5 * (exx + eyy);
    let radius = (0.25 * (exx - eyy).powi(2) + 0.25 * gxy * gxy).sqrt();
    let (e1, e2) = (mean + radius, mean - radius);

    let k = 1.0 / (1.0 - p.nu * p.nu);
    let eq1 = k * (e1 + p.nu * e2);
    let eq2 = k * (e2 + p.nu * e1);

    if eq2 < -p.ecu {
        state.peak_compressive_strain = state.peak_compressive_strain.min(eq2);
        return crushed_response(state, p);
    }
    if eq1 > p.cracking_strain() {
        state.crack_angle = Some(phi);
        state.cracked[0] = true;
        state.crack_strain[0] = p.cracking_strain();
        return cracked(strain, phi, state, p);
    }
    state.peak_compressive_strain = state.peak_compressive_strain.min(eq2);

    let (s1, d1) = uncracked_uniaxial(eq1, p);
    let (s2, d2) = uncracked_uniaxial(eq2, p);
    let rotating_shear = if (e1 - e2).abs() > 1e-12 * (e1.abs() + e2.abs()).max(1e-300) {
        (s1 - s2) / (2.0 * (e1 - e2))
    } else {
        0.5 * d1 / (1.0 + p.nu)
    };
    let local = [
        [d1 * k, d1 * k * p.nu, 0.0],
        [d2 * k * p.nu, d2 * k, 0.0],
        [0.0, 0.0, rotating_shear],
    ];
    let t = strain_rotation(phi);
    ConcreteResponse {
        stress: to_global([s1, s2, 0.0], &t),
        tangent: congruence(&t, &local),
        state,
    }
}

fn cracked(
    strain: [f64; 3],
    angle: f64,
    mut state: ConcretePointState,
    p: &ConcreteParams,
) -> ConcreteResponse {
    let t = strain_rotation(angle);
    let [en, et, g] = rotate(&strain, &t);

    let (sn, dn) = tension_law(en, state.crack_strain[0], p);
    if en > state.crack_strain[0] {
        state.crack_strain[0] = en;
    }

    if !state.cracked[1] && et > p.cracking_strain() {
        state.cracked[1] = true;
        state.crack_strain[1] = p.cracking_strain();
    }
    let (st, dt) = if state.cracked[1] {
        let r = tension_law(et, state.crack_strain[1], p);
        if et > state.crack_strain[1] {
            state.crack_strain[1] = et;
        }
        r
    } else {
        uncracked_uniaxial(et, p)
    };

    let most_compressive = en.min(et);
    state.peak_compressive_strain = state.peak_compressive_strain.min(most_compressive);
    if most_compressive < -p.ecu {
        return crushed_response(state, p);
    }

    let gs = p.beta_shear * p.shear_modulus();
    let local = [[dn, 0.0, 0.0], [0.0, dt, 0.0], [0.0, 0.0, gs]];
    ConcreteResponse {
        stress: to_global([sn, st, gs * g], &t),
        tangent: congruence(&t, &local),
        state,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(nu: f64) -> ConcreteParams {
        ConcreteParams {
            e: 30_000.0,
            nu,
            fc: 30.0,
            ft: 3.0,
            ecu: 0.003,
            etu: 1e-3,
            beta_shear: 0.2,
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn elastic_tension_branch() {
        let p = params(0.0);
        let eps = 0.5 * p.ft / p.e;
        let r = concrete_update([eps, 0.0, 0.0], &ConcretePointState::default(), &p).unwrap();
        assert!(rel(r.stress[0], p.e * eps) <= 1e-9);
        assert!(!r.state.is_cracked());
    }

    #[test]
    fn softening_hand_value() {
        // 3 * (1 - (2e-4 - 1e-4) / (1e-3 - 1e-4))
        let expected = 3.0 * (1.0 - 1e-4 / 9e-4);
        for nu in [0.0, 0.2] {
            let p = params(nu);
            let r = concrete_update([2e-4, 0.0, 0.0], &ConcretePointState::default(), &p).unwrap();
            assert!(rel(r.stress[0], expected) <= 1e-9, "{} vs {expected}", r.stress[0]);
            assert!(r.state.is_cracked());
        }
    }

    #[test]
    fn parabola_apex() {
        let p = params(0.0);
        let r = concrete_update(
            [-p.peak_strain(), 0.0, 0.0],
            &ConcretePointState::default(),
            &p,
        )
        .unwrap();
        assert!(rel(r.stress[0], -p.fc) <= 1e-9);
        assert!(r.tangent[0][0].abs() < 1e-9 * p.e);
    }

    #[test]
    fn crushing_zeroes_stress_for_good() {
        let p = params(0.2);
        let r = concrete_update([-0.004, 0.0, 0.0], &ConcretePointState::default(), &p).unwrap();
        assert!(r.state.crushed);
        assert_eq!(r.stress, [0.0; 3]);
        assert!((r.tangent[0][0] - 1e-6 * p.plane_stress()[0][0]).abs() < 1e-12);
        let back = concrete_update([0.0, 0.0, 0.0], &r.state, &p).unwrap();
        assert_eq!(back.stress, [0.0; 3]);
    }

    #[test]
    fn crack_unloading_is_secant() {
        let p = params(0.0);
        let open = concrete_update([4e-4, 0.0, 0.0], &ConcretePointState::default(), &p).unwrap();
        let half = concrete_update([2e-4, 0.0, 0.0], &open.state, &p).unwrap();
        assert!(rel(half.stress[0], 0.5 * open.stress[0]) < 1e-12);
        // closing the crack brings back compression
        let closed = concrete_update([-1e-4, 0.0, 0.0], &open.state, &p).unwrap();
        assert!(closed.stress[0] < 0.0);
        assert!(closed.state.is_cracked());
    }

    #[test]
    fn second_crack_is_orthogonal() {
        let p = params(0.2);
        let first = concrete_update([3e-4, 0.0, 0.0], &ConcretePointState::default(), &p).unwrap();
        let second = concrete_update([3e-4, 3e-4, 0.0], &first.state, &p).unwrap();
        assert!(second.state.cracked[1]);
        assert_eq!(second.state.crack_angle, first.state.crack_angle);
    }

    #[test]
    fn rejects_non_finite() {
        let p = params(0.2);
        assert!(concrete_update([f64::INFINITY, 0.0, 0.0], &ConcretePointState::default(), &p).is_err());
    }

    #[test]
    fn parameter_validation() {
        let mut p = params(0.2);
        p.ft = 40.0;
        assert!(p.validate().is_err());
        let mut p = params(0.2);
        p.etu = 1e-5;
        assert!(p.validate().is_err());
        assert!(ConcreteParams::new(30_000.0, 0.2, 30.0, 3.0, 0.003).is_ok());
    }
}
