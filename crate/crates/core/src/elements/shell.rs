//! Four-node flat layered shell.
//!
//! Membrane: bilinear (Q4). Bending: Mindlin plate with MITC4 assumed
//! transverse shear strains (no shear locking, no spurious modes). A small
//! drilling penalty ties each nodal `rz` to the element's in-plane rotation.
//! Concrete is integrated with Gauss-Legendre points through the thickness;
//! reinforcement enters as smeared uniaxial layers.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{add_atbc, gauss_legendre};
use crate::error::{Error, Result};
use crate::materials::{concrete_update, steel_response, ConcretePointState, SteelPointState};
use crate::model::{RebarDirection, ShellElement, StructuralModel, MAX_LAYERS};

pub const SHELL_DOFS: usize = 24;
const SHEAR_CORRECTION: f64 = 5.0 / 6.0;
const DRILLING_RATIO: f64 = 1e-3;

fn gauss_2x2() -> [[f64; 2]; 4] {
    let g = 1.0 / 3f64.sqrt();
    [[-g, -g], [g, -g], [g, g], [-g, g]]
}

fn layer_rule(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static RULES: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    &RULES.get_or_init(|| (0..=MAX_LAYERS).map(gauss_legendre).collect())[n]
}

struct Shape {
    n: [f64; 4],
    dxi: [f64; 4],
    deta: [f64; 4],
}

fn shape(xi: f64, eta: f64) -> Shape {
    const NAT: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
    let mut s = Shape { n: [0.0; 4], dxi: [0.0; 4], deta: [0.0; 4] };
    for (i, [a, b]) in NAT.iter().enumerate() {
        s.n[i] = 0.25 * (1.0 + a * xi) * (1.0 + b * eta);
        s.dxi[i] = 0.25 * a * (1.0 + b * eta);
        s.deta[i] = 0.25 * b * (1.0 + a * xi);
    }
    s
}

/// `[[x_xi, y_xi], [x_eta, y_eta]]`.
fn jacobian(xy: &[[f64; 2]; 4], s: &Shape) -> [[f64; 2]; 2] {
    let mut j = [[0.0; 2]; 2];
    for i in 0..4 {
        j[0][0] += s.dxi[i] * xy[i][0];
        j[0][1] += s.dxi[i] * xy[i][1];
        j[1][0] += s.deta[i] * xy[i][0];
        j[1][1] += s.deta[i] * xy[i][1];
    }
    j
}

fn det2(j: &[[f64; 2]; 2]) -> f64 {
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

fn inv2(j: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let d = det2(j);
    [[j[1][1] / d, -j[0][1] / d], [-j[1][0] / d, j[0][0] / d]]
}

fn plan_coords(model: &StructuralModel, e: usize) -> [[f64; 2]; 4] {
    model.shells[e].nodes.map(|n| {
        let p = model.nodes[n].position;
        [p[0], p[1]]
    })
}

/// Cartesian shape-function derivatives and Jacobian determinant.
fn cartesian(xy: &[[f64; 2]; 4], s: &Shape) -> ([f64; 4], [f64; 4], f64, [[f64; 2]; 2]) {
    let j = jacobian(xy, s);
    let ji = inv2(&j);
    let mut dx = [0.0; 4];
    let mut dy = [0.0; 4];
    for i in 0..4 {
        dx[i] = ji[0][0] * s.dxi[i] + ji[0][1] * s.deta[i];
        dy[i] = ji[1][0] * s.dxi[i] + ji[1][1] * s.deta[i];
    }
    (dx, dy, det2(&j), ji)
}

/// Rejects shells with a non-positive Jacobian at any in-plane Gauss point.
pub fn check_jacobian(model: &StructuralModel, e: usize) -> Result<()> {
    let xy = plan_coords(model, e);
    let scale = model.shell_area(e).abs().max(f64::MIN_POSITIVE);
    for (k, g) in gauss_2x2().iter().enumerate() {
        let det = det2(&jacobian(&xy, &shape(g[0], g[1])));
        if !(det > 1e-9 * scale) {
            return Err(Error::SingularElement {
                element: format!("shell {e}"),
                reason: format!("Jacobian determinant {det:.3e} at Gauss point {k}"),
            });
        }
    }
    Ok(())
}

/// Committed material history of one shell: concrete points ordered
/// Gauss point major, bottom layer first; rebar points Gauss point major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellState {
    pub concrete: Vec<ConcretePointState>,
    pub rebar: Vec<SteelPointState>,
}

impl ShellState {
    pub fn new(shell: &ShellElement) -> Self {
        Self {
            concrete: vec![ConcretePointState::default(); 4 * shell.layers],
            rebar: vec![SteelPointState::default(); 4 * shell.rebars.len()],
        }
    }

    pub fn cracked_points(&self) -> usize {
        self.concrete.iter().filter(|p| p.is_cracked()).count()
    }

    pub fn crushed_points(&self) -> usize {
        self.concrete.iter().filter(|p| p.crushed).count()
    }

    pub fn yielded_rebar_points(&self) -> usize {
        self.rebar.iter().filter(|p| p.has_yielded()).count()
    }
}

#[derive(Debug, Clone)]
pub struct ShellResponse {
    /// 24x24 row-major tangent.
    pub stiffness: Vec<f64>,
    pub force: Vec<f64>,
    pub state: ShellState,
}

/// Membrane/bending strain operator (6x24): `[exx, eyy, gxy, kxx, kyy, kxy]`.
fn membrane_bending(dx: &[f64; 4], dy: &[f64; 4]) -> [f64; 6 * SHELL_DOFS] {
    let mut b = [0.0; 6 * SHELL_DOFS];
    for i in 0..4 {
        let c = 6 * i;
        b[c] = dx[i];
        b[SHELL_DOFS + c + 1] = dy[i];
        b[2 * SHELL_DOFS + c] = dy[i];
        b[2 * SHELL_DOFS + c + 1] = dx[i];
        // beta_x = ry, beta_y = -rx
        b[3 * SHELL_DOFS + c + 4] = dx[i];
        b[4 * SHELL_DOFS + c + 3] = -dy[i];
        b[5 * SHELL_DOFS + c + 4] = dy[i];
        b[5 * SHELL_DOFS + c + 3] = -dx[i];
    }
    b
}

/// Covariant transverse shear rows `(g_xi, g_eta)` at a natural point.
fn covariant_shear(xy: &[[f64; 2]; 4], xi: f64, eta: f64) -> ([f64; SHELL_DOFS], [f64; SHELL_DOFS]) {
    let s = shape(xi, eta);
    let j = jacobian(xy, &s);
    let mut gxi = [0.0; SHELL_DOFS];
    let mut geta = [0.0; SHELL_DOFS];
    for i in 0..4 {
        let c = 6 * i;
        gxi[c + 2] = s.dxi[i];
        gxi[c + 4] = s.n[i] * j[0][0];
        gxi[c + 3] = -s.n[i] * j[0][1];
        geta[c + 2] = s.deta[i];
        geta[c + 4] = s.n[i] * j[1][0];
        geta[c + 3] = -s.n[i] * j[1][1];
    }
    (gxi, geta)
}

/// MITC4 transverse shear operator (2x24) at a Gauss point.
fn mitc_shear(xy: &[[f64; 2]; 4], xi: f64, eta: f64, jinv: &[[f64; 2]; 2]) -> [f64; 2 * SHELL_DOFS] {
    let (a, _) = covariant_shear(xy, 0.0, 1.0);
    let (c, _) = covariant_shear(xy, 0.0, -1.0);
    let (_, b) = covariant_shear(xy, -1.0, 0.0);
    let (_, d) = covariant_shear(xy, 1.0, 0.0);
    let mut out = [0.0; 2 * SHELL_DOFS];
    for k in 0..SHELL_DOFS {
        let g_xi = 0.5 * (1.0 + eta) * a[k] + 0.5 * (1.0 - eta) * c[k];
        let g_eta = 0.5 * (1.0 + xi) * d[k] + 0.5 * (1.0 - xi) * b[k];
        out[k] = jinv[0][0] * g_xi + jinv[0][1] * g_eta;
        out[SHELL_DOFS + k] = jinv[1][0] * g_xi + jinv[1][1] * g_eta;
    }
    out
}

fn matvec(b: &[f64], u: &[f64], rows: usize) -> Vec<f64> {
    (0..rows).map(|r| b[r * SHELL_DOFS..(r + 1) * SHELL_DOFS].iter().zip(u).map(|(a, b)| a * b).sum()).collect()
}

struct Integrated {
    response: ShellResponse,
    stresses: Vec<[f64; 3]>,
}

fn integrate(model: &StructuralModel, e: usize, u: &[f64], committed: &ShellState) -> Result<Integrated> {
    let shell = &model.shells[e];
    let conc = &model.concretes[shell.concrete];
    let xy = plan_coords(model, e);
    let (zeta, wz) = layer_rule(shell.layers.min(MAX_LAYERS));
    let nl = zeta.len();
    let half = 0.5 * shell.thickness;
    let zmid = shell.top - half;
    let g_shear = SHEAR_CORRECTION * conc.shear_modulus() * shell.thickness;

    // Transverse shear and drilling are linear.
    let mut k = vec![0.0; SHELL_DOFS * SHELL_DOFS];
    let ds = [g_shear, 0.0, 0.0, g_shear];
    for g in gauss_2x2() {
        let s = shape(g[0], g[1]);
        let (_, _, det, jinv) = cartesian(&xy, &s);
        let bs = mitc_shear(&xy, g[0], g[1], &jinv);
        add_atbc(&mut k, &bs, &ds, &bs, 2, SHELL_DOFS, det);
    }
    // Drilling penalty on rz_i - omega(center).
    let (dx0, dy0, _, _) = cartesian(&xy, &shape(0.0, 0.0));
    let kd = DRILLING_RATIO * conc.shear_modulus() * shell.thickness * model.shell_area(e).abs();
    let mut omega = [0.0; SHELL_DOFS];
    for i in 0..4 {
        omega[6 * i + 1] += 0.5 * dx0[i];
        omega[6 * i] -= 0.5 * dy0[i];
    }
    for i in 0..4 {
        let mut r = omega.map(|v| -v);
        r[6 * i + 5] += 1.0;
        for a in 0..SHELL_DOFS {
            if r[a] == 0.0 {
                continue;
            }
            for b in 0..SHELL_DOFS {
                k[a * SHELL_DOFS + b] += kd * r[a] * r[b];
            }
        }
    }
    let mut f: Vec<f64> =
        (0..SHELL_DOFS).map(|a| (0..SHELL_DOFS).map(|b| k[a * SHELL_DOFS + b] * u[b]).sum()).collect();

    let mut state = ShellState { concrete: Vec::with_capacity(4 * nl), rebar: Vec::with_capacity(committed.rebar.len()) };
    let mut stresses = Vec::with_capacity(4 * nl);
    for (gp, g) in gauss_2x2().iter().enumerate() {
        let s = shape(g[0], g[1]);
        let (dx, dy, det, _) = cartesian(&xy, &s);
        if !(det > 0.0) {
            return Err(Error::SingularElement {
                element: format!("shell {e}"),
                reason: format!("Jacobian determinant {det:.3e} at Gauss point {gp}"),
            });
        }
        let bmb = membrane_bending(&dx, &dy);
        let gen = matvec(&bmb, u, 6);
        let mut resultant = [0.0; 6];
        let mut c = [0.0; 36];
        for l in 0..nl {
            let z = zmid + half * zeta[l];
            let w = half * wz[l];
            let strain = [gen[0] + z * gen[3], gen[1] + z * gen[4], gen[2] + z * gen[5]];
            let r = concrete_update(strain, &committed.concrete[gp * nl + l], conc)?;
            for i in 0..3 {
                resultant[i] += w * r.stress[i];
                resultant[3 + i] += w * z * r.stress[i];
                for j in 0..3 {
                    let d = r.tangent[i][j];
                    c[i * 6 + j] += w * d;
                    c[i * 6 + 3 + j] += w * z * d;
                    c[(3 + i) * 6 + j] += w * z * d;
                    c[(3 + i) * 6 + 3 + j] += w * z * z * d;
                }
            }
            state.concrete.push(r.state);
            stresses.push(r.stress);
        }
        for (ri, bar) in shell.rebars.iter().enumerate() {
            let dir = match bar.direction {
                RebarDirection::Longitudinal => 0,
                RebarDirection::Transverse => 1,
            };
            let z = shell.top - bar.depth;
            let strain = gen[dir] + z * gen[3 + dir];
            let r = steel_response(strain, &committed.rebar[gp * shell.rebars.len() + ri], &model.steels[bar.steel]);
            let a = bar.area;
            resultant[dir] += a * r.stress;
            resultant[3 + dir] += a * z * r.stress;
            c[dir * 6 + dir] += a * r.tangent;
            c[dir * 6 + 3 + dir] += a * z * r.tangent;
            c[(3 + dir) * 6 + dir] += a * z * r.tangent;
            c[(3 + dir) * 6 + 3 + dir] += a * z * z * r.tangent;
            state.rebar.push(r.state);
        }
        add_atbc(&mut k, &bmb, &c, &bmb, 6, SHELL_DOFS, det);
        for r in 0..6 {
            for j in 0..SHELL_DOFS {
                f[j] += bmb[r * SHELL_DOFS + j] * resultant[r] * det;
            }
        }
    }

    Ok(Integrated { response: ShellResponse { stiffness: k, force: f, state }, stresses })
}

/// Tangent, internal force and trial state of shell `e` for element
/// displacements `u` (24 values, node-major `[ux, uy, uz, rx, ry, rz]`).
pub fn shell_response(model: &StructuralModel, e: usize, u: &[f64], committed: &ShellState) -> Result<ShellResponse> {
    Ok(integrate(model, e, u, committed)?.response)
}

/// Concrete stresses `[sxx, syy, sxy]` at every point (same order as
/// [`ShellState::concrete`]) and the points' heights above the node plane.
pub fn shell_stresses(
    model: &StructuralModel,
    e: usize,
    u: &[f64],
    committed: &ShellState,
) -> Result<(Vec<[f64; 3]>, Vec<f64>)> {
    let shell = &model.shells[e];
    let (zeta, _) = layer_rule(shell.layers.min(MAX_LAYERS));
    let half = 0.5 * shell.thickness;
    let z: Vec<f64> = zeta.iter().map(|t| shell.top - half + half * t).collect();
    Ok((integrate(model, e, u, committed)?.stresses, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{ConcreteParams, SteelParams};
    use crate::model::{ModelKind, Monitors, Node, Rect, RebarLayer, ShellRole};

    fn single(xy: [[f64; 2]; 4], rebars: Vec<RebarLayer>) -> StructuralModel {
        StructuralModel {
            kind: ModelKind::Slab,
            nodes: xy.iter().enumerate().map(|(i, p)| Node { id: i, position: [p[0], p[1], 0.0] }).collect(),
            shells: vec![ShellElement {
                nodes: [0, 1, 2, 3],
                thickness: 200.0,
                top: 100.0,
                concrete: 0,
                rebars,
                layers: 6,
                role: ShellRole::Deck,
            }],
            beams: vec![],
            sections: vec![],
            concretes: vec![ConcreteParams::new(30000.0, 0.2, 30.0, 3.0, 0.0035).unwrap()],
            steels: vec![SteelParams::new(200000.0, 420.0, 2000.0).unwrap()],
            links: vec![],
            supports: vec![],
            contacts: vec![],
            bonds: vec![],
            loads: vec![],
            damage: vec![],
            plan: Rect::new(0.0, 0.0, 1.0, 1.0),
            retained: Rect::new(0.0, 0.0, 1.0, 1.0),
            symmetry: vec![],
            girder_lines: vec![],
            deck_thickness: 200.0,
            monitors: Monitors::default(),
        }
    }

    fn square() -> [[f64; 2]; 4] {
        [[0.0, 0.0], [500.0, 0.0], [500.0, 400.0], [0.0, 400.0]]
    }

    fn respond(m: &StructuralModel, u: &[f64]) -> ShellResponse {
        shell_response(m, 0, u, &ShellState::new(&m.shells[0])).unwrap()
    }

    fn rigid_modes() -> Vec<[f64; SHELL_DOFS]> {
        let xy = square();
        let mut modes = Vec::new();
        for d in 0..3 {
            let mut u = [0.0; SHELL_DOFS];
            for i in 0..4 {
                u[6 * i + d] = 1.0;
            }
            modes.push(u);
        }
        // rotation about z: u = -y t, v = x t, rz = t
        let mut u = [0.0; SHELL_DOFS];
        for i in 0..4 {
            u[6 * i] = -xy[i][1] * 1e-3;
            u[6 * i + 1] = xy[i][0] * 1e-3;
            u[6 * i + 5] = 1e-3;
        }
        modes.push(u);
        // rotation about x: w = y t, rx = t
        let mut u = [0.0; SHELL_DOFS];
        for i in 0..4 {
            u[6 * i + 2] = xy[i][1] * 1e-3;
            u[6 * i + 3] = 1e-3;
        }
        modes.push(u);
        // rotation about y: w = -x t, ry = t
        let mut u = [0.0; SHELL_DOFS];
        for i in 0..4 {
            u[6 * i + 2] = -xy[i][0] * 1e-3;
            u[6 * i + 4] = 1e-3;
        }
        modes.push(u);
        modes
    }

    #[test]
    fn rigid_body_modes_are_force_free() {
        let m = single(square(), vec![]);
        let k = respond(&m, &[0.0; SHELL_DOFS]).stiffness;
        let scale = k.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for mode in rigid_modes() {
            let r = respond(&m, &mode);
            let fmax = r.force.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            assert!(fmax < 1e-9 * scale, "force {fmax}");
            for a in 0..SHELL_DOFS {
                let ku: f64 = (0..SHELL_DOFS).map(|b| k[a * SHELL_DOFS + b] * mode[b]).sum();
                assert!(ku.abs() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn elastic_stiffness_is_symmetric_and_consistent() {
        let m = single(
            [[0.0, 0.0], [520.0, 30.0], [480.0, 410.0], [-20.0, 380.0]],
            vec![RebarLayer { depth: 40.0, area: 1.0, direction: RebarDirection::Transverse, steel: 0 }],
        );
        let k = respond(&m, &[0.0; SHELL_DOFS]).stiffness;
        let scale = k.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for a in 0..SHELL_DOFS {
            for b in 0..SHELL_DOFS {
                assert!((k[a * SHELL_DOFS + b] - k[b * SHELL_DOFS + a]).abs() <= 1e-12 * scale);
            }
        }
        // small elastic displacement: f = K u
        let u: Vec<f64> = (0..SHELL_DOFS).map(|i| 1e-10 * ((i * 7 % 5) as f64 - 2.0)).collect();
        let r = respond(&m, &u);
        for a in 0..SHELL_DOFS {
            let ku: f64 = (0..SHELL_DOFS).map(|b| k[a * SHELL_DOFS + b] * u[b]).sum();
            assert!((ku - r.force[a]).abs() <= 1e-7 * scale * 1e-10);
        }
    }

    #[test]
    fn constant_curvature_gives_plate_moment() {
        // ry = x * kappa gives kxx = kappa
        let m = single(square(), vec![]);
        // small enough that the compression parabola is still linear
        let kappa = 1e-12;
        let mut u = [0.0; SHELL_DOFS];
        for (i, p) in square().iter().enumerate() {
            u[6 * i + 4] = p[0] * kappa;
            // consistent deflection so transverse shear vanishes: w' = -beta_x
            u[6 * i + 2] = -0.5 * kappa * p[0] * p[0];
        }
        let r = respond(&m, &u);
        let c = m.concretes[0];
        let d = c.e * 200f64.powi(3) / (12.0 * (1.0 - c.nu * c.nu));
        // nodal moment about y at x = 500 edge nodes: M * width / 2 each
        let mx = d * kappa;
        assert!((r.force[6 + 4] - mx * 400.0 / 2.0).abs() < 1e-6 * mx * 400.0);
    }

    #[test]
    fn degenerate_element_is_rejected() {
        let m = single([[0.0, 0.0], [500.0, 0.0], [0.0, 0.0], [0.0, 400.0]], vec![]);
        match check_jacobian(&m, 0) {
            Err(Error::SingularElement { element, .. }) => assert_eq!(element, "shell 0"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn virgin_state_has_zero_internal_force() {
        let m = single(square(), vec![]);
        let r = respond(&m, &[0.0; SHELL_DOFS]);
        assert!(r.force.iter().all(|v| *v == 0.0));
        assert_eq!(r.state, ShellState::new(&m.shells[0]));
    }
}
