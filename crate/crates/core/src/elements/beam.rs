//! Two-node displacement-based fiber beam.
//!
//! Linear axial displacement, cubic Hermite bending in both planes and
//! elastic Saint-Venant torsion. Fibers are integrated at three Gauss
//! sections. The node line may be offset rigidly from the section centroid.

use serde::{Deserialize, Serialize};

use super::{add_atbc, gauss_legendre};
use crate::error::{Error, Result};
use crate::materials::{steel_response, SteelPointState};
use crate::model::{BeamElement, StructuralModel};

pub const BEAM_DOFS: usize = 12;
pub const BEAM_SECTIONS: usize = 3;
const STEEL_POISSON: f64 = 0.3;

/// Committed fiber states, Gauss section major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamState {
    pub fibers: Vec<SteelPointState>,
}

impl BeamState {
    pub fn new(model: &StructuralModel, beam: &BeamElement) -> Self {
        Self { fibers: vec![SteelPointState::default(); BEAM_SECTIONS * model.sections[beam.section].fibers.len()] }
    }

    pub fn yielded_fibers(&self) -> usize {
        self.fibers.iter().filter(|f| f.has_yielded()).count()
    }

    /// True when every fiber of some Gauss section has yielded.
    pub fn has_full_section_yield(&self) -> bool {
        let nf = self.fibers.len() / BEAM_SECTIONS;
        nf > 0 && self.fibers.chunks(nf).any(|s| s.iter().all(|f| f.has_yielded()))
    }
}

#[derive(Debug, Clone)]
pub struct BeamResponse {
    /// 12x12 row-major tangent in global dofs.
    pub stiffness: Vec<f64>,
    pub force: Vec<f64>,
    pub state: BeamState,
}

/// Local axes (rows) and length. Local z follows global Z; the element
/// must not be vertical.
fn frame(model: &StructuralModel, b: usize) -> Result<([[f64; 3]; 3], f64)> {
    let beam = &model.beams[b];
    let [p, q] = beam.nodes.map(|n| model.nodes[n].position);
    let d = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
    let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let ex = d.map(|v| v / len);
    // ey = Z x ex
    let ey_raw = [-ex[1], ex[0], 0.0];
    let ny = (ey_raw[0] * ey_raw[0] + ey_raw[1] * ey_raw[1]).sqrt();
    if !(len > 0.0) || ny < 1e-9 {
        return Err(Error::SingularElement {
            element: format!("beam {b}"),
            reason: "zero length or vertical axis".into(),
        });
    }
    let ey = ey_raw.map(|v| v / ny);
    let ez = [
        ex[1] * ey[2] - ex[2] * ey[1],
        ex[2] * ey[0] - ex[0] * ey[2],
        ex[0] * ey[1] - ex[1] * ey[0],
    ];
    Ok(([ex, ey, ez], len))
}

/// Map from global node dofs to local centroid-line dofs (12x12).
pub fn beam_transform(model: &StructuralModel, b: usize) -> Result<([f64; BEAM_DOFS * BEAM_DOFS], f64)> {
    let (r, len) = frame(model, b)?;
    let e = model.beams[b].offset;
    // u_c = u + theta x e = u - [e]x theta
    let ex = [[0.0, -e[2], e[1]], [e[2], 0.0, -e[0]], [-e[1], e[0], 0.0]];
    let mut t = [0.0; BEAM_DOFS * BEAM_DOFS];
    for n in 0..2 {
        let o = 6 * n;
        for i in 0..3 {
            for j in 0..3 {
                t[(o + i) * BEAM_DOFS + o + j] = r[i][j];
                t[(o + 3 + i) * BEAM_DOFS + o + 3 + j] = r[i][j];
                let re: f64 = (0..3).map(|k| r[i][k] * ex[k][j]).sum();
                t[(o + i) * BEAM_DOFS + o + 3 + j] = -re;
            }
        }
    }
    Ok((t, len))
}

/// Generalized strain operator `[eps0, v'', w'']` (3x12) at `s` in [0, 1].
fn strain_operator(s: f64, len: f64) -> [f64; 3 * BEAM_DOFS] {
    let n1 = (-6.0 + 12.0 * s) / (len * len);
    let n2 = (-4.0 + 6.0 * s) / len;
    let n3 = (6.0 - 12.0 * s) / (len * len);
    let n4 = (-2.0 + 6.0 * s) / len;
    let mut b = [0.0; 3 * BEAM_DOFS];
    b[0] = -1.0 / len;
    b[6] = 1.0 / len;
    // v' = rz
    b[BEAM_DOFS + 1] = n1;
    b[BEAM_DOFS + 5] = n2;
    b[BEAM_DOFS + 7] = n3;
    b[BEAM_DOFS + 11] = n4;
    // w' = -ry
    b[2 * BEAM_DOFS + 2] = n1;
    b[2 * BEAM_DOFS + 4] = -n2;
    b[2 * BEAM_DOFS + 8] = n3;
    b[2 * BEAM_DOFS + 10] = -n4;
    b
}

fn mul(t: &[f64], u: &[f64]) -> Vec<f64> {
    (0..BEAM_DOFS).map(|i| (0..BEAM_DOFS).map(|j| t[i * BEAM_DOFS + j] * u[j]).sum()).collect()
}

struct Integrated {
    response: BeamResponse,
    /// `[N, M_z, M_y]` per Gauss section with `M_y = -sum(sigma A z)`.
    resultants: Vec<[f64; 3]>,
}

fn integrate(model: &StructuralModel, b: usize, u: &[f64], committed: &BeamState) -> Result<Integrated> {
    let beam = &model.beams[b];
    let section = &model.sections[beam.section];
    let (t, len) = beam_transform(model, b)?;
    let ul = mul(&t, u);
    let (xi, wi) = gauss_legendre(BEAM_SECTIONS);
    let nf = section.fibers.len();

    let mut kl = vec![0.0; BEAM_DOFS * BEAM_DOFS];
    let mut fl = [0.0; BEAM_DOFS];
    let mut fibers = Vec::with_capacity(committed.fibers.len());
    let mut resultants = Vec::with_capacity(BEAM_SECTIONS);
    for g in 0..BEAM_SECTIONS {
        let s = 0.5 * (1.0 + xi[g]);
        let w = 0.5 * len * wi[g];
        let bop = strain_operator(s, len);
        let gen: Vec<f64> =
            (0..3).map(|r| (0..BEAM_DOFS).map(|j| bop[r * BEAM_DOFS + j] * ul[j]).sum()).collect();
        let mut res = [0.0; 3];
        let mut cs = [0.0; 9];
        for (k, fib) in section.fibers.iter().enumerate() {
            let a = [1.0, -fib.y, -fib.z];
            let strain = gen[0] + a[1] * gen[1] + a[2] * gen[2];
            let r = steel_response(strain, &committed.fibers[g * nf + k], &model.steels[fib.steel]);
            for i in 0..3 {
                res[i] += r.stress * fib.area * a[i];
                for j in 0..3 {
                    cs[i * 3 + j] += r.tangent * fib.area * a[i] * a[j];
                }
            }
            fibers.push(r.state);
        }
        add_atbc(&mut kl, &bop, &cs, &bop, 3, BEAM_DOFS, w);
        for r in 0..3 {
            for j in 0..BEAM_DOFS {
                fl[j] += bop[r * BEAM_DOFS + j] * res[r] * w;
            }
        }
        resultants.push(res);
    }
    let e = model.steels[section.fibers[0].steel].e;
    let gj = e / (2.0 * (1.0 + STEEL_POISSON)) * section.torsion_constant / len;
    for (a, b2, sgn) in [(3, 3, 1.0), (3, 9, -1.0), (9, 3, -1.0), (9, 9, 1.0)] {
        kl[a * BEAM_DOFS + b2] += sgn * gj;
    }
    let twist = ul[9] - ul[3];
    fl[3] -= gj * twist;
    fl[9] += gj * twist;

    // K = T^T K_l T, f = T^T f_l
    let mut k = vec![0.0; BEAM_DOFS * BEAM_DOFS];
    add_atbc(&mut k, &t, &kl, &t, BEAM_DOFS, BEAM_DOFS, 1.0);
    let f: Vec<f64> =
        (0..BEAM_DOFS).map(|j| (0..BEAM_DOFS).map(|i| t[i * BEAM_DOFS + j] * fl[i]).sum()).collect();
    Ok(Integrated { response: BeamResponse { stiffness: k, force: f, state: BeamState { fibers } }, resultants })
}

/// Tangent, internal force and trial state of beam `b` for global element
/// displacements `u` (12 values).
pub fn beam_response(model: &StructuralModel, b: usize, u: &[f64], committed: &BeamState) -> Result<BeamResponse> {
    Ok(integrate(model, b, u, committed)?.response)
}

/// Section resultants `[N, M_weak, M_strong]` at the Gauss sections,
/// `M_strong = -sum(sigma A z)` (positive in sagging).
pub fn beam_resultants(model: &StructuralModel, b: usize, u: &[f64], committed: &BeamState) -> Result<Vec<[f64; 3]>> {
    Ok(integrate(model, b, u, committed)?.resultants)
}

/// Positions of the Gauss sections along the element, as fractions of its length.
pub fn section_stations() -> Vec<f64> {
    gauss_legendre(BEAM_SECTIONS).0.iter().map(|x| 0.5 * (1.0 + x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::SteelParams;
    use crate::model::{BeamRole, Fiber, FiberSection, ModelKind, Monitors, Node, Rect, SectionKind};

    fn model(dir: [f64; 3], offset: [f64; 3]) -> StructuralModel {
        let fibers: Vec<Fiber> = (0..10)
            .map(|k| Fiber { y: 0.0, z: -45.0 + 10.0 * k as f64, area: 100.0, steel: 0 })
            .collect();
        StructuralModel {
            kind: ModelKind::Bridge,
            nodes: vec![
                Node { id: 0, position: [0.0; 3] },
                Node { id: 1, position: [2000.0 * dir[0], 2000.0 * dir[1], 2000.0 * dir[2]] },
            ],
            shells: vec![],
            beams: vec![BeamElement { nodes: [0, 1], section: 0, offset, role: BeamRole::Girder(0) }],
            sections: vec![FiberSection { fibers, torsion_constant: 1e5, kind: SectionKind::Plate }],
            concretes: vec![],
            steels: vec![SteelParams::new(200000.0, 250.0, 0.0).unwrap()],
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
            deck_thickness: 1.0,
            monitors: Monitors::default(),
        }
    }

    fn respond(m: &StructuralModel, u: &[f64]) -> BeamResponse {
        beam_response(m, 0, u, &BeamState::new(m, &m.beams[0])).unwrap()
    }

    #[test]
    fn axial_bar_stiffness() {
        let m = model([1.0, 0.0, 0.0], [0.0; 3]);
        let k = respond(&m, &[0.0; 12]).stiffness;
        let ea_l = 200000.0 * 1000.0 / 2000.0;
        assert!((k[6 * 12 + 6] - ea_l).abs() < 1e-9 * ea_l);
        assert!((k[0] - ea_l).abs() < 1e-9 * ea_l);
        assert!((k[6] + ea_l).abs() < 1e-9 * ea_l);
    }

    #[test]
    fn cantilever_tip_stiffness() {
        let m = model([1.0, 0.0, 0.0], [0.0; 3]);
        let k = respond(&m, &[0.0; 12]).stiffness;
        let i: f64 = m.sections[0].fibers.iter().map(|f| f.area * f.z * f.z).sum();
        // condensed tip stiffness of w2 with ry2 free: 3EI/L^3
        let (kww, kwr, krr) = (k[8 * 12 + 8], k[8 * 12 + 10], k[10 * 12 + 10]);
        let tip = kww - kwr * kwr / krr;
        let exact = 3.0 * 200000.0 * i / 2000f64.powi(3);
        assert!((tip - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn offset_couples_axial_and_bending() {
        // node line 100 above the centroid: rotating the node about y stretches the centroid
        let m = model([1.0, 0.0, 0.0], [0.0, 0.0, -100.0]);
        let mut u = [0.0; 12];
        u[10] = 1e-5;
        let r = respond(&m, &u);
        // the centroid 100 below the node moves by ry x e = -100 ry along x
        let expected = 200000.0 * 1000.0 * (-100.0 * 1e-5) / 2000.0;
        assert!((r.force[6] - expected).abs() < 1e-9 * expected.abs());
        let k = &r.stiffness;
        for a in 0..12 {
            for b in 0..12 {
                assert!((k[a * 12 + b] - k[b * 12 + a]).abs() < 1e-6 * k[0]);
            }
        }
    }

    #[test]
    fn transverse_member_axes() {
        let m = model([0.0, 1.0, 0.0], [0.0; 3]);
        let mut u = [0.0; 12];
        u[7] = 0.1; // stretch along global y
        let r = respond(&m, &u);
        assert!((r.force[7] - 200000.0 * 1000.0 / 2000.0 * 0.1).abs() < 1e-6);
    }

    #[test]
    fn plastic_section_is_flagged() {
        let m = model([1.0, 0.0, 0.0], [0.0; 3]);
        // uniform stretch well past yield
        let mut u = [0.0; 12];
        u[6] = 10.0;
        let r = respond(&m, &u);
        assert!(r.state.has_full_section_yield());
        let mp = 250.0 * 1000.0;
        assert!((r.force[6] - mp).abs() < 1e-6 * mp);
    }

    #[test]
    fn vertical_member_rejected() {
        let m = model([0.0, 0.0, 1.0], [0.0; 3]);
        assert!(beam_response(&m, 0, &[0.0; 12], &BeamState::new(&m, &m.beams[0])).is_err());
    }
}
