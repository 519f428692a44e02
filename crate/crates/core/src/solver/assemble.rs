use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::banded::BandedMatrix;
use super::dofs::DofMap;
use crate::contact::{contact_update, ContactStatus, OPEN_TANGENT_RATIO};
use crate::elements::{beam_response, shell_response, BeamState, ShellState};
use crate::error::Result;
use crate::model::{StructuralModel, DOFS_PER_NODE};

/// Converged displacements and committed point histories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    /// Node-dof displacements, node-major `[ux, uy, uz, rx, ry, rz]`.
    pub u: Vec<f64>,
    pub shells: Vec<ShellState>,
    pub beams: Vec<BeamState>,
    pub contacts: Vec<ContactStatus>,
    /// Signed normal force of every interface pair, N (compression negative).
    pub contact_forces: Vec<f64>,
}

impl SolverState {
    pub fn new(model: &StructuralModel) -> Self {
        Self {
            u: vec![0.0; model.dof_count()],
            shells: model.shells.iter().map(ShellState::new).collect(),
            beams: model.beams.iter().map(|b| BeamState::new(model, b)).collect(),
            contacts: model.contacts.iter().map(|c| c.status).collect(),
            contact_forces: vec![0.0; model.contacts.len()],
        }
    }

    /// Adopts the concrete cracks opened in `trial`; the rest of the history
    /// is left alone.
    pub fn latch_cracks(&mut self, model: &StructuralModel, trial: &SolverState) {
        for ((shell, base), t) in model.shells.iter().zip(&mut self.shells).zip(&trial.shells) {
            let p = &model.concretes[shell.concrete];
            for (b, t) in base.concrete.iter_mut().zip(&t.concrete) {
                b.latch_cracks(t, p);
            }
        }
    }
}

/// Global tangent (equation space), internal force and the trial states
/// behind them.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub stiffness: BandedMatrix,
    pub internal: Vec<f64>,
    pub trial: SolverState,
    /// Largest element-level `|k_ab - k_ba| / max|k|` before symmetrization.
    pub max_asymmetry: f64,
}

struct Contribution {
    nodes: Vec<usize>,
    k: Vec<f64>,
    f: Vec<f64>,
}

fn element_u(u: &[f64], nodes: &[usize]) -> Vec<f64> {
    nodes.iter().flat_map(|n| u[n * DOFS_PER_NODE..(n + 1) * DOFS_PER_NODE].iter().copied()).collect()
}

/// Pair stiffness `S` on the translational relative displacement expanded to
/// the two nodes' 12 dofs, with `rel = u_upper - u_lower`.
fn pair_matrix(s: &[[f64; 3]; 3]) -> Vec<f64> {
    let mut k = vec![0.0; 144];
    for i in 0..3 {
        for j in 0..3 {
            k[i * 12 + j] = s[i][j];
            k[i * 12 + 6 + j] = -s[i][j];
            k[(6 + i) * 12 + j] = -s[i][j];
            k[(6 + i) * 12 + 6 + j] = s[i][j];
        }
    }
    k
}

/// Evaluates every element at displacement `u` from the committed states and
/// scatters the results. Element work runs in parallel; the scatter runs in a
/// fixed order, so the result does not depend on the thread count.
pub fn assemble(model: &StructuralModel, dofs: &DofMap, u: &[f64], committed: &SolverState) -> Result<Assembly> {
    let shells: Vec<(Contribution, ShellState)> = (0..model.shells.len())
        .into_par_iter()
        .map(|e| {
            let nodes = model.shells[e].nodes.to_vec();
            let r = shell_response(model, e, &element_u(u, &nodes), &committed.shells[e])?;
            Ok((Contribution { nodes, k: r.stiffness, f: r.force }, r.state))
        })
        .collect::<Result<_>>()?;
    let beams: Vec<(Contribution, BeamState)> = (0..model.beams.len())
        .into_par_iter()
        .map(|b| {
            let nodes = model.beams[b].nodes.to_vec();
            let r = beam_response(model, b, &element_u(u, &nodes), &committed.beams[b])?;
            Ok((Contribution { nodes, k: r.stiffness, f: r.force }, r.state))
        })
        .collect::<Result<_>>()?;

    let mut trial = SolverState {
        u: u.to_vec(),
        shells: Vec::with_capacity(shells.len()),
        beams: Vec::with_capacity(beams.len()),
        contacts: Vec::with_capacity(model.contacts.len()),
        contact_forces: Vec::with_capacity(model.contacts.len()),
    };
    let mut contributions = Vec::with_capacity(shells.len() + beams.len() + model.contacts.len() + model.bonds.len());
    for (c, s) in shells {
        contributions.push(c);
        trial.shells.push(s);
    }
    for (c, s) in beams {
        contributions.push(c);
        trial.beams.push(s);
    }
    for pair in &model.contacts {
        let pu = &u[pair.upper * DOFS_PER_NODE..pair.upper * DOFS_PER_NODE + 3];
        let pl = &u[pair.lower * DOFS_PER_NODE..pair.lower * DOFS_PER_NODE + 3];
        let rel = [pu[0] - pl[0], pu[1] - pl[1], pu[2] - pl[2]];
        let r = contact_update(rel, pair)?;
        let s = match r.status {
            ContactStatus::Closed => r.stiffness,
            ContactStatus::Open => {
                let n = pair.normal;
                let kr = OPEN_TANGENT_RATIO * pair.kn;
                [0, 1, 2].map(|i| [0, 1, 2].map(|j| kr * n[i] * n[j]))
            }
        };
        let mut f = vec![0.0; 12];
        for i in 0..3 {
            f[i] = -r.force_on_upper[i];
            f[6 + i] = r.force_on_upper[i];
        }
        contributions.push(Contribution { nodes: vec![pair.upper, pair.lower], k: pair_matrix(&s), f });
        trial.contacts.push(r.status);
        trial.contact_forces.push(r.normal_force);
    }
    for bond in &model.bonds {
        let op = bond.relative_operator();
        let s = bond.spring();
        let ue = element_u(u, &[bond.upper, bond.lower]);
        let rel: Vec<f64> = (0..3).map(|i| (0..12).map(|j| op[i][j] * ue[j]).sum()).collect();
        let mut k = vec![0.0; 144];
        let mut f = vec![0.0; 12];
        for a in 0..12 {
            for i in 0..3 {
                let si: f64 = (0..3).map(|j| s[i][j] * rel[j]).sum();
                f[a] += op[i][a] * si;
                for b in 0..12 {
                    let sij: f64 = (0..3).map(|j| s[i][j] * op[j][b]).sum();
                    k[a * 12 + b] += op[i][a] * sij;
                }
            }
        }
        contributions.push(Contribution { nodes: vec![bond.upper, bond.lower], k, f });
    }

    let mut stiffness = BandedMatrix::new(dofs.equations, dofs.bandwidth);
    let mut internal = vec![0.0; dofs.equations];
    let mut max_asymmetry: f64 = 0.0;
    for c in &contributions {
        let n = c.nodes.len() * DOFS_PER_NODE;
        let terms: Vec<&[(usize, f64)]> = c
            .nodes
            .iter()
            .flat_map(|node| (0..DOFS_PER_NODE).map(move |k| node * DOFS_PER_NODE + k))
            .map(|g| dofs.map[g].as_slice())
            .collect();
        let kmax = c.k.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for a in 0..n {
            for &(e, coef) in terms[a] {
                internal[e] += coef * c.f[a];
            }
            for b in 0..n {
                let kab = c.k[a * n + b];
                let kba = c.k[b * n + a];
                if kmax > 0.0 {
                    max_asymmetry = max_asymmetry.max((kab - kba).abs() / kmax);
                }
                let ks = 0.5 * (kab + kba);
                if ks == 0.0 {
                    continue;
                }
                for &(ea, ca) in terms[a] {
                    for &(eb, cb) in terms[b] {
                        if ea >= eb {
                            stiffness.add(ea, eb, ca * cb * ks);
                        }
                    }
                }
            }
        }
    }
    Ok(Assembly { stiffness, internal, trial, max_asymmetry })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::check_well_posed;
    use crate::test_support::small_bridge;

    #[test]
    fn virgin_state_has_no_internal_force() {
        let m = small_bridge();
        let dofs = DofMap::new(&m).unwrap();
        let s = SolverState::new(&m);
        let a = assemble(&m, &dofs, &s.u, &s).unwrap();
        assert!(a.internal.iter().all(|v| *v == 0.0));
        assert!(a.max_asymmetry <= 1e-10, "{}", a.max_asymmetry);
        check_well_posed(&m).unwrap();
    }

    #[test]
    fn internal_force_matches_tangent_in_elastic_range() {
        let m = small_bridge();
        let dofs = DofMap::new(&m).unwrap();
        let s = SolverState::new(&m);
        let k = assemble(&m, &dofs, &s.u, &s).unwrap().stiffness;
        let x: Vec<f64> = (0..dofs.equations).map(|i| 1e-11 * ((i % 7) as f64 - 3.0)).collect();
        let u = dofs.expand(&x);
        let f = assemble(&m, &dofs, &u, &s).unwrap().internal;
        let kx = k.mul(&x);
        let scale = kx.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in f.iter().zip(&kx) {
            assert!((a - b).abs() <= 1e-8 * scale);
        }
    }
}
