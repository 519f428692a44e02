use super::super::model::{StructuralModel, DOFS_PER_NODE, GEOM_TOL};
use crate::error::{Error, Result};

/// Constraint elimination: every node dof maps to a linear combination of
/// equation unknowns. Fixed dofs map to nothing; slaves of rigid links map
/// onto their master's equations.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub map: Vec<Vec<(usize, f64)>>,
    pub equations: usize,
    /// Largest `|i - j|` between coupled equations.
    pub bandwidth: usize,
}

impl DofMap {
    pub fn new(model: &StructuralModel) -> Result<Self> {
        let nn = model.nodes.len();
        let mut master_of = vec![None; nn];
        for l in &model.links {
            master_of[l.slave] = Some(l.master);
        }
        let mut order: Vec<usize> = (0..nn).filter(|&n| master_of[n].is_none()).collect();
        // Number along the axis with more mesh lines first so the band spans
        // the shorter direction.
        let (primary, secondary) =
            if model.mesh_lines(0).len() >= model.mesh_lines(1).len() { (0, 1) } else { (1, 0) };
        let q = |v: f64| (v / GEOM_TOL).round() as i64;
        order.sort_by_key(|&n| {
            let p = model.nodes[n].position;
            (q(p[primary]), q(p[secondary]), q(p[2]), n)
        });

        let mut map: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nn * DOFS_PER_NODE];
        let mut eq = 0;
        for &n in &order {
            let fixed = model.fixed_dofs(n);
            for k in 0..DOFS_PER_NODE {
                if !fixed[k] {
                    map[n * DOFS_PER_NODE + k] = vec![(eq, 1.0)];
                    eq += 1;
                }
            }
        }
        for l in &model.links {
            let (m, s) = (l.master, l.slave);
            if master_of[m].is_some() {
                return Err(Error::InvalidConfig(format!("link master {m} is itself a slave")));
            }
            let pm = model.nodes[m].position;
            let ps = model.nodes[s].position;
            let r = [ps[0] - pm[0], ps[1] - pm[1], ps[2] - pm[2]];
            // u_s = u_m + theta_m x r
            let rows: [[(usize, f64); 3]; 6] = [
                [(0, 1.0), (4, r[2]), (5, -r[1])],
                [(1, 1.0), (5, r[0]), (3, -r[2])],
                [(2, 1.0), (3, r[1]), (4, -r[0])],
                [(3, 1.0), (3, 0.0), (3, 0.0)],
                [(4, 1.0), (4, 0.0), (4, 0.0)],
                [(5, 1.0), (5, 0.0), (5, 0.0)],
            ];
            for (k, row) in rows.iter().enumerate() {
                let mut terms: Vec<(usize, f64)> = Vec::new();
                for &(mk, c) in row {
                    if c == 0.0 {
                        continue;
                    }
                    for &(e, c2) in &map[m * DOFS_PER_NODE + mk] {
                        match terms.iter_mut().find(|t| t.0 == e) {
                            Some(t) => t.1 += c * c2,
                            None => terms.push((e, c * c2)),
                        }
                    }
                }
                terms.sort_by_key(|t| t.0);
                map[s * DOFS_PER_NODE + k] = terms;
            }
        }

        let mut dm = Self { map, equations: eq, bandwidth: 0 };
        let mut bw = 0;
        for nodes in element_node_sets(model) {
            let (mut lo, mut hi) = (usize::MAX, 0);
            for n in nodes {
                for k in 0..DOFS_PER_NODE {
                    for &(e, _) in &dm.map[n * DOFS_PER_NODE + k] {
                        lo = lo.min(e);
                        hi = hi.max(e);
                    }
                }
            }
            if hi >= lo {
                bw = bw.max(hi - lo);
            }
        }
        dm.bandwidth = bw;
        Ok(dm)
    }

    /// Global node-dof vector from equation unknowns.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        self.map.iter().map(|terms| terms.iter().map(|(e, c)| c * reduced[*e]).sum()).collect()
    }

    /// Equation-space vector from a global node-dof force vector.
    pub fn reduce(&self, global: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.equations];
        for (terms, v) in self.map.iter().zip(global) {
            if *v == 0.0 {
                continue;
            }
            for (e, c) in terms {
                out[*e] += c * v;
            }
        }
        out
    }
}

/// Node lists of every stiffness contributor, in assembly order.
pub(crate) fn element_node_sets(model: &StructuralModel) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = Vec::new();
    sets.extend(model.shells.iter().map(|s| s.nodes.to_vec()));
    sets.extend(model.beams.iter().map(|b| b.nodes.to_vec()));
    sets.extend(model.contacts.iter().map(|c| vec![c.upper, c.lower]));
    sets.extend(model.bonds.iter().map(|c| vec![c.upper, c.lower]));
    sets
}
