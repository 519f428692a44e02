//! Compression-only, frictionless node-to-node interface pairs, plus the
//! linear bond used to represent a fully bonded interlayer.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactStatus {
    Open,
    Closed,
}

/// Penalty pair across a fracture plane.
///
/// Transmits force only along `normal` and only in compression; tangential
/// stiffness is identically zero. Units: N and mm (`kn` in N/mm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfacePair {
    pub upper: usize,
    pub lower: usize,
    /// Unit normal pointing from the lower surface to the upper one.
    pub normal: [f64; 3],
    pub kn: f64,
    /// Initial normal gap that must close before the pair bears.
    pub gap: f64,
    pub status: ContactStatus,
}

/// Tangent-only stiffness kept on open pairs so a floating sublayer stays
/// solvable. Never contributes force.
pub const OPEN_TANGENT_RATIO: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactResponse {
    /// Signed normal force, N; compression is negative.
    pub normal_force: f64,
    /// Force the pair exerts on the upper node (the lower one gets the opposite).
    pub force_on_upper: [f64; 3],
    /// Stiffness `k n n^T` acting on the relative displacement; zero when open.
    pub stiffness: [[f64; 3]; 3],
    pub status: ContactStatus,
}

impl InterfacePair {
    pub fn new(upper: usize, lower: usize, normal: [f64; 3], kn: f64, gap: f64) -> Result<Self> {
        let p = Self { upper, lower, normal, kn, gap, status: ContactStatus::Open };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite(&self.normal, "interface normal")?;
        let len = self.normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (len - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("interface normal is not unit length ({len})")));
        }
        if !(self.kn > 0.0 && self.kn.is_finite()) {
            return Err(Error::InvalidInput(format!("penalty stiffness must be > 0 (got {})", self.kn)));
        }
        if !(self.gap >= 0.0 && self.gap.is_finite()) {
            return Err(Error::InvalidInput(format!("initial gap must be >= 0 (got {})", self.gap)));
        }
        if self.upper == self.lower {
            return Err(Error::InvalidInput(format!("pair joins node {} to itself", self.upper)));
        }
        Ok(())
    }

    /// Closing displacement for a relative displacement `upper - lower`.
    pub fn closure(&self, relative: &[f64; 3]) -> f64 {
        -dot(relative, &self.normal)
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Evaluates a pair for the relative displacement `upper - lower` (mm).
pub fn contact_update(relative: [f64; 3], pair: &InterfacePair) -> Result<ContactResponse> {
    ensure_finite(&relative, "relative displacement")?;
    let closure = pair.closure(&relative);
    if closure > pair.gap {
        let push = pair.kn * (closure - pair.gap);
        let n = pair.normal;
        let mut k = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                k[i][j] = pair.kn * n[i] * n[j];
            }
        }
        Ok(ContactResponse {
            normal_force: -push,
            force_on_upper: [push * n[0], push * n[1], push * n[2]],
            stiffness: k,
            status: ContactStatus::Closed,
        })
    } else {
        Ok(ContactResponse {
            normal_force: 0.0,
            force_on_upper: [0.0; 3],
            stiffness: [[0.0; 3]; 3],
            status: ContactStatus::Open,
        })
    }
}

/// Pairs two node-matched surfaces. Each entry is `(node id, [x, y])`.
///
/// Upper nodes are matched to lower nodes by plan position within `tol`.
pub fn pair_interface(
    upper: &[(usize, [f64; 2])],
    lower: &[(usize, [f64; 2])],
    kn: f64,
    gap: f64,
    tol: f64,
) -> Result<Vec<InterfacePair>> {
    let mut used = vec![false; lower.len()];
    let mut unmatched = Vec::new();
    let mut pairs = Vec::with_capacity(upper.len());
    for &(u, pu) in upper {
        let hit = lower.iter().enumerate().find(|(j, (_, pl))| {
            !used[*j] && (pl[0] - pu[0]).abs() <= tol && (pl[1] - pu[1]).abs() <= tol
        });
        match hit {
            Some((j, &(l, _))) => {
                used[j] = true;
                pairs.push(InterfacePair::new(u, l, [0.0, 0.0, 1.0], kn, gap)?);
            }
            None => unmatched.push(u),
        }
    }
    unmatched.extend(lower.iter().zip(&used).filter(|(_, u)| !**u).map(|((id, _), _)| *id));
    if unmatched.is_empty() {
        Ok(pairs)
    } else {
        unmatched.sort_unstable();
        Err(Error::UnmatchedSurface(unmatched))
    }
}

/// Linear tie between duplicated nodes at an interlayer plane offset `lever`
/// (mm, along the normal) from the nodes' reference plane.
///
/// Each node keeps its own rotation, so a bonded two-layer stack is not forced
/// into a single director.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BondPair {
    pub upper: usize,
    pub lower: usize,
    pub normal: [f64; 3],
    pub lever: f64,
    pub k_normal: f64,
    pub k_tangent: f64,
}

impl BondPair {
    /// 6x12 map from `[u_upper(6), u_lower(6)]` to the relative displacement
    /// at the interlayer plane (only the first three rows are used).
    pub fn relative_operator(&self) -> [[f64; 12]; 3] {
        let r = [self.lever * self.normal[0], self.lever * self.normal[1], self.lever * self.normal[2]];
        // theta x r = -[r]x theta
        let rx = [[0.0, -r[2], r[1]], [r[2], 0.0, -r[0]], [-r[1], r[0], 0.0]];
        let mut op = [[0.0; 12]; 3];
        for i in 0..3 {
            op[i][i] = 1.0;
            op[i][6 + i] = -1.0;
            for j in 0..3 {
                op[i][3 + j] = -rx[i][j];
                op[i][9 + j] = rx[i][j];
            }
        }
        op
    }

    /// Spring matrix on the relative displacement.
    pub fn spring(&self) -> [[f64; 3]; 3] {
        let n = self.normal;
        let mut k = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let nn = n[i] * n[j];
                let id = if i == j { 1.0 } else { 0.0 };
                k[i][j] = self.k_normal * nn + self.k_tangent * (id - nn);
            }
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(kn: f64, gap: f64) -> InterfacePair {
        InterfacePair::new(1, 0, [0.0, 0.0, 1.0], kn, gap).unwrap()
    }

    #[test]
    fn opening_transmits_nothing() {
        // upper moves up by 0.5 relative to lower
        let r = contact_update([0.0, 0.0, 0.5], &pair(1e6, 0.75)).unwrap();
        assert_eq!(r.normal_force, 0.0);
        assert_eq!(r.force_on_upper, [0.0; 3]);
        assert_eq!(r.status, ContactStatus::Open);
    }

    #[test]
    fn penalty_hand_value() {
        // 1000 kN/mm = 1e6 N/mm; closure 1.0 mm past a 0.75 mm gap
        let r = contact_update([0.0, 0.0, -1.0], &pair(1e6, 0.75)).unwrap();
        assert_eq!(r.normal_force, -250_000.0);
        assert_eq!(r.status, ContactStatus::Closed);
        assert_eq!(r.force_on_upper, [0.0, 0.0, 250_000.0]);
    }

    #[test]
    fn tangential_slip_is_free() {
        for dn in [-0.75, -0.3, 0.0, 0.4] {
            let r = contact_update([5.0, -5.0, dn], &pair(1e6, 0.75)).unwrap();
            assert_eq!(r.force_on_upper, [0.0; 3]);
            assert_eq!(r.normal_force, 0.0);
        }
        // closed pair with slip still has no tangential force
        let r = contact_update([5.0, 3.0, -1.0], &pair(1e6, 0.75)).unwrap();
        assert_eq!(r.force_on_upper[0], 0.0);
        assert_eq!(r.force_on_upper[1], 0.0);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(contact_update([f64::NAN, 0.0, 0.0], &pair(1.0, 0.0)).is_err());
    }

    fn grid(n: usize, offset: usize) -> Vec<(usize, [f64; 2])> {
        (0..n * n)
            .map(|k| (offset + k, [(k % n) as f64 * 100.0, (k / n) as f64 * 100.0]))
            .collect()
    }

    #[test]
    fn matched_grids_pair_up() {
        let pairs = pair_interface(&grid(5, 100), &grid(5, 0), 1.0, 0.0, 1e-6).unwrap();
        assert_eq!(pairs.len(), 25);
        assert!(pairs.iter().all(|p| p.upper == p.lower + 100));
    }

    #[test]
    fn empty_surfaces() {
        assert!(pair_interface(&[], &[], 1.0, 0.0, 1e-6).unwrap().is_empty());
    }

    #[test]
    fn unmatched_node_is_named() {
        let mut upper = grid(2, 10);
        upper[3].1 = [1000.0, 1000.0];
        match pair_interface(&upper, &grid(2, 0), 1.0, 0.0, 1e-6) {
            Err(Error::UnmatchedSurface(ids)) => assert_eq!(ids, vec![3, 13]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bond_operator_includes_rotation_lever() {
        let b = BondPair {
            upper: 1,
            lower: 0,
            normal: [0.0, 0.0, 1.0],
            lever: 10.0,
            k_normal: 1.0,
            k_tangent: 1.0,
        };
        let op = b.relative_operator();
        // rotation about y of the upper node moves the plane at z = 10 by +10 in x
        assert_eq!(op[0][4], 10.0);
        assert_eq!(op[1][3], -10.0);
        assert_eq!(op[2][3], 0.0);
    }
}
