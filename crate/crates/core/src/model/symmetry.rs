use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Rect, StructuralModel, Support, SupportKind, GEOM_TOL};
use crate::error::{Error, Result};

/// Mid-planes of the full-structure plan that a model can be cut along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SymmetryPlane {
    /// x = mid-span.
    XMid,
    /// y = mid-width.
    YMid,
}

impl SymmetryPlane {
    fn axis(self) -> usize {
        match self {
            SymmetryPlane::XMid => 0,
            SymmetryPlane::YMid => 1,
        }
    }

    /// Components restrained on the cut: normal translation and the two
    /// rotations lying in the plane.
    fn restrained(self) -> [bool; 6] {
        match self {
            SymmetryPlane::XMid => [true, false, false, false, true, true],
            SymmetryPlane::YMid => [false, true, false, true, false, true],
        }
    }

    pub fn coordinate(self, plan: &Rect) -> f64 {
        match self {
            SymmetryPlane::XMid => 0.5 * (plan.x0 + plan.x1),
            SymmetryPlane::YMid => 0.5 * (plan.y0 + plan.y1),
        }
    }
}

fn key(p: [f64; 3]) -> (i64, i64, i64) {
    let q = |v: f64| (v / 1e-4).round() as i64;
    (q(p[0]), q(p[1]), q(p[2]))
}

fn mirror(mut p: [f64; 3], axis: usize, at: f64) -> [f64; 3] {
    p[axis] = 2.0 * at - p[axis];
    p
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * (1.0 + a.abs().max(b.abs()))
}

fn check_symmetric(model: &StructuralModel, plane: SymmetryPlane, at: f64) -> Result<()> {
    let axis = plane.axis();
    let positions: HashSet<_> = model.nodes.iter().map(|n| key(n.position)).collect();
    for n in &model.nodes {
        if !positions.contains(&key(mirror(n.position, axis, at))) {
            return Err(Error::Asymmetric(format!(
                "node {} at {:?} has no mirror image about {plane:?}",
                n.id, n.position
            )));
        }
    }
    let vertical: HashSet<_> = model
        .supports
        .iter()
        .filter(|s| s.kind == SupportKind::Physical && s.fixed[2])
        .map(|s| key(model.nodes[s.node].position))
        .collect();
    for s in model.supports.iter().filter(|s| s.kind == SupportKind::Physical && s.fixed[2]) {
        if !vertical.contains(&key(mirror(model.nodes[s.node].position, axis, at))) {
            return Err(Error::Asymmetric(format!(
                "vertical support at node {} has no mirror image about {plane:?}",
                s.node
            )));
        }
    }
    for (k, p) in model.loads.iter().enumerate() {
        let mut c = [p.center[0], p.center[1], 0.0];
        c = mirror(c, axis, at);
        let found = model.loads.iter().any(|q| {
            close(q.center[0], c[0])
                && close(q.center[1], c[1])
                && close(q.length, p.length)
                && close(q.width, p.width)
                && close(q.share, p.share)
        });
        if !found {
            return Err(Error::Asymmetric(format!(
                "load patch {k} at ({}, {}) has no mirror image about {plane:?}",
                p.center[0], p.center[1]
            )));
        }
    }
    for scenario in &model.damage {
        for r in &scenario.footprint {
            let m = match plane {
                SymmetryPlane::XMid => Rect::new(2.0 * at - r.x1, r.y0, 2.0 * at - r.x0, r.y1),
                SymmetryPlane::YMid => Rect::new(r.x0, 2.0 * at - r.y1, r.x1, 2.0 * at - r.y0),
            };
            let found = scenario.footprint.iter().any(|q| {
                close(q.x0, m.x0) && close(q.x1, m.x1) && close(q.y0, m.y0) && close(q.y1, m.y1)
            });
            if !found {
                return Err(Error::Asymmetric(format!(
                    "damage footprint of scenario '{}' is not symmetric about {plane:?}",
                    scenario.label
                )));
            }
        }
    }
    Ok(())
}

/// Cuts a symmetric model along the requested mid-planes, keeping the part
/// on the low-coordinate side and adding symmetry restraints on the cut.
///
/// Members lying in a cut plane keep half their section; interface pairs on
/// it keep half their penalty stiffness.
pub fn apply_symmetry_reduction(model: &StructuralModel, planes: &[SymmetryPlane]) -> Result<StructuralModel> {
    let mut planes = planes.to_vec();
    planes.sort();
    planes.dedup();
    let mut out = model.clone();
    for plane in planes {
        if out.symmetry.contains(&plane) {
            return Err(Error::Asymmetric(format!("model is already reduced about {plane:?}")));
        }
        let at = plane.coordinate(&out.plan);
        check_symmetric(model, plane, at)?;
        out = cut(&out, plane, at);
    }
    out.validate()?;
    Ok(out)
}

fn cut(model: &StructuralModel, plane: SymmetryPlane, at: f64) -> StructuralModel {
    let axis = plane.axis();
    let mut m = model.clone();
    let keep: Vec<bool> = m.nodes.iter().map(|n| n.position[axis] <= at + GEOM_TOL).collect();
    let on_plane: Vec<bool> = m.nodes.iter().map(|n| (n.position[axis] - at).abs() <= GEOM_TOL).collect();

    m.shells.retain(|s| s.nodes.iter().all(|&n| keep[n]));
    m.beams.retain(|b| b.nodes.iter().all(|&n| keep[n]));
    let mut halved = std::collections::HashMap::new();
    for b in &mut m.beams {
        // a member lying in the plane: its node line sits on it
        if b.nodes.iter().all(|&n| on_plane[n]) {
            let idx = *halved.entry(b.section).or_insert_with(|| {
                m.sections.push(model.sections[b.section].scaled(0.5));
                m.sections.len() - 1
            });
            b.section = idx;
        }
    }
    m.links.retain(|l| keep[l.master] && keep[l.slave]);
    for c in &mut m.contacts {
        if on_plane[c.upper] {
            c.kn *= 0.5;
        }
    }
    for b in &mut m.bonds {
        if on_plane[b.upper] {
            b.k_normal *= 0.5;
            b.k_tangent *= 0.5;
        }
    }
    // A physical restraint along the cut normal without a mirror image (one
    // pinned end of a pin-roller span) would over-restrain the reduced model;
    // the cut plane supplies that restraint instead.
    let normal_fixed: HashSet<_> = model
        .supports
        .iter()
        .filter(|s| s.kind == SupportKind::Physical && s.fixed[axis])
        .map(|s| key(model.nodes[s.node].position))
        .collect();
    for s in &mut m.supports {
        if s.kind == SupportKind::Physical
            && s.fixed[axis]
            && !normal_fixed.contains(&key(mirror(model.nodes[s.node].position, axis, at)))
        {
            s.fixed[axis] = false;
        }
    }
    m.supports.retain(|s| s.fixed.iter().any(|f| *f));
    let slaves: HashSet<usize> = m.links.iter().map(|l| l.slave).collect();
    for n in 0..m.nodes.len() {
        if on_plane[n] && !slaves.contains(&n) {
            m.supports.push(Support { node: n, fixed: plane.restrained(), kind: SupportKind::Symmetry });
        }
    }
    match plane {
        SymmetryPlane::XMid => m.retained.x1 = at,
        SymmetryPlane::YMid => m.retained.y1 = at,
    }
    m.symmetry.push(plane);
    // Nodes left without any element after the cut go away with it.
    let mut used = vec![false; m.nodes.len()];
    m.shells.iter().flat_map(|s| s.nodes).for_each(|n| used[n] = true);
    m.beams.iter().flat_map(|b| b.nodes).for_each(|n| used[n] = true);
    m.links.iter().for_each(|l| {
        used[l.master] = true;
        used[l.slave] = true;
    });
    let keep: Vec<bool> = keep.iter().zip(&used).map(|(k, u)| *k && *u).collect();
    m.compact_nodes(&keep);
    m
}
