//! Delamination scenarios: splitting the deck at a fracture plane and the
//! corrosion correlations used to pick crack widths.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::contact::{BondPair, InterfacePair};
use crate::error::{Error, Result};
use crate::model::{Node, Rect, ShellRole, StructuralModel, Support, SupportKind, GEOM_TOL};

/// Default penalty multiplier on `E * A_trib / t`.
pub const DEFAULT_PENALTY_SCALE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum InterfaceKind {
    /// Frictionless, compression-only pairs.
    #[default]
    CompressionOnly,
    /// Linear bond in all directions (a perfectly bonded interlayer).
    Bonded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelaminationScenario {
    pub label: String,
    pub footprint: Vec<Rect>,
    /// Depth of the fracture plane below the deck top, mm.
    pub depth: f64,
    /// Crack width, mm.
    pub crack_width: f64,
    /// Initial normal gap of the pairs; defaults to the crack width.
    pub gap: Option<f64>,
    pub interface: InterfaceKind,
    pub penalty_scale: f64,
}

impl DelaminationScenario {
    pub fn new(label: &str, footprint: Vec<Rect>, depth: f64, crack_width: f64) -> Self {
        Self {
            label: label.to_string(),
            footprint,
            depth,
            crack_width,
            gap: None,
            interface: InterfaceKind::CompressionOnly,
            penalty_scale: DEFAULT_PENALTY_SCALE,
        }
    }

    pub fn initial_gap(&self) -> f64 {
        self.gap.unwrap_or(self.crack_width)
    }

    pub fn validate(&self, deck_thickness: f64, plan: &Rect) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(format!("scenario '{}': {m}", self.label)));
        if !(self.depth > 0.0 && self.depth < deck_thickness) {
            return bad(format!("depth {} outside (0, {deck_thickness})", self.depth));
        }
        if !(self.crack_width >= 0.0 && self.crack_width.is_finite()) {
            return bad(format!("crack width must be >= 0 (got {})", self.crack_width));
        }
        if let Some(g) = self.gap {
            if !(g >= 0.0 && g.is_finite()) {
                return bad(format!("gap must be >= 0 (got {g})"));
            }
        }
        if !(self.penalty_scale > 0.0 && self.penalty_scale.is_finite()) {
            return bad("penalty scale must be > 0".into());
        }
        for (i, r) in self.footprint.iter().enumerate() {
            if !(r.area() > 0.0) {
                return bad(format!("rectangle {i} has no area"));
            }
            if !plan.contains(r, GEOM_TOL) {
                return bad(format!("rectangle {i} lies outside the deck plan"));
            }
            for (j, s) in self.footprint.iter().enumerate().skip(i + 1) {
                if let Some(o) = r.intersection(s) {
                    if o.area() > GEOM_TOL * r.area().max(s.area()) {
                        return bad(format!("rectangles {i} and {j} overlap"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Total footprint area over the deck plan area.
pub fn coverage_fraction(scenario: &DelaminationScenario, plan_area: f64) -> f64 {
    if !(plan_area > 0.0) {
        return 0.0;
    }
    (scenario.footprint.iter().map(Rect::area).sum::<f64>() / plan_area).clamp(0.0, 1.0)
}

/// A delaminated model and any notes produced while building it.
#[derive(Debug, Clone)]
pub struct Integration {
    pub model: StructuralModel,
    pub warnings: Vec<String>,
}

fn snap(v: f64, lines: &[f64], what: &str, warnings: &mut Vec<String>) -> Result<f64> {
    let (first, last) = (lines[0], lines[lines.len() - 1]);
    let nearest = *lines
        .iter()
        .min_by(|a, b| (*a - v).abs().total_cmp(&(*b - v).abs()))
        .expect("mesh has lines");
    let d = (nearest - v).abs();
    if d <= GEOM_TOL {
        return Ok(nearest);
    }
    // Inside the mesh every coordinate is within half an element of a line;
    // outside it only the first half element is tolerated.
    let edge_el = if v < first { lines[1] - first } else { last - lines[lines.len() - 2] };
    if (v < first || v > last) && d > 0.5 * edge_el {
        return Err(Error::InvalidInput(format!("footprint {what} {v} lies outside the mesh")));
    }
    warnings.push(format!("footprint {what} {v} snapped to mesh line {nearest}"));
    Ok(nearest)
}

/// Splits every deck shell column inside the footprint at the fracture depth
/// and connects the two faces with interface pairs.
///
/// Nodes whose incident shells all lie inside the footprint are duplicated;
/// the lower sublayer keeps the original nodes (and with them the supports
/// and girder links), the upper sublayer gets the copies. Nodes on the
/// footprint boundary stay shared, so the deck is monolithic outside.
pub fn integrate_delamination(model: &StructuralModel, scenario: &DelaminationScenario) -> Result<Integration> {
    if !model.damage.is_empty() {
        return Err(Error::InvalidInput("model already contains a fracture plane".into()));
    }
    if !model.symmetry.is_empty() {
        return Err(Error::InvalidInput("integrate damage before symmetry reduction".into()));
    }
    scenario.validate(model.deck_thickness, &model.plan)?;
    let mut warnings = Vec::new();
    let xs = model.mesh_lines(0);
    let ys = model.mesh_lines(1);
    let mut footprint = Vec::with_capacity(scenario.footprint.len());
    for r in &scenario.footprint {
        let s = Rect::new(
            snap(r.x0, &xs, "x", &mut warnings)?,
            snap(r.y0, &ys, "y", &mut warnings)?,
            snap(r.x1, &xs, "x", &mut warnings)?,
            snap(r.y1, &ys, "y", &mut warnings)?,
        );
        if !(s.area() > 0.0) {
            return Err(Error::InvalidInput(format!(
                "scenario '{}': a footprint rectangle vanishes after snapping to the mesh",
                scenario.label
            )));
        }
        footprint.push(s);
    }
    let mut snapped = scenario.clone();
    snapped.footprint = footprint;
    snapped.validate(model.deck_thickness, &model.plan)?;

    let mut m = model.clone();
    let inside: Vec<bool> = (0..m.shells.len())
        .map(|e| {
            let c = m.shell_centroid(e);
            m.shells[e].role == ShellRole::Deck
                && snapped.footprint.iter().any(|r| r.contains_point(c[0], c[1], -GEOM_TOL))
        })
        .collect();
    if !inside.iter().any(|v| *v) {
        m.damage.push(snapped);
        return Ok(Integration { model: m, warnings });
    }

    let nn = m.nodes.len();
    let mut incident = vec![0usize; nn];
    let mut incident_inside = vec![0usize; nn];
    let mut tributary = vec![0.0; nn];
    for (e, s) in m.shells.iter().enumerate() {
        for n in s.nodes {
            incident[n] += 1;
            if inside[e] {
                incident_inside[n] += 1;
            }
        }
    }
    for e in (0..m.shells.len()).filter(|e| inside[*e]) {
        let a = 0.25 * m.shell_area(e).abs();
        for n in m.shells[e].nodes {
            tributary[n] += a;
        }
    }
    let mut copy_of = BTreeMap::new();
    for n in 0..nn {
        if incident[n] > 0 && incident[n] == incident_inside[n] {
            let id = m.nodes.len();
            m.nodes.push(Node { id, position: m.nodes[n].position });
            copy_of.insert(n, id);
        }
    }

    let depth = snapped.depth;
    let mut sublayer_t = f64::INFINITY;
    for e in 0..inside.len() {
        if !inside[e] {
            continue;
        }
        let orig = m.shells[e].clone();
        let mut upper = orig.clone();
        let mut lower = orig.clone();
        upper.thickness = depth;
        upper.role = ShellRole::UpperSublayer;
        upper.nodes = orig.nodes.map(|n| *copy_of.get(&n).unwrap_or(&n));
        upper.rebars.clear();
        lower.thickness = orig.thickness - depth;
        lower.top = orig.top - depth;
        lower.role = ShellRole::LowerSublayer;
        lower.rebars.clear();
        for r in &orig.rebars {
            if (r.depth - depth).abs() <= GEOM_TOL {
                return Err(Error::InvalidInput(format!(
                    "scenario '{}': a reinforcement layer lies on the fracture plane",
                    snapped.label
                )));
            }
            if r.depth < depth {
                upper.rebars.push(*r);
            } else {
                let mut moved = *r;
                moved.depth -= depth;
                lower.rebars.push(moved);
            }
        }
        sublayer_t = sublayer_t.min(upper.thickness).min(lower.thickness);
        m.shells[e] = lower;
        m.shells.push(upper);
    }

    let conc = m.concretes[m.shells[0].concrete];
    let gap = snapped.initial_gap();
    let lever = m.deck_thickness * 0.5 - depth;
    for (&lower, &upper) in &copy_of {
        let kn = snapped.penalty_scale * conc.e * tributary[lower] / sublayer_t;
        match snapped.interface {
            InterfaceKind::CompressionOnly => {
                m.contacts.push(InterfacePair::new(upper, lower, [0.0, 0.0, 1.0], kn, gap)?);
            }
            InterfaceKind::Bonded => m.bonds.push(BondPair {
                upper,
                lower,
                normal: [0.0, 0.0, 1.0],
                lever,
                k_normal: kn,
                k_tangent: snapped.penalty_scale * conc.shear_modulus() * tributary[lower] / sublayer_t,
            }),
        }
    }

    // Copies keep in-plane restraints and symmetry conditions; they bear on
    // the lower layer vertically through the interface.
    let mut extra = Vec::new();
    for s in &m.supports {
        if let Some(&c) = copy_of.get(&s.node) {
            let mut fixed = s.fixed;
            if s.kind == SupportKind::Physical {
                fixed[2] = false;
                fixed[3] = false;
                fixed[4] = false;
            }
            if fixed.iter().any(|f| *f) {
                extra.push(Support { node: c, fixed, kind: s.kind });
            }
        }
    }
    m.supports.extend(extra);
    m.damage.push(snapped);
    m.validate()?;
    Ok(Integration { model: m, warnings })
}

/// Linear crack-width correlation with rebar radius loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrosionCorrelation {
    /// Crack width per micrometre of radius loss, mm/um.
    pub rate: f64,
    /// Width at which delamination becomes likely, mm.
    pub threshold: f64,
    /// Largest width the correlation is considered valid for, mm.
    pub ceiling: f64,
}

impl Default for CorrosionCorrelation {
    fn default() -> Self {
        Self { rate: 0.3 / 150.0, threshold: 0.1, ceiling: 1.0 }
    }
}

impl CorrosionCorrelation {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate > 0.0 && self.threshold > 0.0 && self.ceiling > 0.0 && self.threshold < self.ceiling) {
            return Err(Error::InvalidInput("correlation needs positive rate and threshold < ceiling".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DelaminationRisk {
    BelowThreshold,
    DelaminationLikely,
    /// Likely, but the width is past the correlation's validity range.
    BeyondCorrelationRange,
}

/// Crack width, mm, for a rebar radius loss in micrometres.
pub fn crack_width_from_radius_loss(radius_loss: f64, corr: &CorrosionCorrelation) -> Result<f64> {
    corr.validate()?;
    if !(radius_loss >= 0.0 && radius_loss.is_finite()) {
        return Err(Error::InvalidInput(format!("radius loss must be >= 0 (got {radius_loss})")));
    }
    Ok(corr.rate * radius_loss)
}

pub fn delamination_risk(width: f64, corr: &CorrosionCorrelation) -> DelaminationRisk {
    if width < corr.threshold {
        DelaminationRisk::BelowThreshold
    } else if width <= corr.ceiling {
        DelaminationRisk::DelaminationLikely
    } else {
        DelaminationRisk::BeyondCorrelationRange
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::small_bridge;

    #[test]
    fn empty_footprint_is_identity() {
        let m = small_bridge();
        let s = DelaminationScenario::new("none", vec![], 76.2, 0.75);
        let out = integrate_delamination(&m, &s).unwrap().model;
        assert_eq!(out.nodes.len(), m.nodes.len());
        assert_eq!(out.shells.len(), m.shells.len());
        assert!(out.contacts.is_empty());
    }

    #[test]
    fn two_by_two_block() {
        let m = small_bridge();
        let xs = m.mesh_lines(0);
        let ys = m.mesh_lines(1);
        let s = DelaminationScenario::new("b", vec![Rect::new(xs[4], ys[1], xs[6], ys[3])], 76.2, 0.75);
        let out = integrate_delamination(&m, &s).unwrap().model;
        assert_eq!(out.shells.len(), m.shells.len() + 4);
        // one interior node of a 2x2 block is duplicated
        assert_eq!(out.nodes.len(), m.nodes.len() + 1);
        assert_eq!(out.contacts.len(), 1);
        assert_eq!(out.contacts[0].gap, 0.75);
        let vol = |mm: &StructuralModel| -> f64 {
            (0..mm.shells.len()).map(|e| mm.shell_area(e).abs() * mm.shells[e].thickness).sum()
        };
        assert!((vol(&out) - vol(&m)).abs() <= 1e-9 * vol(&m));
        let bars = |mm: &StructuralModel| mm.shells.iter().map(|s| s.rebars.len()).sum::<usize>();
        assert_eq!(bars(&out), bars(&m));
    }

    #[test]
    fn off_grid_edges_are_snapped_with_warning() {
        let m = small_bridge();
        let xs = m.mesh_lines(0);
        let ys = m.mesh_lines(1);
        let s = DelaminationScenario::new("c", vec![Rect::new(xs[4] + 10.0, ys[1], xs[6], ys[3] - 5.0)], 76.2, 0.75);
        let out = integrate_delamination(&m, &s).unwrap();
        assert_eq!(out.warnings.len(), 2);
        assert_eq!(out.model.damage[0].footprint[0].x0, xs[4]);
    }

    #[test]
    fn invalid_depth_and_plan() {
        let m = small_bridge();
        let r = Rect::new(0.0, 0.0, 100.0, 100.0);
        assert!(integrate_delamination(&m, &DelaminationScenario::new("d", vec![r], 0.0, 0.75)).is_err());
        assert!(integrate_delamination(&m, &DelaminationScenario::new("d", vec![r], 500.0, 0.75)).is_err());
        let far = Rect::new(-5000.0, 0.0, -4000.0, 100.0);
        assert!(integrate_delamination(&m, &DelaminationScenario::new("d", vec![far], 50.0, 0.75)).is_err());
    }

    #[test]
    fn coverage_examples() {
        let empty = DelaminationScenario::new("a", vec![], 76.2, 0.75);
        assert_eq!(coverage_fraction(&empty, 1e8), 0.0);
        let one = DelaminationScenario::new("a", vec![Rect::new(0.0, 0.0, 2000.0, 3000.0)], 76.2, 0.75);
        assert!((coverage_fraction(&one, 1e8) - 0.06).abs() < 1e-15);
    }

    #[test]
    fn corrosion_correlation() {
        let c = CorrosionCorrelation::default();
        assert!((crack_width_from_radius_loss(150.0, &c).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(crack_width_from_radius_loss(0.0, &c).unwrap(), 0.0);
        assert!((crack_width_from_radius_loss(375.0, &c).unwrap() - 0.75).abs() < 1e-15);
        assert!(crack_width_from_radius_loss(-1.0, &c).is_err());
        assert_eq!(delamination_risk(0.75, &c), DelaminationRisk::DelaminationLikely);
        assert_eq!(delamination_risk(0.05, &c), DelaminationRisk::BelowThreshold);
        assert_eq!(delamination_risk(1.5, &c), DelaminationRisk::BeyondCorrelationRange);
    }
}
