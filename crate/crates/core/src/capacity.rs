//! Nominal (unfactored) design capacities used as baselines for the
//! nonlinear runs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BridgeConfig, GirderPlates, LoadPatch};

fn positive(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        if !(*v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidInput(format!("{name} must be > 0 (got {v})")));
        }
    }
    Ok(())
}

/// Two-way (punching) shear resistance of a slab under a rectangular patch, kN.
///
/// The critical perimeter lies `dv / 2` outside the patch faces and the
/// stress limit depends on the patch aspect ratio.
pub fn punching_shear_capacity(length: f64, width: f64, dv: f64, fc: f64) -> Result<f64> {
    positive(&[("patch length", length), ("patch width", width), ("shear depth", dv), ("f'c", fc)])?;
    let beta = length.max(width) / length.min(width);
    let b0 = 2.0 * (length + dv) + 2.0 * (width + dv);
    let vc = (0.17 + 0.33 / beta).min(0.33) * fc.sqrt();
    Ok(vc * b0 * dv / 1000.0)
}

/// Flexural resistance of a singly reinforced deck strip, kN·m per metre.
pub fn deck_strip_capacity(area: f64, depth: f64, fy: f64, fc: f64) -> Result<f64> {
    positive(&[("effective depth", depth), ("fy", fy), ("f'c", fc)])?;
    if !(area >= 0.0 && area.is_finite()) {
        return Err(Error::InvalidInput(format!("reinforcement area must be >= 0 (got {area})")));
    }
    let a = area * fy / (0.85 * fc);
    if a >= depth {
        return Err(Error::InvalidInput(format!(
            "stress block depth {a:.2} mm reaches the effective depth {depth} mm"
        )));
    }
    Ok(area * fy * (depth - 0.5 * a) / 1000.0)
}

/// Horizontal band of a cross-section, measured downward from the top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressBlock {
    pub top: f64,
    pub bottom: f64,
    pub width: f64,
    /// Stress magnitude where the band is above the neutral axis, MPa.
    pub compression: f64,
    /// Stress magnitude where the band is below the neutral axis, MPa.
    pub tension: f64,
}

impl StressBlock {
    /// Force above and below `pna`.
    fn forces(&self, pna: f64) -> (f64, f64) {
        let above = (pna.min(self.bottom) - self.top).max(0.0);
        let below = (self.bottom - pna.max(self.top)).max(0.0);
        (self.compression * self.width * above, self.tension * self.width * below)
    }

    fn moment(&self, pna: f64) -> f64 {
        let part = |a: f64, b: f64, s: f64| {
            if b > a {
                s * self.width * (b - a) * (0.5 * (a + b) - pna).abs()
            } else {
                0.0
            }
        };
        part(self.top, pna.min(self.bottom), self.compression) + part(pna.max(self.top), self.bottom, self.tension)
    }
}

/// Plastic moment of a section of rectangular stress blocks, N·mm, and the
/// plastic neutral axis depth from the top, mm.
pub fn plastic_moment(blocks: &[StressBlock]) -> Result<(f64, f64)> {
    if blocks.is_empty() {
        return Err(Error::InvalidInput("section has no blocks".into()));
    }
    for b in blocks {
        if !(b.bottom > b.top && b.width >= 0.0 && b.compression >= 0.0 && b.tension >= 0.0) {
            return Err(Error::InvalidInput("degenerate stress block".into()));
        }
    }
    let top = blocks.iter().map(|b| b.top).fold(f64::INFINITY, f64::min);
    let bottom = blocks.iter().map(|b| b.bottom).fold(f64::NEG_INFINITY, f64::max);
    let imbalance = |z: f64| blocks.iter().map(|b| b.forces(z)).fold(0.0, |acc, (c, t)| acc + c - t);
    let (mut lo, mut hi) = (top, bottom);
    if !(imbalance(lo) <= 0.0 && imbalance(hi) >= 0.0) {
        return Err(Error::InvalidInput("no plastic neutral axis: section cannot balance tension and compression".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if imbalance(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * (bottom - top) {
            break;
        }
    }
    let pna = 0.5 * (lo + hi);
    Ok((blocks.iter().map(|b| b.moment(pna)).sum(), pna))
}

/// Steel girder acting compositely with its effective deck width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositeSectionSpec {
    pub girder: GirderPlates,
    pub fy: f64,
    pub deck_width: f64,
    pub deck_thickness: f64,
    pub fc: f64,
    pub haunch: f64,
}

impl CompositeSectionSpec {
    pub fn validate(&self) -> Result<()> {
        let g = &self.girder;
        positive(&[
            ("top flange width", g.top_flange.0),
            ("top flange thickness", g.top_flange.1),
            ("web depth", g.web.0),
            ("web thickness", g.web.1),
            ("bottom flange width", g.bottom_flange.0),
            ("bottom flange thickness", g.bottom_flange.1),
            ("fy", self.fy),
            ("deck width", self.deck_width),
            ("deck thickness", self.deck_thickness),
            ("f'c", self.fc),
        ])?;
        if !(self.haunch >= 0.0 && self.haunch.is_finite()) {
            return Err(Error::InvalidInput(format!("haunch must be >= 0 (got {})", self.haunch)));
        }
        Ok(())
    }

    /// Steel plates as blocks starting at depth `z0` from the top.
    pub fn steel_blocks(g: &GirderPlates, fy: f64, z0: f64) -> Vec<StressBlock> {
        let plates = [g.top_flange, (g.web.1, g.web.0), g.bottom_flange];
        let mut z = z0;
        plates
            .iter()
            .map(|&(w, t)| {
                let b = StressBlock { top: z, bottom: z + t, width: w, compression: fy, tension: fy };
                z += t;
                b
            })
            .collect()
    }

    pub fn blocks(&self) -> Vec<StressBlock> {
        let mut v = vec![StressBlock {
            top: 0.0,
            bottom: self.deck_thickness,
            width: self.deck_width,
            compression: 0.85 * self.fc,
            tension: 0.0,
        }];
        v.extend(Self::steel_blocks(&self.girder, self.fy, self.deck_thickness + self.haunch));
        v
    }
}

/// Composite plastic moment in positive bending, kN·m.
pub fn composite_plastic_moment(section: &CompositeSectionSpec) -> Result<f64> {
    section.validate()?;
    Ok(plastic_moment(&section.blocks())?.0 / 1e6)
}

/// Plastic moment of the bare steel girder, kN·m.
pub fn steel_plastic_moment(girder: &GirderPlates, fy: f64) -> Result<f64> {
    positive(&[("fy", fy)])?;
    Ok(plastic_moment(&CompositeSectionSpec::steel_blocks(girder, fy, 0.0))?.0 / 1e6)
}

/// Midspan moment of a simple span per unit total load, mm (N·mm per N).
fn midspan_moment_per_load(patches: &[LoadPatch], span: f64) -> Result<f64> {
    positive(&[("span", span)])?;
    let mut m = 0.0;
    for p in patches {
        let a = p.center[0];
        if !(0.0..=span).contains(&a) {
            return Err(Error::InvalidInput(format!("load at x = {a} lies outside the span")));
        }
        m += p.share * 0.5 * a.min(span - a);
    }
    Ok(m)
}

/// Total applied load at which the midspan moment per girder, shared equally
/// between `girders`, reaches `mp`. Ignores any system interaction.
pub fn nominal_system_load(mp: f64, patches: &[LoadPatch], span: f64, girders: usize) -> Result<f64> {
    positive(&[("plastic moment", mp)])?;
    if girders == 0 {
        return Err(Error::InvalidInput("at least one girder is required".into()));
    }
    let m = midspan_moment_per_load(patches, span)?;
    if !(m > 0.0) {
        return Err(Error::InvalidInput("load layout produces no midspan moment".into()));
    }
    Ok(girders as f64 * mp * 1e6 / m / 1000.0)
}

/// Equivalent strip width for positive deck moment, mm.
pub fn strip_width(spacing: f64) -> f64 {
    660.0 + 0.55 * spacing
}

/// Total applied load at which the heaviest wheel, acting at mid-bay on a
/// simply supported transverse strip of the given spacing, develops the strip
/// moment capacity `mn` (kN·m/m) over the equivalent strip width.
pub fn strip_system_load(mn: f64, patches: &[LoadPatch], spacing: f64) -> Result<f64> {
    positive(&[("strip moment", mn), ("spacing", spacing)])?;
    let share = patches.iter().map(|p| p.share).fold(0.0, f64::max);
    if !(share > 0.0) {
        return Err(Error::InvalidInput("load layout carries no load".into()));
    }
    let capacity = mn * 1000.0 * strip_width(spacing);
    Ok(capacity / (share * spacing / 4.0) / 1000.0)
}

/// Inputs for the capacity checks of a bridge that are not part of its geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacitySpec {
    /// Effective depth for two-way shear, mm.
    pub shear_depth: f64,
    /// Bottom transverse reinforcement, mm²/mm.
    pub strip_area: f64,
    /// Effective depth of the bottom transverse reinforcement, mm.
    pub strip_depth: f64,
    /// Effective deck width per girder; defaults to the girder spacing.
    pub effective_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    /// Two-way shear resistance under one wheel patch, kN.
    pub punching_shear: f64,
    /// Total applied load at which the heaviest patch reaches `punching_shear`, kN.
    pub punching_limit: f64,
    /// Composite plastic moment per girder, kN·m.
    pub plastic_moment: f64,
    /// Total applied load at which the girders reach `plastic_moment`, kN.
    pub nominal_system_load: f64,
    /// Deck strip moment capacity, kN·m/m.
    pub strip_moment: f64,
    /// Total applied load at which the deck strip reaches `strip_moment`, kN.
    pub strip_system_load: f64,
    /// Resistance factor applied to the `factored_*` values, if requested.
    pub phi: Option<f64>,
    pub notes: Vec<String>,
}

impl CapacityReport {
    pub fn factored(&self, value: f64) -> Option<f64> {
        self.phi.map(|p| p * value)
    }
}

/// Element-level baselines for a bridge under a load layout.
pub fn capacity_report(
    cfg: &BridgeConfig,
    spec: &CapacitySpec,
    patches: &[LoadPatch],
    phi: Option<f64>,
) -> Result<CapacityReport> {
    cfg.validate()?;
    if let Some(p) = phi {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidInput(format!("resistance factor must be in (0, 1] (got {p})")));
        }
    }
    let first = patches.first().ok_or_else(|| Error::InvalidInput("no load patches".into()))?;
    let fc = cfg.concrete.fc;
    let punching = punching_shear_capacity(first.length, first.width, spec.shear_depth, fc)?;
    let heaviest = patches.iter().map(|p| p.share).fold(0.0, f64::max);
    let section = CompositeSectionSpec {
        girder: cfg.girder,
        fy: cfg.girder_steel.fy,
        deck_width: spec.effective_width.unwrap_or(cfg.spacing),
        deck_thickness: cfg.deck_thickness,
        fc,
        haunch: cfg.haunch,
    };
    let mp = composite_plastic_moment(&section)?;
    let strip = deck_strip_capacity(spec.strip_area, spec.strip_depth, cfg.rebar_steel.fy, fc)?;
    Ok(CapacityReport {
        punching_shear: punching,
        punching_limit: punching / heaviest,
        plastic_moment: mp,
        nominal_system_load: nominal_system_load(mp, patches, cfg.span, cfg.girders)?,
        strip_moment: strip,
        strip_system_load: strip_system_load(strip, patches, cfg.spacing)?,
        phi,
        notes: vec![
            "nominal capacities; resistance factors only in factored columns".into(),
            "system load from plastic moment assumes equal distribution to all girders at midspan".into(),
            "strip load assumes the heaviest wheel at mid-bay of a simply supported strip".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn punching_example() {
        let v = punching_shear_capacity(500.0, 200.0, 150.0, 25.0).unwrap();
        assert!(rel(v, 453.0) < 1e-12, "{v}");
        let square = punching_shear_capacity(300.0, 300.0, 150.0, 25.0).unwrap();
        let b0 = 4.0 * 450.0;
        assert!(rel(square, 0.33 * 5.0 * b0 * 150.0 / 1000.0) < 1e-12);
        assert!(punching_shear_capacity(500.0, 200.0, 300.0, 25.0).unwrap() > 2.0 * v);
        assert!(punching_shear_capacity(0.0, 200.0, 150.0, 25.0).is_err());
    }

    #[test]
    fn strip_example() {
        let m = deck_strip_capacity(1.0, 150.0, 420.0, 28.0).unwrap();
        let a = 420.0 / (0.85 * 28.0);
        assert!(rel(m, 420.0 * (150.0 - 0.5 * a) / 1000.0) < 1e-12);
        assert!((m - 59.3).abs() < 0.05);
        assert_eq!(deck_strip_capacity(0.0, 150.0, 420.0, 28.0).unwrap(), 0.0);
        let m2 = deck_strip_capacity(2.0, 150.0, 420.0, 28.0).unwrap();
        assert!(m2 < 2.0 * m && m2 > m);
        assert!(deck_strip_capacity(20.0, 150.0, 420.0, 28.0).is_err());
    }

    #[test]
    fn rectangle_plastic_moment() {
        let b = StressBlock { top: 0.0, bottom: 200.0, width: 100.0, compression: 250.0, tension: 250.0 };
        let (m, pna) = plastic_moment(&[b]).unwrap();
        assert!(rel(m / 1e6, 250.0) < 1e-9);
        assert!((pna - 100.0).abs() < 1e-6);
    }

    #[test]
    fn symmetric_i_shape_pna_at_mid_height() {
        let g = GirderPlates { top_flange: (200.0, 15.0), web: (500.0, 10.0), bottom_flange: (200.0, 15.0) };
        let (m, pna) = plastic_moment(&CompositeSectionSpec::steel_blocks(&g, 345.0, 0.0)).unwrap();
        assert!((pna - 265.0).abs() < 1e-6);
        let z = 200.0 * 15.0 * (265.0 - 7.5) * 2.0 + 10.0 * 250.0 * 125.0 * 2.0;
        assert!(rel(m, 345.0 * z) < 1e-9);
    }

    #[test]
    fn composite_exceeds_bare_steel() {
        let g = GirderPlates { top_flange: (180.0, 12.0), web: (560.0, 8.0), bottom_flange: (180.0, 16.0) };
        let s = CompositeSectionSpec { girder: g, fy: 345.0, deck_width: 1800.0, deck_thickness: 190.5, fc: 28.0, haunch: 25.0 };
        assert!(composite_plastic_moment(&s).unwrap() > steel_plastic_moment(&g, 345.0).unwrap());
    }

    #[test]
    fn system_load_statics() {
        let p = |x: f64, share: f64| LoadPatch { center: [x, 0.0], length: 1.0, width: 1.0, share };
        let l = 12000.0;
        let one = nominal_system_load(100.0, &[p(0.5 * l, 1.0)], l, 1).unwrap();
        assert!(rel(one, 4.0 * 100.0 / 12.0) < 1e-12);
        let two = nominal_system_load(100.0, &[p(l / 3.0, 0.5), p(2.0 * l / 3.0, 0.5)], l, 1).unwrap();
        assert!(rel(two, 6.0 * 100.0 / 12.0) < 1e-12);
        let five = nominal_system_load(100.0, &[p(0.5 * l, 1.0)], l, 5).unwrap();
        assert!(rel(five, 5.0 * one) < 1e-12);
        assert!(nominal_system_load(100.0, &[p(0.0, 1.0)], l, 1).is_err());
    }
}
