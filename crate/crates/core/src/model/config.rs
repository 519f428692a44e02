use serde::{Deserialize, Serialize};

use super::RebarDirection;
use crate::error::{Error, Result};
use crate::materials::{ConcreteParams, SteelParams};

/// Most through-thickness integration points a shell may use.
pub const MAX_LAYERS: usize = 32;

/// Plate dimensions `(width, thickness)` of a welded I-girder, mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GirderPlates {
    pub top_flange: (f64, f64),
    /// `(depth, thickness)`.
    pub web: (f64, f64),
    pub bottom_flange: (f64, f64),
}

impl GirderPlates {
    pub fn depth(&self) -> f64 {
        self.top_flange.1 + self.web.0 + self.bottom_flange.1
    }

    pub fn area(&self) -> f64 {
        self.top_flange.0 * self.top_flange.1
            + self.web.0 * self.web.1
            + self.bottom_flange.0 * self.bottom_flange.1
    }

    fn validate(&self) -> Result<()> {
        let all = [
            self.top_flange.0,
            self.top_flange.1,
            self.web.0,
            self.web.1,
            self.bottom_flange.0,
            self.bottom_flange.1,
        ];
        if all.iter().all(|v| *v > 0.0 && v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidConfig("girder plate dimensions must be > 0".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshDensity {
    pub per_bay: usize,
    pub per_span: usize,
    /// Through-thickness integration points per shell.
    pub layers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RebarSpec {
    /// Depth of the bar centroid below the deck top, mm.
    pub depth: f64,
    /// mm^2 per mm of width.
    pub area: f64,
    pub direction: RebarDirection,
}

/// Parametric simple-span slab-on-girder bridge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeConfig {
    pub span: f64,
    pub girders: usize,
    pub spacing: f64,
    pub deck_thickness: f64,
    /// Deck overhang beyond the exterior girders; zero puts the deck edge on them.
    pub overhang: f64,
    /// Gap between deck soffit and top flange, mm.
    pub haunch: f64,
    pub girder: GirderPlates,
    /// Longitudinal stations of cross-frames, mm.
    pub diaphragms: Vec<f64>,
    /// `(depth, thickness)` of the plate used for each diaphragm.
    pub diaphragm_plate: (f64, f64),
    pub mesh: MeshDensity,
    pub concrete: ConcreteParams,
    pub girder_steel: SteelParams,
    pub rebar_steel: SteelParams,
    pub reinforcement: Vec<RebarSpec>,
}

impl BridgeConfig {
    pub fn deck_width(&self) -> f64 {
        (self.girders.saturating_sub(1)) as f64 * self.spacing + 2.0 * self.overhang
    }

    pub fn girder_line(&self, g: usize) -> f64 {
        self.overhang + g as f64 * self.spacing
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.girders < 2 {
            return bad(format!("at least 2 girders are required (got {})", self.girders));
        }
        for (name, v) in [
            ("span", self.span),
            ("spacing", self.spacing),
            ("deck thickness", self.deck_thickness),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be > 0 (got {v})"));
            }
        }
        if !(self.overhang >= 0.0 && self.overhang.is_finite()) {
            return bad(format!("overhang must be >= 0 (got {})", self.overhang));
        }
        if !(self.haunch >= 0.0 && self.haunch.is_finite()) {
            return bad(format!("haunch must be >= 0 (got {})", self.haunch));
        }
        self.girder.validate()?;
        if !(self.diaphragm_plate.0 > 0.0 && self.diaphragm_plate.1 > 0.0) {
            return bad("diaphragm plate dimensions must be > 0".into());
        }
        if self.mesh.per_bay < 4 {
            return bad(format!("mesh needs at least 4 elements per bay (got {})", self.mesh.per_bay));
        }
        if self.mesh.per_span < 10 {
            return bad(format!("mesh needs at least 10 elements per span (got {})", self.mesh.per_span));
        }
        if !(4..=MAX_LAYERS).contains(&self.mesh.layers) {
            return bad(format!("shells need 4 to {MAX_LAYERS} integration layers (got {})", self.mesh.layers));
        }
        for d in &self.diaphragms {
            if !(*d > 0.0 && *d < self.span) {
                return bad(format!("diaphragm station {d} is outside the span"));
            }
        }
        for r in &self.reinforcement {
            if !(r.depth > 0.0 && r.depth < self.deck_thickness) || !(r.area > 0.0) {
                return bad(format!("reinforcement layer at depth {} is invalid", r.depth));
            }
        }
        self.concrete.validate()?;
        self.girder_steel.validate()?;
        self.rebar_steel.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlabSupport {
    /// Line supports along x = 0 and x = span.
    TwoEdges,
    FourEdges,
}

/// Rectangular slab panel with a central patch load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabConfig {
    /// Extent along x, mm.
    pub span: f64,
    /// Extent along y, mm.
    pub width: f64,
    pub thickness: f64,
    pub support: SlabSupport,
    pub elements_x: usize,
    pub elements_y: usize,
    pub layers: usize,
    pub concrete: ConcreteParams,
    pub rebar_steel: SteelParams,
    pub reinforcement: Vec<RebarSpec>,
}

impl SlabConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        for (name, v) in [("span", self.span), ("width", self.width), ("thickness", self.thickness)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be > 0 (got {v})"));
            }
        }
        if self.elements_x < 2 || self.elements_y < 2 {
            return bad("slab mesh needs at least 2 elements per direction".into());
        }
        if !(4..=MAX_LAYERS).contains(&self.layers) {
            return bad(format!("shells need 4 to {MAX_LAYERS} integration layers (got {})", self.layers));
        }
        for r in &self.reinforcement {
            if !(r.depth > 0.0 && r.depth < self.thickness) || !(r.area > 0.0) {
                return bad(format!("reinforcement layer at depth {} is invalid", r.depth));
            }
        }
        self.concrete.validate()?;
        self.rebar_steel.validate()?;
        Ok(())
    }
}
