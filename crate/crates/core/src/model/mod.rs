//! Discretized superstructure models and the transformations on them.
//!
//! Global axes: x along the span, y across the deck, z up. The deck reference
//! plane is z = 0 (deck mid-surface). Units are N, mm and MPa throughout.

mod config;
mod deck_only;
mod loads;
mod mesh;
mod symmetry;

use serde::{Deserialize, Serialize};

pub use config::{
    BridgeConfig, GirderPlates, MeshDensity, RebarSpec, SlabConfig, SlabSupport, MAX_LAYERS,
};
pub use deck_only::build_deck_only;
pub use loads::{distribute_patch_loads, hs20_side_by_side};
pub use mesh::{build_bridge_mesh, build_slab_mesh, i_section_fibers};
pub use symmetry::{apply_symmetry_reduction, SymmetryPlane};

use crate::contact::{BondPair, InterfacePair};
use crate::damage::DelaminationScenario;
use crate::error::{Error, Result};
use crate::materials::{ConcreteParams, SteelParams};

pub const DOFS_PER_NODE: usize = 6;
/// Geometric tolerance for coincidence tests, mm.
pub const GEOM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub position: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RebarDirection {
    /// Along x.
    Longitudinal,
    /// Along y.
    Transverse,
}

/// Smeared reinforcement layer inside a shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RebarLayer {
    /// Depth below the shell's top surface, mm.
    pub depth: f64,
    /// Area per unit width, mm^2/mm.
    pub area: f64,
    pub direction: RebarDirection,
    pub steel: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShellRole {
    Deck,
    /// Part of a split deck column above a fracture plane.
    UpperSublayer,
    LowerSublayer,
}

/// Four-node layered shell lying in a horizontal plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellElement {
    /// Counterclockwise in plan.
    pub nodes: [usize; 4],
    pub thickness: f64,
    /// Height of the top surface above the nodes' reference plane, mm.
    pub top: f64,
    pub concrete: usize,
    pub rebars: Vec<RebarLayer>,
    /// Through-thickness integration points (>= 4).
    pub layers: usize,
    pub role: ShellRole,
}

impl ShellElement {
    pub fn bottom(&self) -> f64 {
        self.top - self.thickness
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fiber {
    /// Lateral position relative to the section centroid, mm.
    pub y: f64,
    /// Vertical position relative to the section centroid, mm.
    pub z: f64,
    pub area: f64,
    pub steel: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectionKind {
    IShape,
    Plate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberSection {
    pub fibers: Vec<Fiber>,
    /// Saint-Venant torsion constant, mm^4.
    pub torsion_constant: f64,
    pub kind: SectionKind,
}

impl FiberSection {
    /// Builds a section and shifts the fibers so the origin is the area centroid.
    pub fn centered(mut fibers: Vec<Fiber>, torsion_constant: f64, kind: SectionKind) -> Result<(Self, [f64; 2])> {
        let area: f64 = fibers.iter().map(|f| f.area).sum();
        if !(area > 0.0) {
            return Err(Error::InvalidConfig("fiber section has no area".into()));
        }
        let cy = fibers.iter().map(|f| f.area * f.y).sum::<f64>() / area;
        let cz = fibers.iter().map(|f| f.area * f.z).sum::<f64>() / area;
        for f in &mut fibers {
            f.y -= cy;
            f.z -= cz;
        }
        let s = Self { fibers, torsion_constant, kind };
        s.validate()?;
        Ok((s, [cy, cz]))
    }

    pub fn area(&self) -> f64 {
        self.fibers.iter().map(|f| f.area).sum()
    }

    pub fn centroid(&self) -> [f64; 2] {
        let a = self.area();
        [
            self.fibers.iter().map(|f| f.area * f.y).sum::<f64>() / a,
            self.fibers.iter().map(|f| f.area * f.z).sum::<f64>() / a,
        ]
    }

    /// Second moment about the horizontal centroidal axis.
    pub fn inertia_strong(&self) -> f64 {
        let c = self.centroid();
        self.fibers.iter().map(|f| f.area * (f.z - c[1]).powi(2)).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.area() > 0.0) {
            return Err(Error::InvalidConfig("fiber section total area must be > 0".into()));
        }
        if self.kind == SectionKind::IShape && self.fibers.len() < 20 {
            return Err(Error::InvalidConfig(format!(
                "I-shape sections need at least 20 fibers (got {})",
                self.fibers.len()
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut s = self.clone();
        for f in &mut s.fibers {
            f.area *= factor;
        }
        s.torsion_constant *= factor;
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BeamRole {
    /// Longitudinal girder, by girder index.
    Girder(usize),
    Diaphragm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamElement {
    pub nodes: [usize; 2],
    pub section: usize,
    /// Rigid offset from the node line to the section centroid, mm.
    pub offset: [f64; 3],
    pub role: BeamRole,
}

/// Rigid kinematic link: the slave follows the master's rigid-body motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidLink {
    pub master: usize,
    pub slave: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupportKind {
    Physical,
    Symmetry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Support {
    pub node: usize,
    /// Restrained components `[ux, uy, uz, rx, ry, rz]`.
    pub fixed: [bool; 6],
    pub kind: SupportKind,
}

/// Axis-aligned rectangle in plan, mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0: x0.min(x1), y0: y0.min(y1), x1: x0.max(x1), y1: y0.max(y1) }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn contains_point(&self, x: f64, y: f64, tol: f64) -> bool {
        x >= self.x0 - tol && x <= self.x1 + tol && y >= self.y0 - tol && y <= self.y1 + tol
    }

    pub fn contains(&self, other: &Rect, tol: f64) -> bool {
        other.x0 >= self.x0 - tol
            && other.x1 <= self.x1 + tol
            && other.y0 >= self.y0 - tol
            && other.y1 <= self.y1 + tol
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let r = Rect {
            x0: self.x0.max(other.x0),
            y0: self.y0.max(other.y0),
            x1: self.x1.min(other.x1),
            y1: self.y1.min(other.y1),
        };
        (r.x1 > r.x0 && r.y1 > r.y0).then_some(r)
    }
}

/// Rectangular patch load on the deck top surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadPatch {
    pub center: [f64; 2],
    /// Extent along x, mm.
    pub length: f64,
    /// Extent along y, mm.
    pub width: f64,
    /// Fraction of the total applied load.
    pub share: f64,
}

impl LoadPatch {
    pub fn footprint(&self) -> Rect {
        Rect::new(
            self.center[0] - 0.5 * self.length,
            self.center[1] - 0.5 * self.width,
            self.center[0] + 0.5 * self.length,
            self.center[1] + 0.5 * self.width,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    Bridge,
    DeckOnly,
    Slab,
}

/// Nodes whose vertical displacement is reported along a pushover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Monitors {
    /// Interior girder at midspan (deck node above it).
    pub girder: Option<usize>,
    /// Deck bottom surface at mid-bay, midspan.
    pub deck: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralModel {
    pub kind: ModelKind,
    pub nodes: Vec<Node>,
    pub shells: Vec<ShellElement>,
    pub beams: Vec<BeamElement>,
    pub sections: Vec<FiberSection>,
    pub concretes: Vec<ConcreteParams>,
    pub steels: Vec<SteelParams>,
    pub links: Vec<RigidLink>,
    pub supports: Vec<Support>,
    pub contacts: Vec<InterfacePair>,
    pub bonds: Vec<BondPair>,
    pub loads: Vec<LoadPatch>,
    pub damage: Vec<DelaminationScenario>,
    /// Full-structure deck plan.
    pub plan: Rect,
    /// Part of the plan present in this model (smaller after symmetry reduction).
    pub retained: Rect,
    pub symmetry: Vec<SymmetryPlane>,
    /// Transverse positions of girder lines, mm.
    pub girder_lines: Vec<f64>,
    pub deck_thickness: f64,
    pub monitors: Monitors,
}

impl StructuralModel {
    pub fn dof_count(&self) -> usize {
        self.nodes.len() * DOFS_PER_NODE
    }

    /// Plan-cell rectangle of a shell (its nodes' bounding box).
    pub fn shell_rect(&self, e: usize) -> Rect {
        let s = &self.shells[e];
        let xs = s.nodes.map(|n| self.nodes[n].position[0]);
        let ys = s.nodes.map(|n| self.nodes[n].position[1]);
        Rect::new(
            xs.iter().cloned().fold(f64::INFINITY, f64::min),
            ys.iter().cloned().fold(f64::INFINITY, f64::min),
            xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    pub fn shell_centroid(&self, e: usize) -> [f64; 2] {
        let s = &self.shells[e];
        let mut c = [0.0; 2];
        for n in s.nodes {
            c[0] += 0.25 * self.nodes[n].position[0];
            c[1] += 0.25 * self.nodes[n].position[1];
        }
        c
    }

    /// Area of a shell in plan (shoelace).
    pub fn shell_area(&self, e: usize) -> f64 {
        let p = self.shells[e].nodes.map(|n| self.nodes[n].position);
        0.5 * (0..4)
            .map(|i| {
                let j = (i + 1) % 4;
                p[i][0] * p[j][1] - p[j][0] * p[i][1]
            })
            .sum::<f64>()
    }

    pub fn has_girders(&self) -> bool {
        self.beams.iter().any(|b| matches!(b.role, BeamRole::Girder(_)))
    }

    /// Sorted distinct coordinates of shell nodes along one axis.
    pub fn mesh_lines(&self, axis: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .shells
            .iter()
            .flat_map(|s| s.nodes)
            .map(|n| self.nodes[n].position[axis])
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= GEOM_TOL);
        v
    }

    pub fn fixed_dofs(&self, node: usize) -> [bool; 6] {
        let mut out = [false; 6];
        for s in self.supports.iter().filter(|s| s.node == node) {
            for k in 0..6 {
                out[k] |= s.fixed[k];
            }
        }
        out
    }

    /// Structural consistency checks that do not need the solver.
    pub fn validate(&self) -> Result<()> {
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id != i {
                return Err(Error::InvalidConfig(format!("node ids must be dense; found {} at {i}", n.id)));
            }
            if !n.position.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidConfig(format!("node {i} has a non-finite position")));
            }
        }
        let nn = self.nodes.len();
        let check_node = |n: usize, what: &str| {
            if n < nn {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{what} references missing node {n}")))
            }
        };
        for (e, s) in self.shells.iter().enumerate() {
            for n in s.nodes {
                check_node(n, &format!("shell {e}"))?;
            }
            if !(s.thickness > 0.0) {
                return Err(Error::InvalidConfig(format!("shell {e} thickness must be > 0")));
            }
            if !(4..=MAX_LAYERS).contains(&s.layers) {
                return Err(Error::InvalidConfig(format!("shell {e} needs 4 to {MAX_LAYERS} integration layers")));
            }
            if s.concrete >= self.concretes.len() {
                return Err(Error::InvalidConfig(format!("shell {e} references missing concrete {}", s.concrete)));
            }
            for r in &s.rebars {
                if !(r.depth > 0.0 && r.depth < s.thickness) {
                    return Err(Error::InvalidConfig(format!(
                        "shell {e}: reinforcement depth {} outside (0, {})",
                        r.depth, s.thickness
                    )));
                }
                if r.steel >= self.steels.len() || !(r.area >= 0.0) {
                    return Err(Error::InvalidConfig(format!("shell {e}: invalid reinforcement layer")));
                }
            }
            crate::elements::shell::check_jacobian(self, e)?;
        }
        for (e, b) in self.beams.iter().enumerate() {
            for n in b.nodes {
                check_node(n, &format!("beam {e}"))?;
            }
            let [a, c] = b.nodes.map(|n| self.nodes[n].position);
            let len = ((c[0] - a[0]).powi(2) + (c[1] - a[1]).powi(2) + (c[2] - a[2]).powi(2)).sqrt();
            if len <= GEOM_TOL {
                return Err(Error::InvalidConfig(format!("beam {e} has zero length")));
            }
            let sec = self
                .sections
                .get(b.section)
                .ok_or_else(|| Error::InvalidConfig(format!("beam {e} references missing section")))?;
            sec.validate()?;
            if sec.fibers.iter().any(|f| f.steel >= self.steels.len()) {
                return Err(Error::InvalidConfig(format!("beam {e}: fiber references missing steel")));
            }
        }
        let mut is_slave = vec![false; nn];
        for l in &self.links {
            check_node(l.master, "rigid link")?;
            check_node(l.slave, "rigid link")?;
            if is_slave[l.slave] {
                return Err(Error::InvalidConfig(format!("node {} is slaved twice", l.slave)));
            }
            is_slave[l.slave] = true;
        }
        for l in &self.links {
            if is_slave[l.master] {
                return Err(Error::InvalidConfig(format!("link master {} is itself a slave", l.master)));
            }
        }
        for s in &self.supports {
            check_node(s.node, "support")?;
            if is_slave[s.node] {
                return Err(Error::InvalidConfig(format!("support on slaved node {}", s.node)));
            }
        }
        for c in &self.contacts {
            check_node(c.upper, "interface pair")?;
            check_node(c.lower, "interface pair")?;
            c.validate()?;
        }
        for b in &self.bonds {
            check_node(b.upper, "bond pair")?;
            check_node(b.lower, "bond pair")?;
        }
        let mut used = vec![false; nn];
        self.shells.iter().flat_map(|s| s.nodes).for_each(|n| used[n] = true);
        self.beams.iter().flat_map(|b| b.nodes).for_each(|n| used[n] = true);
        self.links.iter().for_each(|l| {
            used[l.master] = true;
            used[l.slave] = true;
        });
        if let Some(orphan) = used.iter().position(|u| !u) {
            return Err(Error::InvalidConfig(format!("node {orphan} is not connected to any element")));
        }
        Ok(())
    }

    /// Drops unused nodes and renumbers the rest densely, preserving order.
    pub(crate) fn compact_nodes(&mut self, keep: &[bool]) {
        let mut map = vec![usize::MAX; self.nodes.len()];
        let mut next = 0;
        for (i, k) in keep.iter().enumerate() {
            if *k {
                map[i] = next;
                next += 1;
            }
        }
        self.nodes = self
            .nodes
            .iter()
            .filter(|n| keep[n.id])
            .map(|n| Node { id: map[n.id], position: n.position })
            .collect();
        for s in &mut self.shells {
            s.nodes = s.nodes.map(|n| map[n]);
        }
        for b in &mut self.beams {
            b.nodes = b.nodes.map(|n| map[n]);
        }
        for l in &mut self.links {
            l.master = map[l.master];
            l.slave = map[l.slave];
        }
        self.supports.retain(|s| keep[s.node]);
        for s in &mut self.supports {
            s.node = map[s.node];
        }
        self.contacts.retain(|c| keep[c.upper] && keep[c.lower]);
        for c in &mut self.contacts {
            c.upper = map[c.upper];
            c.lower = map[c.lower];
        }
        self.bonds.retain(|c| keep[c.upper] && keep[c.lower]);
        for c in &mut self.bonds {
            c.upper = map[c.upper];
            c.lower = map[c.lower];
        }
        let remap = |m: Option<usize>| m.and_then(|n| (keep[n]).then(|| map[n]));
        self.monitors.girder = remap(self.monitors.girder);
        self.monitors.deck = remap(self.monitors.deck);
    }
}
