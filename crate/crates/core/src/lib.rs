//! Nonlinear finite-element analysis of slab-on-girder bridge superstructures
//! with subsurface deck delamination.
//!
//! The deck is a layered Mindlin shell with smeared-crack concrete and smeared
//! reinforcement; girders are fiber beams tied to the deck by rigid links.
//! Delamination splits the deck at a fracture plane joined by compression-only
//! interface pairs. Pushovers run under load control with step bisection.

// `!(x > 0.0)` is used on purpose so NaN fails the check; index loops mirror
// the matrix notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod capacity;
pub mod contact;
pub mod damage;
pub mod elements;
pub mod error;
pub mod io;
pub mod materials;
pub mod metrics;
pub mod model;
pub mod presets;
pub mod solver;
pub mod study;

pub use capacity::{
    capacity_report, composite_plastic_moment, deck_strip_capacity, nominal_system_load, punching_shear_capacity,
    CapacityReport, CapacitySpec, CompositeSectionSpec,
};
pub use contact::{contact_update, pair_interface, BondPair, ContactStatus, InterfacePair};
pub use damage::{
    coverage_fraction, crack_width_from_radius_loss, delamination_risk, integrate_delamination,
    CorrosionCorrelation, DelaminationRisk, DelaminationScenario, InterfaceKind,
};
pub use error::{Error, Location, Result};
pub use io::{emit_chart, parse_model_document, serialize_model_document, Curve, ModelDocument, Structure};
pub use materials::{concrete_update, steel_update, ConcreteParams, ConcretePointState, SteelParams, SteelPointState};
pub use metrics::{
    compare_runs, detect_stages, ductility, reserve_capacity, transverse_profile, DistributionProfile,
    RunComparison, StageMarkers,
};
pub use model::{
    apply_symmetry_reduction, build_bridge_mesh, build_deck_only, build_slab_mesh, distribute_patch_loads,
    BridgeConfig, LoadPatch, Rect, SlabConfig, StructuralModel, SymmetryPlane,
};
pub use solver::{run_pushover, PushoverRecord, SolverSettings, SolverState, StopCause};

#[cfg(test)]
pub(crate) mod test_support {
    use crate::materials::{ConcreteParams, SteelParams};
    use crate::model::{
        build_bridge_mesh, BridgeConfig, GirderPlates, MeshDensity, RebarDirection, RebarSpec, StructuralModel,
    };

    pub fn small_bridge_config() -> BridgeConfig {
        BridgeConfig {
            span: 10000.0,
            girders: 2,
            spacing: 2000.0,
            deck_thickness: 200.0,
            overhang: 0.0,
            haunch: 25.0,
            girder: GirderPlates { top_flange: (200.0, 12.0), web: (600.0, 10.0), bottom_flange: (200.0, 16.0) },
            diaphragms: vec![5000.0],
            diaphragm_plate: (400.0, 10.0),
            mesh: MeshDensity { per_bay: 4, per_span: 10, layers: 6 },
            concrete: ConcreteParams::new(25000.0, 0.2, 28.0, 2.0, 0.0035).unwrap(),
            girder_steel: SteelParams::new(200000.0, 345.0, 2000.0).unwrap(),
            rebar_steel: SteelParams::new(200000.0, 420.0, 2000.0).unwrap(),
            reinforcement: vec![
                RebarSpec { depth: 50.0, area: 0.8, direction: RebarDirection::Transverse },
                RebarSpec { depth: 150.0, area: 1.0, direction: RebarDirection::Transverse },
                RebarSpec { depth: 140.0, area: 0.5, direction: RebarDirection::Longitudinal },
            ],
        }
    }

    /// Two girders, 4 x 10 deck mesh.
    pub fn small_bridge() -> StructuralModel {
        build_bridge_mesh(&small_bridge_config()).unwrap()
    }
}
