//! Assembly, Newton iteration and load-controlled pushover.

mod assemble;
mod banded;
mod dofs;
mod newton;
mod pushover;

use serde::{Deserialize, Serialize};

pub use assemble::{assemble, Assembly, SolverState};
pub use banded::{BandedMatrix, Inertia, LdlFactor};
pub use dofs::DofMap;
pub use newton::{solve_step, StepResult};
pub use pushover::{
    run_pushover, Checkpoint, Event, EventKind, Pushover, PushoverOutcome, PushoverRecord, RecordPoint, StopCause,
};

use crate::error::{Error, Result};
use crate::model::StructuralModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// First load increment as a fraction of the target load.
    pub initial_step: f64,
    /// Relative force tolerance `|R| <= tol * |F|`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Smallest increment, as a fraction of the target, before the run is
    /// declared at capacity.
    pub min_step: f64,
    /// Budget of step attempts (accepted or bisected).
    pub max_steps: usize,
    /// Print one progress line per accepted step on stderr.
    pub verbose: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            tolerance: 1e-3,
            max_iterations: 25,
            min_step: 1.0 / 1024.0,
            max_steps: 2000,
            verbose: false,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_step > 0.0 && self.min_step < self.initial_step && self.initial_step <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "solver steps need 0 < min step ({}) < initial step ({}) <= 1",
                self.min_step, self.initial_step
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 0.1) {
            return Err(Error::InvalidConfig(format!("tolerance must lie in (0, 0.1) (got {})", self.tolerance)));
        }
        if self.max_iterations == 0 || self.max_steps == 0 {
            return Err(Error::InvalidConfig("iteration and step limits must be > 0".into()));
        }
        Ok(())
    }
}

/// Number of zero-energy modes of the constrained elastic stiffness
/// (zero pivots of its LDL^T factorization), plus negative pivots, which an
/// elastic structure must not have either.
pub fn zero_energy_modes(model: &StructuralModel) -> Result<Inertia> {
    let dofs = DofMap::new(model)?;
    let state = SolverState::new(model);
    let asm = assemble(model, &dofs, &state.u, &state)?;
    Ok(LdlFactor::new(&asm.stiffness)?.inertia)
}

/// Rejects models whose constrained elastic stiffness is not positive definite.
pub fn check_well_posed(model: &StructuralModel) -> Result<()> {
    let inertia = zero_energy_modes(model)?;
    if inertia.zero > 0 || inertia.negative > 0 {
        return Err(Error::InvalidConfig(format!(
            "model has {} zero-energy modes after constraints ({} negative pivots)",
            inertia.zero, inertia.negative
        )));
    }
    Ok(())
}
