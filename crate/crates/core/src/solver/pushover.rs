use serde::{Deserialize, Serialize};

use super::assemble::SolverState;
use super::dofs::DofMap;
use super::newton::{solve_step, StepResult};
use super::SolverSettings;
use crate::error::{Error, Result};
use crate::model::{BeamRole, ShellRole, StructuralModel, DOFS_PER_NODE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopCause {
    TargetReached,
    NominalLimit,
    /// The step was bisected below the minimum without converging: the
    /// structure's capacity under load control.
    StepUnderflow,
    /// The run used up its step budget without reaching a terminal state.
    Divergence,
}

impl StopCause {
    pub fn label(&self) -> &'static str {
        match self {
            StopCause::TargetReached => "target reached",
            StopCause::NominalLimit => "nominal punching limit reached",
            StopCause::StepUnderflow => "step underflow (capacity)",
            StopCause::Divergence => "divergence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventKind {
    /// First cracked concrete point in the deck.
    FirstCrack,
    /// First yielded reinforcement point.
    FirstRebarYield,
    /// First yielded girder fiber.
    FirstGirderYield,
    /// Every fiber of some girder section yielded.
    PlasticHinge,
    /// First crushed concrete point.
    FirstCrush,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub step: usize,
    pub load: f64,
    pub kind: EventKind,
}

/// One accepted point of a pushover curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordPoint {
    pub step: usize,
    /// Applied load, kN (full-structure equivalent).
    pub load: f64,
    /// Downward deflection at the girder monitor, mm.
    pub girder_deflection: f64,
    /// Downward deflection at the deck monitor, mm.
    pub deck_deflection: f64,
    /// `|R| / |F|` at acceptance.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PushoverRecord {
    /// Starts with the unloaded state at step 0.
    pub points: Vec<RecordPoint>,
    pub events: Vec<Event>,
    pub stop: Option<StopCause>,
}

impl PushoverRecord {
    pub fn terminal(&self) -> RecordPoint {
        *self.points.last().expect("a record always holds the unloaded point")
    }

    pub fn terminal_load(&self) -> f64 {
        self.terminal().load
    }

    pub fn event(&self, kind: EventKind) -> Option<Event> {
        self.events.iter().find(|e| e.kind == kind).copied()
    }
}

/// Everything needed to continue a run from an accepted step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub state: SolverState,
    pub record: PushoverRecord,
    /// Load increment to try next, kN.
    pub increment: f64,
    /// Step attempts used so far, accepted or not.
    pub attempts: usize,
}

/// Load-controlled pushover with step bisection.
pub struct Pushover<'a> {
    pub model: &'a StructuralModel,
    /// Node-dof force vector per kN of total applied load.
    pub shape: &'a [f64],
    pub target: f64,
    pub settings: SolverSettings,
    /// Nominal load at which the run stops, kN.
    pub stop: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PushoverOutcome {
    pub record: PushoverRecord,
    pub state: SolverState,
}

impl<'a> Pushover<'a> {
    pub fn new(model: &'a StructuralModel, shape: &'a [f64], target: f64, settings: SolverSettings) -> Self {
        Self { model, shape, target, settings, stop: None }
    }

    pub fn with_stop(mut self, stop: Option<f64>) -> Self {
        self.stop = stop;
        self
    }

    fn validate(&self) -> Result<()> {
        self.settings.validate()?;
        if !(self.target > 0.0 && self.target.is_finite()) {
            return Err(Error::InvalidInput(format!("target load must be > 0 (got {})", self.target)));
        }
        if self.shape.len() != self.model.dof_count() {
            return Err(Error::InvalidInput("load vector length does not match the model".into()));
        }
        if self.shape.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidInput("load vector is zero".into()));
        }
        if let Some(s) = self.stop {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidInput(format!("stop limit must be > 0 (got {s})")));
            }
        }
        Ok(())
    }

    pub fn start(&self) -> Checkpoint {
        Checkpoint {
            state: SolverState::new(self.model),
            record: PushoverRecord {
                points: vec![RecordPoint {
                    step: 0,
                    load: 0.0,
                    girder_deflection: 0.0,
                    deck_deflection: 0.0,
                    residual: 0.0,
                    iterations: 0,
                }],
                events: Vec::new(),
                stop: None,
            },
            increment: self.settings.initial_step * self.target,
            attempts: 0,
        }
    }

    pub fn run(&self) -> Result<PushoverOutcome> {
        self.resume(self.start(), |_| {})
    }

    /// Continues from a checkpoint; `on_commit` sees every accepted step.
    pub fn resume(&self, mut cp: Checkpoint, mut on_commit: impl FnMut(&Checkpoint)) -> Result<PushoverOutcome> {
        self.validate()?;
        let dofs = DofMap::new(self.model)?;
        let unit = dofs.reduce(self.shape);
        let goal = match self.stop {
            Some(s) if s < self.target => s,
            _ => self.target,
        };
        let min_increment = self.settings.min_step * self.target;
        let max_increment = self.settings.initial_step * self.target;
        while cp.record.stop.is_none() {
            if cp.attempts >= self.settings.max_steps {
                cp.record.stop = Some(StopCause::Divergence);
                break;
            }
            let current = cp.record.terminal_load();
            let next = (current + cp.increment).min(goal);
            let external: Vec<f64> = unit.iter().map(|v| v * next).collect();
            cp.attempts += 1;
            match solve_step(self.model, &dofs, &cp.state, &external, &self.settings) {
                StepResult::Converged { state, iterations, residual } => {
                    cp.state = state;
                    let step = cp.record.points.len();
                    let point = RecordPoint {
                        step,
                        load: next,
                        girder_deflection: deflection(self.model.monitors.girder, &cp.state.u),
                        deck_deflection: deflection(self.model.monitors.deck, &cp.state.u),
                        residual,
                        iterations,
                    };
                    cp.record.points.push(point);
                    detect_events(self.model, &cp.state, &mut cp.record, step, next);
                    if self.settings.verbose {
                        eprintln!(
                            "step {step} load {next:.3} kN residual {residual:.2e} iterations {iterations} events {:?}",
                            cp.record.events.iter().filter(|e| e.step == step).map(|e| e.kind).collect::<Vec<_>>()
                        );
                    }
                    if next >= goal {
                        cp.record.stop =
                            Some(if goal < self.target { StopCause::NominalLimit } else { StopCause::TargetReached });
                    } else if iterations <= self.settings.max_iterations / 4 {
                        cp.increment = (2.0 * cp.increment).min(max_increment);
                    }
                    on_commit(&cp);
                }
                StepResult::Failed { reason, .. } => {
                    if self.settings.verbose {
                        eprintln!("step to {next:.3} kN failed ({reason}); bisecting");
                    }
                    cp.increment *= 0.5;
                    if cp.increment < min_increment * (1.0 - 1e-12) {
                        if cp.record.points.len() == 1 {
                            return Err(Error::Solver(format!(
                                "first load step did not converge ({reason}); check supports and loads"
                            )));
                        }
                        cp.record.stop = Some(StopCause::StepUnderflow);
                    }
                }
            }
        }
        Ok(PushoverOutcome { record: cp.record, state: cp.state })
    }
}

/// Runs a pushover from the unloaded state.
pub fn run_pushover(
    model: &StructuralModel,
    shape: &[f64],
    target: f64,
    settings: &SolverSettings,
    stop: Option<f64>,
) -> Result<PushoverOutcome> {
    Pushover::new(model, shape, target, settings.clone()).with_stop(stop).run()
}

fn deflection(node: Option<usize>, u: &[f64]) -> f64 {
    node.map(|n| -u[n * DOFS_PER_NODE + 2]).unwrap_or(0.0)
}

fn detect_events(model: &StructuralModel, state: &SolverState, record: &mut PushoverRecord, step: usize, load: f64) {
    let mut fire = |kind: EventKind, happened: bool| {
        if happened && record.event(kind).is_none() {
            record.events.push(Event { step, load, kind });
        }
    };
    let deck = |r: ShellRole| matches!(r, ShellRole::Deck | ShellRole::UpperSublayer | ShellRole::LowerSublayer);
    fire(
        EventKind::FirstCrack,
        model.shells.iter().zip(&state.shells).any(|(s, st)| deck(s.role) && st.cracked_points() > 0),
    );
    fire(EventKind::FirstRebarYield, state.shells.iter().any(|s| s.yielded_rebar_points() > 0));
    let girders = || {
        model
            .beams
            .iter()
            .zip(&state.beams)
            .filter(|(b, _)| matches!(b.role, BeamRole::Girder(_)))
            .map(|(_, s)| s)
    };
    fire(EventKind::FirstGirderYield, girders().any(|s| s.yielded_fibers() > 0));
    fire(EventKind::PlasticHinge, girders().any(|s| s.has_full_section_yield()));
    fire(EventKind::FirstCrush, state.shells.iter().any(|s| s.crushed_points() > 0));
}
