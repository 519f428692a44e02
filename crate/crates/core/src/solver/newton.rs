use super::assemble::{assemble, SolverState};
use super::banded::LdlFactor;
use super::dofs::DofMap;
use super::SolverSettings;
use crate::model::StructuralModel;

/// Result of one load step.
#[derive(Debug, Clone)]
pub enum StepResult {
    Converged {
        state: SolverState,
        /// Linear solves performed.
        iterations: usize,
        /// `|R| / |F|` at acceptance.
        residual: f64,
    },
    /// No state is committed; the caller may retry with a smaller step.
    Failed { iterations: usize, reason: String },
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Newton-Raphson iteration from the committed state to equilibrium with the
/// equation-space external force `external`.
///
/// Material points and contact statuses are re-evaluated from the committed
/// history at every iterate, except that a concrete crack, once opened by an
/// iterate, stays open for the rest of the step: the stress drop at crack
/// onset would otherwise let a point flip between the two states forever.
/// Nothing is committed unless the step converges.
pub fn solve_step(
    model: &StructuralModel,
    dofs: &DofMap,
    committed: &SolverState,
    external: &[f64],
    settings: &SolverSettings,
) -> StepResult {
    let fnorm = norm(external).max(f64::MIN_POSITIVE);
    let mut u = committed.u.clone();
    let mut base = committed.clone();
    let mut asm = match assemble(model, dofs, &u, &base) {
        Ok(a) => a,
        Err(e) => return StepResult::Failed { iterations: 0, reason: e.to_string() },
    };
    let mut iterations = 0;
    loop {
        let r = residual(external, &asm.internal);
        let rel = norm(&r) / fnorm;
        if !rel.is_finite() {
            return StepResult::Failed { iterations, reason: "non-finite residual".into() };
        }
        if rel <= settings.tolerance && iterations > 0 {
            return StepResult::Converged { state: asm.trial, iterations, residual: rel };
        }
        if iterations >= settings.max_iterations {
            return StepResult::Failed { iterations, reason: format!("no convergence, residual {rel:.3e}") };
        }
        let factor = match LdlFactor::new(&asm.stiffness) {
            Ok(f) => f,
            Err(e) => return StepResult::Failed { iterations, reason: e.to_string() },
        };
        let du = match factor.solve(&r) {
            Ok(d) => dofs.expand(&d),
            Err(e) => return StepResult::Failed { iterations, reason: e.to_string() },
        };
        iterations += 1;
        // Backtrack along the Newton direction while the residual grows.
        let mut best: Option<(f64, Vec<f64>, _)> = None;
        let mut alpha = 1.0;
        for _ in 0..=LINE_SEARCH_CUTS {
            let trial: Vec<f64> = u.iter().zip(&du).map(|(a, d)| a + alpha * d).collect();
            let next = match assemble(model, dofs, &trial, &base) {
                Ok(a) => a,
                Err(e) => return StepResult::Failed { iterations, reason: e.to_string() },
            };
            let rn = norm(&residual(external, &next.internal)) / fnorm;
            let improved = best.as_ref().is_none_or(|(b, _, _)| rn < *b);
            if improved {
                best = Some((rn, trial, next));
            }
            if rn <= rel || !improved {
                break;
            }
            alpha *= 0.5;
        }
        let (_, trial, next) = best.expect("at least one line-search trial");
        u = trial;
        base.latch_cracks(model, &next.trial);
        asm = next;
    }
}

/// Halvings of the Newton step tried before accepting the best trial.
const LINE_SEARCH_CUTS: usize = 3;

fn residual(external: &[f64], internal: &[f64]) -> Vec<f64> {
    external.iter().zip(internal).map(|(f, i)| f - i).collect()
}
