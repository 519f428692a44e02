//! Runs described by a model document: building the model, the pushover and
//! the summary numbers reported for it.

use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{capacity_report, CapacityReport};
use crate::damage::{coverage_fraction, integrate_delamination};
use crate::error::{Error, Result};
use crate::io::{ModelDocument, Structure};
use crate::metrics::{compare_runs, detect_stages, ductility, reserve_capacity, RunComparison, StageMarkers};
use crate::model::{
    apply_symmetry_reduction, build_bridge_mesh, build_deck_only, build_slab_mesh, distribute_patch_loads,
    StructuralModel,
};
use crate::solver::{Pushover, PushoverRecord, SolverState};

/// A model ready for a pushover.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub model: StructuralModel,
    /// Nodal forces per kN of total load.
    pub shape: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Meshes the document's structure, then applies the scenario, the deck-only
/// extraction and the symmetry reduction, in that order.
pub fn prepare(doc: &ModelDocument, scenario: Option<&str>, deck_only: bool) -> Result<Prepared> {
    let mut model = match &doc.structure {
        Structure::Bridge(b) => build_bridge_mesh(b)?,
        Structure::Slab(s) => build_slab_mesh(s)?,
    };
    model.loads = doc.patches();
    let mut warnings = Vec::new();
    if let Some(label) = scenario {
        let out = integrate_delamination(&model, doc.scenario(label)?)?;
        model = out.model;
        warnings.extend(out.warnings);
    }
    if deck_only {
        model = build_deck_only(&model)?;
    }
    if !doc.symmetry.is_empty() {
        model = apply_symmetry_reduction(&model, &doc.symmetry)?;
    }
    let shape = distribute_patch_loads(&model, &model.loads, 1.0)?;
    Ok(Prepared { model, shape, warnings })
}

/// Nominal capacities of a bridge document, if it has a capacity block.
pub fn document_capacity(doc: &ModelDocument, phi: Option<f64>) -> Result<Option<CapacityReport>> {
    match (&doc.structure, &doc.capacity) {
        (Structure::Bridge(b), Some(spec)) => capacity_report(b, spec, &doc.patches(), phi).map(Some),
        _ => Ok(None),
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub label: String,
    pub prepared: Prepared,
    pub record: PushoverRecord,
    pub state: SolverState,
}

/// Builds and runs one case. Full bridges stop at the nominal punching limit
/// when the document asks for it; deck-only and slab runs go to capacity.
pub fn run_case(doc: &ModelDocument, scenario: Option<&str>, deck_only: bool) -> Result<RunResult> {
    let prepared = prepare(doc, scenario, deck_only)?;
    let stop = if doc.stop_at_punching && !deck_only {
        document_capacity(doc, None)?.map(|c| c.punching_limit)
    } else {
        None
    };
    let out = Pushover::new(&prepared.model, &prepared.shape, doc.loads.total, doc.solver.clone())
        .with_stop(stop)
        .run()?;
    Ok(RunResult {
        label: scenario.unwrap_or("intact").to_string(),
        prepared,
        record: out.record,
        state: out.state,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub deck_only: bool,
    pub stop_cause: String,
    pub terminal_load: f64,
    pub terminal_girder_deflection: f64,
    pub terminal_deck_deflection: f64,
    pub steps: usize,
    pub stages: StageMarkers,
    pub coverage: Option<f64>,
    pub reserve: Option<f64>,
    pub ductility: Option<f64>,
    pub capacity: Option<CapacityReport>,
    pub warnings: Vec<String>,
}

pub fn summarize(doc: &ModelDocument, run: &RunResult, deck_only: bool, phi: Option<f64>) -> Result<RunSummary> {
    let stages = detect_stages(&run.record)?;
    let capacity = document_capacity(doc, phi)?;
    let baseline = capacity.as_ref().map(|c| if deck_only { c.strip_system_load } else { c.nominal_system_load });
    let t = run.record.terminal();
    let coverage = match run.label.as_str() {
        "intact" => None,
        l => Some(coverage_fraction(doc.scenario(l)?, run.prepared.model.plan.area())),
    };
    Ok(RunSummary {
        label: run.label.clone(),
        deck_only,
        stop_cause: stages.cause.label().to_string(),
        terminal_load: t.load,
        terminal_girder_deflection: t.girder_deflection,
        terminal_deck_deflection: t.deck_deflection,
        steps: run.record.points.len() - 1,
        stages,
        coverage,
        reserve: baseline.map(|b| reserve_capacity(&run.record, b)).transpose()?,
        ductility: ductility(&run.record, &stages).ok(),
        capacity,
        warnings: run.prepared.warnings.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub intact: RunResult,
    /// Scenario runs sorted by label, each with its comparison to `intact`.
    pub cases: Vec<(RunResult, RunComparison)>,
}

/// Runs the intact case and every scenario of the document.
pub fn sweep(doc: &ModelDocument, deck_only: bool) -> Result<SweepResult> {
    if doc.scenarios.is_empty() {
        return Err(Error::InvalidInput("document has no damage scenarios to sweep".into()));
    }
    let mut labels: Vec<Option<&str>> = vec![None];
    let mut sorted: Vec<&str> = doc.scenarios.iter().map(|s| s.label.as_str()).collect();
    sorted.sort();
    labels.extend(sorted.into_iter().map(Some));
    let mut runs = labels
        .par_iter()
        .map(|l| run_case(doc, *l, deck_only))
        .collect::<Result<Vec<_>>>()?
        .into_iter();
    let intact = runs.next().expect("intact run");
    let cases = runs
        .map(|r| {
            let c = compare_runs(&intact.record, &r.record)?;
            Ok((r, c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { intact, cases })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub label: String,
    pub coverage: f64,
    pub stop_cause: String,
    pub terminal_load: f64,
    pub ultimate_delta_pct: f64,
    pub ductility: Option<f64>,
    pub ductility_delta: Option<f64>,
}

/// Comparison table: the intact baseline first, then one row per scenario.
pub fn sweep_table(doc: &ModelDocument, s: &SweepResult) -> Result<Vec<SweepRow>> {
    let area = s.intact.prepared.model.plan.area();
    let row = |r: &RunResult, coverage: f64, c: Option<&RunComparison>| -> Result<SweepRow> {
        let stages = detect_stages(&r.record)?;
        Ok(SweepRow {
            label: r.label.clone(),
            coverage,
            stop_cause: stages.cause.label().to_string(),
            terminal_load: r.record.terminal_load(),
            ultimate_delta_pct: c.map_or(0.0, |c| c.ultimate_delta_pct),
            ductility: ductility(&r.record, &stages).ok(),
            ductility_delta: c.and_then(|c| c.ductility_delta),
        })
    };
    let mut rows = vec![row(&s.intact, 0.0, None)?];
    for (r, c) in &s.cases {
        rows.push(row(r, coverage_fraction(doc.scenario(&r.label)?, area), Some(c))?);
    }
    Ok(rows)
}
