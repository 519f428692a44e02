//! Model-level checks on the shipped documents.

use deckfe_core::model::DOFS_PER_NODE;
use deckfe_core::presets::{overlay_slab, representative_bridge};
use deckfe_core::solver::{assemble, DofMap, Pushover};
use deckfe_core::study::{prepare, Prepared};
use deckfe_core::{parse_model_document, serialize_model_document, SolverSettings, SolverState, StopCause};

fn one_step(prepared: &Prepared, load: f64) -> deckfe_core::solver::PushoverOutcome {
    let settings = SolverSettings { initial_step: 1.0, min_step: 0.5, tolerance: 1e-8, ..SolverSettings::default() };
    let out = Pushover::new(&prepared.model, &prepared.shape, load, settings).run().unwrap();
    assert_eq!(out.record.stop, Some(StopCause::TargetReached));
    out
}

fn vertical_total(shape: &[f64]) -> f64 {
    shape.iter().skip(2).step_by(DOFS_PER_NODE).sum()
}

#[test]
fn patch_loads_conserve_the_total() {
    let mut doc = representative_bridge().unwrap();
    doc.symmetry.clear();
    let full = prepare(&doc, None, false).unwrap();
    let fz = vertical_total(&full.shape);
    assert!((fz.abs() - 1000.0).abs() <= 1e-9 * 1000.0, "{fz}");
    assert!(full.shape.iter().skip(2).step_by(DOFS_PER_NODE).all(|f| f * fz >= 0.0));
    for (i, f) in full.shape.iter().enumerate() {
        if i % DOFS_PER_NODE != 2 {
            assert_eq!(*f, 0.0);
        }
    }
    // The half model carries half of a symmetric layout.
    let half = prepare(&representative_bridge().unwrap(), None, false).unwrap();
    assert!((vertical_total(&half.shape).abs() - 500.0).abs() <= 1e-9 * 1000.0);
}

#[test]
fn elastic_tangent_is_symmetric() {
    for doc in [representative_bridge().unwrap(), overlay_slab().unwrap()] {
        for scenario in [None, doc.scenarios.first().map(|s| s.label.as_str())] {
            let p = prepare(&doc, scenario, false).unwrap();
            let dofs = DofMap::new(&p.model).unwrap();
            let state = SolverState::new(&p.model);
            let asm = assemble(&p.model, &dofs, &state.u, &state).unwrap();
            assert!(asm.max_asymmetry <= 1e-12, "{:?}: {}", scenario, asm.max_asymmetry);
        }
    }
}

#[test]
fn quarter_slab_matches_full_slab() {
    let doc = overlay_slab().unwrap();
    let mut full_doc = doc.clone();
    full_doc.symmetry.clear();
    let quarter = one_step(&prepare(&doc, None, false).unwrap(), 1.0).record.terminal();
    let full = one_step(&prepare(&full_doc, None, false).unwrap(), 1.0).record.terminal();
    let rel = (quarter.deck_deflection - full.deck_deflection).abs() / full.deck_deflection.abs();
    assert!(rel <= 1e-6, "{} vs {}", quarter.deck_deflection, full.deck_deflection);
}

#[test]
fn half_bridge_matches_full_bridge() {
    let doc = representative_bridge().unwrap();
    let mut full_doc = doc.clone();
    full_doc.symmetry.clear();
    let half = one_step(&prepare(&doc, Some("b"), false).unwrap(), 100.0).record.terminal();
    let full = one_step(&prepare(&full_doc, Some("b"), false).unwrap(), 100.0).record.terminal();
    for (a, b) in [(half.girder_deflection, full.girder_deflection), (half.deck_deflection, full.deck_deflection)] {
        assert!((a - b).abs() <= 1e-6 * b.abs(), "{a} vs {b}");
    }
}

#[test]
fn girder_compliance_adds_to_deck_deflection() {
    let doc = representative_bridge().unwrap();
    let full = one_step(&prepare(&doc, None, false).unwrap(), 100.0).record.terminal();
    let deck = one_step(&prepare(&doc, None, true).unwrap(), 100.0).record.terminal();
    assert!(deck.deck_deflection > 0.0);
    assert!(full.deck_deflection > deck.deck_deflection);
}

#[test]
fn elastic_response_scales_with_load() {
    let p = prepare(&overlay_slab().unwrap(), Some("unbonded"), false).unwrap();
    let a = one_step(&p, 0.5).record.terminal().deck_deflection;
    let b = one_step(&p, 1.0).record.terminal().deck_deflection;
    assert!((b - 2.0 * a).abs() <= 1e-3 * b, "{a} {b}");
}

#[test]
fn shipped_documents_round_trip() {
    for doc in [representative_bridge().unwrap(), overlay_slab().unwrap()] {
        let text = serialize_model_document(&doc);
        assert_eq!(parse_model_document(&text).unwrap(), doc);
    }
}

#[test]
fn checkpoint_survives_json_and_resumes_identically() {
    let doc = overlay_slab().unwrap();
    let p = prepare(&doc, Some("unbonded"), false).unwrap();
    let push = Pushover::new(&p.model, &p.shape, doc.loads.total, doc.solver.clone());
    let mut saved = None;
    let full = push
        .resume(push.start(), |cp| {
            if cp.record.points.len() == 6 {
                saved = Some(serde_json::to_string(cp).unwrap());
            }
        })
        .unwrap();
    let cp: deckfe_core::solver::Checkpoint = serde_json::from_str(&saved.unwrap()).unwrap();
    let again = push.resume(cp, |_| {}).unwrap();
    assert_eq!(again.record, full.record);
    assert_eq!(again.state, full.state);
}
