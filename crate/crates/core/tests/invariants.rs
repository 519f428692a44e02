//! Property tests of the material, contact, capacity and comparison kernels.

use proptest::prelude::*;

use deckfe_core::capacity::plastic_moment;
use deckfe_core::materials::SteelPointState;
use deckfe_core::model::GirderPlates;
use deckfe_core::solver::{PushoverRecord, RecordPoint};
use deckfe_core::{
    compare_runs, composite_plastic_moment, concrete_update, contact_update, steel_update, CompositeSectionSpec,
    ConcreteParams, ConcretePointState, InterfacePair, SteelParams, StopCause,
};

fn concrete() -> ConcreteParams {
    ConcreteParams { e: 25000.0, nu: 0.2, fc: 28.0, ft: 2.0, ecu: 0.0035, etu: 0.002, beta_shear: 0.2 }
}

/// Plastic moment from 2000 equal slices, balancing forces by bisection, kN·m.
fn sliced_moment(s: &CompositeSectionSpec) -> f64 {
    let g = s.girder;
    let steel_top = s.deck_thickness + s.haunch;
    let plates = [
        (steel_top, g.top_flange.1, g.top_flange.0),
        (steel_top + g.top_flange.1, g.web.0, g.web.1),
        (steel_top + g.top_flange.1 + g.web.0, g.bottom_flange.1, g.bottom_flange.0),
    ];
    let depth = plates[2].0 + plates[2].1;
    let n = 2000;
    let dz = depth / n as f64;
    let slices: Vec<(f64, f64, f64)> = (0..n)
        .map(|k| {
            let (lo, hi) = (k as f64 * dz, (k + 1) as f64 * dz);
            let overlap = |a: f64, b: f64| (hi.min(b) - lo.max(a)).max(0.0);
            let deck = overlap(0.0, s.deck_thickness) * s.deck_width * 0.85 * s.fc;
            let steel: f64 = plates.iter().map(|&(top, t, w)| overlap(top, top + t) * w * s.fy).sum();
            (0.5 * (lo + hi), deck + steel, steel)
        })
        .collect();
    let net = |pna: f64| -> f64 {
        slices.iter().map(|&(z, c, t)| if z < pna { c } else { -t }).sum()
    };
    let (mut lo, mut hi) = (0.0, depth);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if net(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let pna = 0.5 * (lo + hi);
    slices.iter().map(|&(z, c, t)| if z < pna { c * (pna - z) } else { t * (z - pna) }).sum::<f64>() / 1e6
}

fn record(loads: &[f64], stop: StopCause) -> PushoverRecord {
    let points = loads
        .iter()
        .enumerate()
        .map(|(i, &l)| RecordPoint {
            step: i,
            load: l,
            girder_deflection: 0.01 * l + 1e-5 * l * l,
            deck_deflection: 0.02 * l,
            residual: 0.0,
            iterations: 1,
        })
        .collect();
    PushoverRecord { points, events: vec![], stop: Some(stop) }
}

proptest! {
    #[test]
    fn steel_tangent_matches_difference(pre in -0.01f64..0.01, probe in -0.002f64..0.002) {
        let p = SteelParams::new(200000.0, 350.0, 2000.0).unwrap();
        let start = steel_update(pre, &SteelPointState::default(), &p).unwrap().state;
        let r = steel_update(probe, &start, &p).unwrap();
        let h = 1e-9;
        let up = steel_update(probe + h, &start, &p).unwrap();
        let dn = steel_update(probe - h, &start, &p).unwrap();
        prop_assume!(up.plastic == dn.plastic);
        let fd = (up.stress - dn.stress) / (2.0 * h);
        prop_assert!((fd - r.tangent).abs() <= 1e-3 * p.e);
    }

    #[test]
    fn steel_stress_stays_on_or_inside_the_surface(steps in prop::collection::vec(-0.004f64..0.004, 1..20)) {
        let p = SteelParams::new(200000.0, 350.0, 2000.0).unwrap();
        let mut s = SteelPointState::default();
        for de in steps {
            let r = steel_update(de, &s, &p).unwrap();
            prop_assert!(r.stress.abs() <= r.state.yield_stress(&p) * (1.0 + 1e-12));
            prop_assert!(r.state.equivalent_plastic_strain >= s.equivalent_plastic_strain);
            s = r.state;
        }
    }

    #[test]
    fn uncracked_concrete_tangent_matches_difference(
        exx in -6e-4f64..6e-5,
        eyy in -6e-4f64..6e-5,
        gxy in -5e-5f64..5e-5,
    ) {
        let p = concrete();
        let v = ConcretePointState::default();
        let r = concrete_update([exx, eyy, gxy], &v, &p).unwrap();
        prop_assume!(!r.state.is_cracked());
        let h = 1e-10;
        for j in 0..3 {
            let mut up = [exx, eyy, gxy];
            let mut dn = up;
            up[j] += h;
            dn[j] -= h;
            let su = concrete_update(up, &v, &p).unwrap();
            let sd = concrete_update(dn, &v, &p).unwrap();
            prop_assume!(!su.state.is_cracked() && !sd.state.is_cracked());
            for i in 0..3 {
                let fd = (su.stress[i] - sd.stress[i]) / (2.0 * h);
                prop_assert!((fd - r.tangent[i][j]).abs() <= 1e-3 * p.e, "d{i}/d{j}: {fd} vs {}", r.tangent[i][j]);
            }
        }
    }

    #[test]
    fn concrete_tension_never_exceeds_strength(e1 in 0.0f64..0.004, e2 in 0.0f64..0.004) {
        let p = concrete();
        let first = concrete_update([e1, 0.0, 0.0], &ConcretePointState::default(), &p).unwrap();
        let second = concrete_update([e2, 0.0, 0.0], &first.state, &p).unwrap();
        prop_assert!(first.stress[0] <= p.ft * (1.0 + 1e-12));
        prop_assert!(second.stress[0] <= p.ft * (1.0 + 1e-12));
        prop_assert!(second.stress[0] >= -1e-9);
    }

    #[test]
    fn contact_transmits_only_compression(
        r in prop::array::uniform3(-3.0f64..3.0),
        gap in 0.0f64..1.0,
        kn in 1e3f64..1e7,
    ) {
        let pair = InterfacePair::new(1, 0, [0.0, 0.0, 1.0], kn, gap).unwrap();
        let c = contact_update(r, &pair).unwrap();
        let closure = -r[2];
        if closure <= gap {
            prop_assert_eq!(c.normal_force, 0.0);
            prop_assert_eq!(c.force_on_upper, [0.0; 3]);
        } else {
            prop_assert!(c.normal_force < 0.0);
            prop_assert!((c.normal_force + kn * (closure - gap)).abs() <= 1e-9 * kn);
            // Pushes the upper node away along the normal, never sideways.
            prop_assert!(c.force_on_upper[2] > 0.0);
            prop_assert_eq!(c.force_on_upper[0], 0.0);
            prop_assert_eq!(c.force_on_upper[1], 0.0);
        }
    }

    #[test]
    fn composite_moment_matches_sliced_section(
        tf in (150.0f64..400.0, 10.0f64..30.0),
        web in (400.0f64..1500.0, 8.0f64..16.0),
        bf in (150.0f64..500.0, 12.0f64..40.0),
        fy in 250.0f64..450.0,
        width in 300.0f64..2500.0,
        thickness in 150.0f64..250.0,
        fc in 20.0f64..45.0,
        haunch in 0.0f64..60.0,
    ) {
        let s = CompositeSectionSpec {
            girder: GirderPlates { top_flange: tf, web, bottom_flange: bf },
            fy,
            deck_width: width,
            deck_thickness: thickness,
            fc,
            haunch,
        };
        let mp = composite_plastic_moment(&s).unwrap();
        let oracle = sliced_moment(&s);
        prop_assert!((mp - oracle).abs() <= 2e-3 * oracle, "{mp} vs {oracle}");
    }

    #[test]
    fn plastic_moment_balances_forces(blocks in prop::collection::vec((1.0f64..50.0, 10.0f64..500.0, 5.0f64..400.0), 2..6)) {
        let mut top = 0.0;
        let mut stack = Vec::new();
        for (t, w, f) in blocks {
            stack.push(deckfe_core::capacity::StressBlock { top, bottom: top + t, width: w, compression: f, tension: f });
            top += t;
        }
        let (m, pna) = plastic_moment(&stack).unwrap();
        prop_assert!(m > 0.0);
        let above: f64 = stack.iter().map(|b| b.width * b.compression * (pna.min(b.bottom) - b.top).max(0.0)).sum();
        let below: f64 = stack.iter().map(|b| b.width * b.tension * (b.bottom - pna.max(b.top)).max(0.0)).sum();
        prop_assert!((above - below).abs() <= 1e-6 * above.max(below));
    }

    #[test]
    fn comparison_is_antisymmetric(scale in 0.5f64..1.5) {
        let a = record(&[0.0, 100.0, 200.0, 300.0], StopCause::StepUnderflow);
        let b = record(&[0.0, 100.0 * scale, 200.0 * scale, 300.0 * scale], StopCause::StepUnderflow);
        let ab = compare_runs(&a, &b).unwrap();
        let ba = compare_runs(&b, &a).unwrap();
        prop_assert!((ab.ultimate_delta + ba.ultimate_delta).abs() <= 1e-9);
        prop_assert!((ab.curve_rms - ba.curve_rms).abs() <= 1e-9 * (1.0 + ab.curve_rms));
    }
}
