//! Post-processing of pushover records: behavioral stages, reserve capacity,
//! ductility, transverse distribution and run comparisons.

use serde::{Deserialize, Serialize};

use crate::elements::beam::{beam_resultants, section_stations};
use crate::elements::shell_stresses;
use crate::error::{Error, Result};
use crate::model::{BeamRole, StructuralModel, DOFS_PER_NODE, GEOM_TOL};
use crate::solver::{EventKind, PushoverRecord, RecordPoint, SolverState, StopCause};

/// Regularization of the arching indicator's denominator, MPa (1 kPa).
pub const ARCHING_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageMarkers {
    /// End of stage A: first deck crack, kN.
    pub first_crack: Option<f64>,
    /// End of stage B: first girder yield, kN.
    pub first_yield: Option<f64>,
    /// Stage C: a fully plastic girder section, kN.
    pub plastic_hinge: Option<f64>,
    /// Stage D: terminal load, kN.
    pub terminal: f64,
    pub cause: StopCause,
}

impl StageMarkers {
    /// A <= B <= C <= D over the markers that are present.
    pub fn is_ordered(&self) -> bool {
        let present: Vec<f64> = [self.first_crack, self.first_yield, self.plastic_hinge, Some(self.terminal)]
            .into_iter()
            .flatten()
            .collect();
        present.windows(2).all(|w| w[0] <= w[1])
    }
}

pub fn detect_stages(record: &PushoverRecord) -> Result<StageMarkers> {
    if record.points.len() < 2 {
        return Err(Error::InvalidInput("pushover record has no load steps".into()));
    }
    let cause = record.stop.ok_or_else(|| Error::InvalidInput("pushover record has not terminated".into()))?;
    let at = |k: EventKind| record.event(k).map(|e| e.load);
    Ok(StageMarkers {
        first_crack: at(EventKind::FirstCrack),
        first_yield: at(EventKind::FirstGirderYield),
        plastic_hinge: at(EventKind::PlasticHinge),
        terminal: record.terminal_load(),
        cause,
    })
}

/// Terminal load over an element-level baseline.
pub fn reserve_capacity(record: &PushoverRecord, baseline: f64) -> Result<f64> {
    if !(baseline > 0.0 && baseline.is_finite()) {
        return Err(Error::InvalidInput(format!("baseline must be > 0 (got {baseline})")));
    }
    Ok(record.terminal_load() / baseline)
}

/// Terminal girder deflection over the girder deflection at first yield.
pub fn ductility(record: &PushoverRecord, stages: &StageMarkers) -> Result<f64> {
    let Some(yield_load) = stages.first_yield else {
        return Err(Error::NotApplicable("no girder yield in this run".into()));
    };
    let point = record
        .points
        .iter()
        .find(|p| p.load >= yield_load)
        .ok_or_else(|| Error::InvalidInput("yield load is not on the record".into()))?;
    if !(point.girder_deflection > 0.0) {
        return Err(Error::NotApplicable("no girder deflection at first yield".into()));
    }
    Ok(record.terminal().girder_deflection / point.girder_deflection)
}

/// Deck stresses of one plan cell in the transverse section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileCell {
    /// Transverse position of the cell center, mm.
    pub y: f64,
    /// In-plane stresses `[sxx, syy, sxy]` at the outermost top point, MPa.
    pub top: [f64; 3],
    /// Same at the outermost bottom point of the deck column.
    pub bottom: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionProfile {
    pub x: f64,
    pub cells: Vec<ProfileCell>,
    /// Girder moments at the section, kN·m, in girder order.
    pub girder_moments: Vec<f64>,
    /// Moments normalized by their sum; all zero when the sum is zero.
    pub girder_shares: Vec<f64>,
    /// Mid-bay arching indicator per bay between adjacent girder lines, for
    /// the bays whose mid-line lies in the modeled plan.
    pub arching: Vec<f64>,
}

/// Most compressive and most tensile principal stress.
pub fn principal(s: [f64; 3]) -> (f64, f64) {
    let c = 0.5 * (s[0] + s[1]);
    let r = (0.25 * (s[0] - s[1]).powi(2) + s[2] * s[2]).sqrt();
    (c - r, c + r)
}

/// Ratio of mid-bay top-surface compression to bottom-surface tension.
///
/// Uses the principal stresses: the minimum principal stress at the top and
/// the maximum at the bottom, averaged over the cells adjacent to mid-bay.
pub fn arching_indicator(cells: &[&ProfileCell]) -> f64 {
    if cells.is_empty() {
        return 0.0;
    }
    let n = cells.len() as f64;
    let top = cells.iter().map(|c| principal(c.top).0).sum::<f64>() / n;
    let bottom = cells.iter().map(|c| principal(c.bottom).1).sum::<f64>() / n;
    (-top).max(0.0) / (bottom.max(0.0) + ARCHING_FLOOR)
}

fn averaged(stresses: &[[f64; 3]], layers: usize, layer: usize) -> [f64; 3] {
    let mut out = [0.0; 3];
    for gp in 0..4 {
        for k in 0..3 {
            out[k] += 0.25 * stresses[gp * layers + layer][k];
        }
    }
    out
}

/// Transverse stress traverse and girder moments at the section `x`.
pub fn transverse_profile(model: &StructuralModel, state: &SolverState, x: f64) -> Result<DistributionProfile> {
    let r = model.retained;
    if !(x >= r.x0 - GEOM_TOL && x <= r.x1 + GEOM_TOL) {
        return Err(Error::InvalidInput(format!("section x = {x} lies outside the modeled span [{}, {}]", r.x0, r.x1)));
    }
    if state.u.len() != model.dof_count() || state.shells.len() != model.shells.len() {
        return Err(Error::InvalidInput("state does not belong to this model".into()));
    }
    // One column per plan cell: the first cell whose x-range holds the section.
    let xs = model.mesh_lines(0);
    let column = xs
        .windows(2)
        .position(|w| x >= w[0] - GEOM_TOL && x <= w[1] + GEOM_TOL)
        .ok_or_else(|| Error::InvalidInput(format!("section x = {x} is not covered by the deck mesh")))?;
    let (cx0, cx1) = (xs[column], xs[column + 1]);
    let mut by_cell: Vec<(f64, Vec<usize>)> = Vec::new();
    for e in 0..model.shells.len() {
        let rect = model.shell_rect(e);
        if (rect.x0 - cx0).abs() > GEOM_TOL || (rect.x1 - cx1).abs() > GEOM_TOL {
            continue;
        }
        let y = 0.5 * (rect.y0 + rect.y1);
        match by_cell.iter_mut().find(|(cy, _)| (cy - y).abs() <= GEOM_TOL) {
            Some((_, v)) => v.push(e),
            None => by_cell.push((y, vec![e])),
        }
    }
    by_cell.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cells = Vec::with_capacity(by_cell.len());
    for (y, stack) in &by_cell {
        let z = |e: usize| model.shells[e].top + model.nodes[model.shells[e].nodes[0]].position[2];
        let upper = *stack.iter().max_by(|a, b| z(**a).total_cmp(&z(**b))).unwrap();
        let lower = *stack.iter().min_by(|a, b| z(**a).total_cmp(&z(**b))).unwrap();
        let eval = |e: usize, top: bool| -> Result<[f64; 3]> {
            let nodes = model.shells[e].nodes;
            let ue: Vec<f64> = nodes
                .iter()
                .flat_map(|n| state.u[n * DOFS_PER_NODE..(n + 1) * DOFS_PER_NODE].iter().copied())
                .collect();
            let (s, zs) = shell_stresses(model, e, &ue, &state.shells[e])?;
            let nl = zs.len();
            Ok(averaged(&s, nl, if top { nl - 1 } else { 0 }))
        };
        cells.push(ProfileCell { y: *y, top: eval(upper, true)?, bottom: eval(lower, false)? });
    }

    let mut girder_moments = Vec::new();
    let girders: usize = model
        .beams
        .iter()
        .filter_map(|b| match b.role {
            BeamRole::Girder(g) => Some(g + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let stations = section_stations();
    for g in 0..girders {
        let mut best: Option<(f64, f64)> = None;
        for (bi, b) in model.beams.iter().enumerate() {
            if b.role != BeamRole::Girder(g) {
                continue;
            }
            let [a, c] = b.nodes.map(|n| model.nodes[n].position);
            let ue: Vec<f64> = b
                .nodes
                .iter()
                .flat_map(|n| state.u[n * DOFS_PER_NODE..(n + 1) * DOFS_PER_NODE].iter().copied())
                .collect();
            let res = beam_resultants(model, bi, &ue, &state.beams[bi])?;
            for (k, s) in stations.iter().enumerate() {
                let sx = a[0] + s * (c[0] - a[0]);
                let zc = a[2] + s * (c[2] - a[2]) + b.offset[2];
                let d = (sx - x).abs();
                if best.is_none_or(|(bd, _)| d < bd) {
                    // Moment about the deck reference plane.
                    best = Some((d, (res[k][2] - res[k][0] * zc) / 1e6));
                }
            }
        }
        if let Some((_, m)) = best {
            girder_moments.push(m);
        }
    }
    let total: f64 = girder_moments.iter().sum();
    let girder_shares = if total.abs() > 0.0 {
        girder_moments.iter().map(|m| m / total).collect()
    } else {
        vec![0.0; girder_moments.len()]
    };

    // Bays whose mid-line falls outside a symmetry-reduced plan are left out.
    let mut arching = Vec::new();
    for w in model.girder_lines.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if mid < r.y0 - GEOM_TOL || mid > r.y1 + GEOM_TOL {
            continue;
        }
        let half_cell = by_cell
            .iter()
            .map(|(y, _)| (y - mid).abs())
            .fold(f64::INFINITY, f64::min);
        if !half_cell.is_finite() {
            continue;
        }
        let near: Vec<&ProfileCell> =
            cells.iter().filter(|c| ((c.y - mid).abs() - half_cell).abs() <= GEOM_TOL.max(1e-9 * mid)).collect();
        if !near.is_empty() {
            arching.push(arching_indicator(&near));
        }
    }
    Ok(DistributionProfile { x, cells, girder_moments, girder_shares, arching })
}

/// Signed differences of `other` relative to `reference`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunComparison {
    /// Terminal load difference, kN.
    pub ultimate_delta: f64,
    /// Terminal load difference relative to the reference, percent.
    pub ultimate_delta_pct: f64,
    /// Stage marker differences (crack, yield, hinge), kN, where both runs have them.
    pub stage_deltas: [Option<f64>; 3],
    pub ductility_delta: Option<f64>,
    /// RMS girder deflection difference over the common load range, mm.
    pub curve_rms: f64,
}

fn interpolate(points: &[RecordPoint], load: f64, deck: bool) -> f64 {
    let value = |p: &RecordPoint| if deck { p.deck_deflection } else { p.girder_deflection };
    for w in points.windows(2) {
        if load >= w[0].load && load <= w[1].load {
            let t = if w[1].load > w[0].load { (load - w[0].load) / (w[1].load - w[0].load) } else { 0.0 };
            return value(&w[0]) + t * (value(&w[1]) - value(&w[0]));
        }
    }
    value(points.last().unwrap())
}

pub fn compare_runs(reference: &PushoverRecord, other: &PushoverRecord) -> Result<RunComparison> {
    let a = detect_stages(reference)?;
    let b = detect_stages(other)?;
    let girder = |r: &PushoverRecord| r.points.iter().any(|p| p.girder_deflection != 0.0);
    let deck = |r: &PushoverRecord| r.points.iter().any(|p| p.deck_deflection != 0.0);
    if girder(reference) != girder(other) || deck(reference) != deck(other) {
        return Err(Error::InvalidInput("runs do not report the same monitoring points".into()));
    }
    let use_deck = !girder(reference);
    let diff = |x: Option<f64>, y: Option<f64>| x.zip(y).map(|(x, y)| y - x);
    let duct = |r: &PushoverRecord, s: &StageMarkers| ductility(r, s).ok();
    let common = a.terminal.min(b.terminal);
    const SAMPLES: usize = 50;
    let rms = if common > 0.0 {
        let sum: f64 = (1..=SAMPLES)
            .map(|k| {
                let l = common * k as f64 / SAMPLES as f64;
                (interpolate(&other.points, l, use_deck) - interpolate(&reference.points, l, use_deck)).powi(2)
            })
            .sum();
        (sum / SAMPLES as f64).sqrt()
    } else {
        0.0
    };
    Ok(RunComparison {
        ultimate_delta: b.terminal - a.terminal,
        ultimate_delta_pct: 100.0 * (b.terminal - a.terminal) / a.terminal,
        stage_deltas: [
            diff(a.first_crack, b.first_crack),
            diff(a.first_yield, b.first_yield),
            diff(a.plastic_hinge, b.plastic_hinge),
        ],
        ductility_delta: diff(duct(reference, &a), duct(other, &b)),
        curve_rms: rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Event;

    fn record(loads: &[f64], defl: &[f64], events: &[(usize, EventKind)], stop: StopCause) -> PushoverRecord {
        let points = loads
            .iter()
            .zip(defl)
            .enumerate()
            .map(|(i, (&load, &d))| RecordPoint {
                step: i,
                load,
                girder_deflection: d,
                deck_deflection: 1.5 * d,
                residual: 0.0,
                iterations: 1,
            })
            .collect();
        let events = events.iter().map(|&(step, kind)| Event { step, load: loads[step], kind }).collect();
        PushoverRecord { points, events, stop: Some(stop) }
    }

    fn fixture() -> PushoverRecord {
        record(
            &[0.0, 100.0, 300.0, 450.0, 500.0],
            &[0.0, 10.0, 60.0, 120.0, 180.0],
            &[(1, EventKind::FirstCrack), (2, EventKind::FirstGirderYield), (3, EventKind::PlasticHinge)],
            StopCause::StepUnderflow,
        )
    }

    #[test]
    fn stages_from_fixture() {
        let s = detect_stages(&fixture()).unwrap();
        assert_eq!(
            (s.first_crack, s.first_yield, s.plastic_hinge, s.terminal),
            (Some(100.0), Some(300.0), Some(450.0), 500.0)
        );
        assert!(s.is_ordered());
        let plain = record(&[0.0, 50.0], &[0.0, 1.0], &[], StopCause::TargetReached);
        let s = detect_stages(&plain).unwrap();
        assert_eq!((s.first_crack, s.first_yield, s.plastic_hinge), (None, None, None));
        assert_eq!(s.terminal, 50.0);
        let empty = PushoverRecord { points: fixture().points[..1].to_vec(), events: vec![], stop: None };
        assert!(detect_stages(&empty).is_err());
    }

    #[test]
    fn reserve_and_ductility() {
        let r = record(&[0.0, 100.0], &[0.0, 1.0], &[], StopCause::TargetReached);
        assert_eq!(reserve_capacity(&r, 80.0).unwrap(), 1.25);
        assert_eq!(reserve_capacity(&r, 100.0).unwrap(), 1.0);
        let f = fixture();
        assert_eq!(ductility(&f, &detect_stages(&f).unwrap()).unwrap(), 3.0);
        let at_yield = record(&[0.0, 300.0], &[0.0, 60.0], &[(1, EventKind::FirstGirderYield)], StopCause::StepUnderflow);
        assert_eq!(ductility(&at_yield, &detect_stages(&at_yield).unwrap()).unwrap(), 1.0);
        assert!(matches!(ductility(&r, &detect_stages(&r).unwrap()), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn comparison_deltas() {
        let a = fixture();
        let same = compare_runs(&a, &a).unwrap();
        assert_eq!(same.ultimate_delta, 0.0);
        assert_eq!(same.curve_rms, 0.0);
        assert_eq!(same.stage_deltas, [Some(0.0), Some(0.0), Some(0.0)]);
        let mut b = a.clone();
        b.points.last_mut().unwrap().load = 475.0;
        let c = compare_runs(&a, &b).unwrap();
        assert!((c.ultimate_delta_pct + 5.0).abs() < 1e-12);
        let mut no_girder = a.clone();
        no_girder.points.iter_mut().for_each(|p| p.girder_deflection = 0.0);
        assert!(compare_runs(&a, &no_girder).is_err());
    }

    #[test]
    fn arching_of_bending_pair() {
        let cell = ProfileCell { y: 0.0, top: [0.0, -2.0, 0.0], bottom: [0.0, 0.5, 0.0] };
        assert!((arching_indicator(&[&cell]) - 2.0 / 0.501).abs() < 1e-12);
        let zero = ProfileCell { y: 0.0, top: [0.0; 3], bottom: [0.0; 3] };
        assert_eq!(arching_indicator(&[&zero]), 0.0);
    }
}
