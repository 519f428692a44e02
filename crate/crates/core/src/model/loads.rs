use std::collections::BTreeMap;

use super::{LoadPatch, Rect, StructuralModel, DOFS_PER_NODE, GEOM_TOL};
use crate::error::{Error, Result};

/// HS-20 axle loads (front, drive, rear), kN, and axle spacing, mm.
const HS20_AXLES: [f64; 3] = [35.0, 145.0, 145.0];
const HS20_SPACING: f64 = 4300.0;
/// Tire contact patch: 200 mm along the span, 500 mm across.
pub const PATCH_LENGTH: f64 = 200.0;
pub const PATCH_WIDTH: f64 = 500.0;

/// Twelve wheel patches of two side-by-side HS-20 trucks.
///
/// `wheel_lines` holds the four transverse wheel positions (two per truck).
/// The trucks are placed for maximum midspan moment: the drive axle and the
/// axle-group resultant straddle midspan.
pub fn hs20_side_by_side(span: f64, wheel_lines: [f64; 4]) -> Vec<LoadPatch> {
    let total: f64 = 2.0 * HS20_AXLES.iter().sum::<f64>();
    let resultant_from_front =
        (HS20_AXLES[1] * HS20_SPACING + HS20_AXLES[2] * 2.0 * HS20_SPACING) / HS20_AXLES.iter().sum::<f64>();
    let drive = 0.5 * span - 0.5 * (resultant_from_front - HS20_SPACING);
    let stations = [drive - HS20_SPACING, drive, drive + HS20_SPACING];
    let mut patches = Vec::with_capacity(12);
    for (axle, &x) in stations.iter().enumerate() {
        for &y in &wheel_lines {
            patches.push(LoadPatch {
                center: [x, y],
                length: PATCH_LENGTH,
                width: PATCH_WIDTH,
                share: 0.5 * HS20_AXLES[axle] / total,
            });
        }
    }
    patches
}

/// Topmost shell of every plan cell (the loaded surface when a deck column is split).
pub(crate) fn top_surface_shells(model: &StructuralModel) -> Vec<usize> {
    let mut cells: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    for e in 0..model.shells.len() {
        let c = model.shell_centroid(e);
        let key = (c[0].to_bits(), c[1].to_bits());
        let top = model.shells[e].top + model.nodes[model.shells[e].nodes[0]].position[2];
        cells
            .entry(key)
            .and_modify(|cur| {
                let s = &model.shells[*cur];
                if top > s.top + model.nodes[s.nodes[0]].position[2] {
                    *cur = e;
                }
            })
            .or_insert(e);
    }
    cells.into_values().collect()
}

/// Integrals of the two linear hat functions of `[lo, hi]` over `[a, b]`.
fn hat_integrals(lo: f64, hi: f64, a: f64, b: f64) -> [f64; 2] {
    let len = hi - lo;
    let upper = ((b - lo).powi(2) - (a - lo).powi(2)) / (2.0 * len);
    [(b - a) - upper, upper]
}

/// Spreads patch pressures to the deck's top-surface nodes with the bilinear
/// shape functions (consistent lumping). Returns a full-length nodal force
/// vector in N; `total` is the full-structure load in kN.
///
/// Patches are described at full-structure scale, so on a symmetry-reduced
/// model only the retained portion is applied.
pub fn distribute_patch_loads(model: &StructuralModel, patches: &[LoadPatch], total: f64) -> Result<Vec<f64>> {
    if !total.is_finite() {
        return Err(Error::InvalidInput("total load must be finite".into()));
    }
    check_rectangular(model)?;
    if !patches.is_empty() {
        let shares: f64 = patches.iter().map(|p| p.share).sum();
        if (shares - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("patch shares sum to {shares}, not 1")));
        }
    }
    for (k, p) in patches.iter().enumerate() {
        if !(p.length > 0.0 && p.width > 0.0 && p.share >= 0.0) {
            return Err(Error::InvalidInput(format!("patch {k} has a non-positive size or negative share")));
        }
        if !model.plan.contains(&p.footprint(), GEOM_TOL) {
            return Err(Error::InvalidInput(format!(
                "patch {k} centered at ({}, {}) lies outside the deck plan",
                p.center[0], p.center[1]
            )));
        }
    }
    let mut f = vec![0.0; model.dof_count()];
    let newtons = total * 1000.0;
    let tops = top_surface_shells(model);
    for p in patches {
        let pressure = p.share * newtons / (p.length * p.width);
        let foot = p.footprint();
        for &e in &tops {
            let cell = model.shell_rect(e);
            let Some(hit) = cell.intersection(&foot) else { continue };
            let ix = hat_integrals(cell.x0, cell.x1, hit.x0, hit.x1);
            let iy = hat_integrals(cell.y0, cell.y1, hit.y0, hit.y1);
            for n in model.shells[e].nodes {
                let pos = model.nodes[n].position;
                let a = if (pos[0] - cell.x0).abs() <= GEOM_TOL { 0 } else { 1 };
                let b = if (pos[1] - cell.y0).abs() <= GEOM_TOL { 0 } else { 1 };
                f[n * DOFS_PER_NODE + 2] -= pressure * ix[a] * iy[b];
            }
        }
    }
    Ok(f)
}

/// Checks that every shell is an axis-aligned rectangle, which the exact
/// patch integration above relies on.
pub(crate) fn check_rectangular(model: &StructuralModel) -> Result<()> {
    for e in 0..model.shells.len() {
        let r: Rect = model.shell_rect(e);
        for n in model.shells[e].nodes {
            let p = model.nodes[n].position;
            let on_x = (p[0] - r.x0).abs() <= GEOM_TOL || (p[0] - r.x1).abs() <= GEOM_TOL;
            let on_y = (p[1] - r.y0).abs() <= GEOM_TOL || (p[1] - r.y1).abs() <= GEOM_TOL;
            if !(on_x && on_y) {
                return Err(Error::InvalidInput(format!("shell {e} is not an axis-aligned rectangle")));
            }
        }
    }
    Ok(())
}
