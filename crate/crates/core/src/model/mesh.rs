use super::{
    BeamElement, BeamRole, BridgeConfig, Fiber, FiberSection, GirderPlates, ModelKind, Monitors,
    Node, RebarLayer, RebarSpec, Rect, RigidLink, SectionKind, ShellElement, ShellRole,
    SlabConfig, SlabSupport, StructuralModel, Support, SupportKind, GEOM_TOL,
};
use crate::error::{Error, Result};

const ASPECT_LIMIT: f64 = 10.0;

/// Fibers of a welded I-shape with the origin at the top of the top flange
/// (z negative downward): 4x2 fibers per flange, 12 through the web.
pub fn i_section_fibers(g: &GirderPlates, steel: usize) -> Vec<Fiber> {
    let mut fibers = Vec::with_capacity(28);
    let mut plate = |width: f64, thick: f64, top: f64, nw: usize, nt: usize| {
        for i in 0..nw {
            for j in 0..nt {
                fibers.push(Fiber {
                    y: -0.5 * width + (i as f64 + 0.5) * width / nw as f64,
                    z: top - (j as f64 + 0.5) * thick / nt as f64,
                    area: width * thick / (nw * nt) as f64,
                    steel,
                });
            }
        }
    };
    let (bt, tt) = g.top_flange;
    let (dw, tw) = g.web;
    let (bb, tb) = g.bottom_flange;
    plate(bt, tt, 0.0, 4, 2);
    plate(tw, dw, -tt, 1, 12);
    plate(bb, tb, -tt - dw, 4, 2);
    fibers
}

fn plate_torsion(parts: &[(f64, f64)]) -> f64 {
    parts.iter().map(|(b, t)| b * t.powi(3) / 3.0).sum()
}

fn rebar_layers(specs: &[RebarSpec], steel: usize) -> Vec<RebarLayer> {
    specs
        .iter()
        .map(|r| RebarLayer { depth: r.depth, area: r.area, direction: r.direction, steel })
        .collect()
}

fn check_aspect(dx: f64, dy: f64) -> Result<()> {
    let ratio = (dx / dy).max(dy / dx);
    if ratio > ASPECT_LIMIT {
        return Err(Error::InvalidConfig(format!(
            "mesh density gives element aspect ratio {ratio:.2} > {ASPECT_LIMIT}"
        )));
    }
    Ok(())
}

/// Transverse mesh lines and the line index of each girder.
fn transverse_lines(cfg: &BridgeConfig) -> (Vec<f64>, Vec<usize>) {
    let bay_el = cfg.spacing / cfg.mesh.per_bay as f64;
    let n_over = if cfg.overhang > 0.0 { (cfg.overhang / bay_el - 1e-9).ceil().max(1.0) as usize } else { 0 };
    let mut ys = Vec::new();
    for k in 0..n_over {
        ys.push(k as f64 * cfg.overhang / n_over as f64);
    }
    let mut girder_idx = Vec::with_capacity(cfg.girders);
    for g in 0..cfg.girders {
        girder_idx.push(ys.len());
        ys.push(cfg.girder_line(g));
        if g + 1 < cfg.girders {
            for k in 1..cfg.mesh.per_bay {
                ys.push(cfg.girder_line(g) + k as f64 * bay_el);
            }
        }
    }
    let edge = cfg.girder_line(cfg.girders - 1);
    for k in 1..=n_over {
        ys.push(edge + k as f64 * cfg.overhang / n_over as f64);
    }
    (ys, girder_idx)
}

/// Meshes a simple-span slab-on-girder bridge.
///
/// Deck shells sit on the z = 0 reference plane; each girder is a line of
/// fiber beams whose nodes are rigidly linked to the deck nodes above them and
/// whose sections hang below the deck through the beam offset.
pub fn build_bridge_mesh(cfg: &BridgeConfig) -> Result<StructuralModel> {
    cfg.validate()?;
    let nx_el = cfg.mesh.per_span;
    let xs: Vec<f64> = (0..=nx_el).map(|i| cfg.span * i as f64 / nx_el as f64).collect();
    let (ys, girder_idx) = transverse_lines(cfg);
    let ny = ys.len();
    for w in ys.windows(2) {
        check_aspect(cfg.span / nx_el as f64, w[1] - w[0])?;
    }

    let deck_node = |i: usize, j: usize| i * ny + j;
    let mut nodes = Vec::new();
    for &x in &xs {
        for &y in &ys {
            nodes.push(Node { id: nodes.len(), position: [x, y, 0.0] });
        }
    }

    let rebars = rebar_layers(&cfg.reinforcement, 1);
    let half = 0.5 * cfg.deck_thickness;
    let mut shells = Vec::with_capacity(nx_el * (ny - 1));
    for i in 0..nx_el {
        for j in 0..ny - 1 {
            shells.push(ShellElement {
                nodes: [deck_node(i, j), deck_node(i + 1, j), deck_node(i + 1, j + 1), deck_node(i, j + 1)],
                thickness: cfg.deck_thickness,
                top: half,
                concrete: 0,
                rebars: rebars.clone(),
                layers: cfg.mesh.layers,
                role: ShellRole::Deck,
            });
        }
    }

    let g = &cfg.girder;
    let (girder_section, centroid) = FiberSection::centered(
        i_section_fibers(g, 0),
        plate_torsion(&[g.top_flange, (g.web.0, g.web.1), g.bottom_flange]),
        SectionKind::IShape,
    )?;
    let (dd, dt) = cfg.diaphragm_plate;
    let diaphragm_fibers: Vec<Fiber> = (0..10)
        .map(|k| Fiber { y: 0.0, z: -(k as f64 + 0.5) * dd / 10.0, area: dd * dt / 10.0, steel: 0 })
        .collect();
    let (diaphragm_section, dcentroid) =
        FiberSection::centered(diaphragm_fibers, dd * dt.powi(3) / 3.0, SectionKind::Plate)?;

    let flange_z = -half - cfg.haunch;
    let mut girder_node = vec![vec![0usize; xs.len()]; cfg.girders];
    let mut links = Vec::new();
    for (gi, &j) in girder_idx.iter().enumerate() {
        for (i, &x) in xs.iter().enumerate() {
            let id = nodes.len();
            nodes.push(Node { id, position: [x, ys[j], flange_z] });
            girder_node[gi][i] = id;
            links.push(RigidLink { master: deck_node(i, j), slave: id });
        }
    }

    let mut beams = Vec::new();
    for (gi, line) in girder_node.iter().enumerate() {
        for i in 0..nx_el {
            beams.push(BeamElement {
                nodes: [line[i], line[i + 1]],
                section: 0,
                offset: [0.0, 0.0, centroid[1]],
                role: BeamRole::Girder(gi),
            });
        }
    }
    let dx = cfg.span / nx_el as f64;
    for &station in &cfg.diaphragms {
        let i = (station / dx).round() as usize;
        if i == 0 || i >= nx_el {
            return Err(Error::InvalidConfig(format!("diaphragm at {station} snaps onto a support line")));
        }
        for gi in 0..cfg.girders - 1 {
            beams.push(BeamElement {
                nodes: [girder_node[gi][i], girder_node[gi + 1][i]],
                section: 1,
                offset: [0.0, 0.0, dcentroid[1] - g.top_flange.1],
                role: BeamRole::Diaphragm,
            });
        }
    }

    let mut supports = Vec::new();
    for (gi, &j) in girder_idx.iter().enumerate() {
        for (i, longitudinal) in [(0, true), (nx_el, false)] {
            let mut fixed = [false; 6];
            fixed[2] = true;
            fixed[0] = longitudinal;
            fixed[1] = longitudinal && gi == 0;
            supports.push(Support { node: deck_node(i, j), fixed, kind: SupportKind::Physical });
        }
    }

    let mid_i = nearest(&xs, 0.5 * cfg.span);
    let interior = if cfg.girders >= 3 { cfg.girders / 2 } else { 1 };
    let bay_center = 0.5 * (cfg.girder_line(interior) + cfg.girder_line(interior - 1));
    let monitors = Monitors {
        girder: Some(deck_node(mid_i, girder_idx[interior])),
        deck: Some(deck_node(mid_i, nearest(&ys, bay_center))),
    };

    let model = StructuralModel {
        kind: ModelKind::Bridge,
        nodes,
        shells,
        beams,
        sections: vec![girder_section, diaphragm_section],
        concretes: vec![cfg.concrete],
        steels: vec![cfg.girder_steel, cfg.rebar_steel],
        links,
        supports,
        contacts: Vec::new(),
        bonds: Vec::new(),
        loads: Vec::new(),
        damage: Vec::new(),
        plan: Rect::new(0.0, 0.0, cfg.span, *ys.last().unwrap()),
        retained: Rect::new(0.0, 0.0, cfg.span, *ys.last().unwrap()),
        symmetry: Vec::new(),
        girder_lines: (0..cfg.girders).map(|g| cfg.girder_line(g)).collect(),
        deck_thickness: cfg.deck_thickness,
        monitors,
    };
    model.validate()?;
    crate::solver::check_well_posed(&model)?;
    Ok(model)
}

fn nearest(v: &[f64], target: f64) -> usize {
    v.iter()
        .enumerate()
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Meshes a rectangular slab panel. Element counts must be even so the
/// panel center and both mid-lines fall on nodes.
pub fn build_slab_mesh(cfg: &SlabConfig) -> Result<StructuralModel> {
    cfg.validate()?;
    if !cfg.elements_x.is_multiple_of(2) || !cfg.elements_y.is_multiple_of(2) {
        return Err(Error::InvalidConfig("slab element counts must be even".into()));
    }
    let (nx, ny) = (cfg.elements_x + 1, cfg.elements_y + 1);
    let (dx, dy) = (cfg.span / cfg.elements_x as f64, cfg.width / cfg.elements_y as f64);
    check_aspect(dx, dy)?;
    let id = |i: usize, j: usize| i * ny + j;
    let mut nodes = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            nodes.push(Node { id: nodes.len(), position: [i as f64 * dx, j as f64 * dy, 0.0] });
        }
    }
    let rebars = rebar_layers(&cfg.reinforcement, 0);
    let mut shells = Vec::new();
    for i in 0..cfg.elements_x {
        for j in 0..cfg.elements_y {
            shells.push(ShellElement {
                nodes: [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)],
                thickness: cfg.thickness,
                top: 0.5 * cfg.thickness,
                concrete: 0,
                rebars: rebars.clone(),
                layers: cfg.layers,
                role: ShellRole::Deck,
            });
        }
    }
    let mut supports = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let on_x_edge = i == 0 || i == nx - 1;
            let on_y_edge = j == 0 || j == ny - 1;
            let vertical = match cfg.support {
                SlabSupport::TwoEdges => on_x_edge,
                SlabSupport::FourEdges => on_x_edge || on_y_edge,
            };
            if vertical {
                let mut fixed = [false; 6];
                fixed[2] = true;
                supports.push(Support { node: id(i, j), fixed, kind: SupportKind::Physical });
            }
        }
    }
    // In-plane rigid-body restraints placed on the mid-lines so they agree
    // with any later symmetry reduction.
    let (ci, cj) = (nx / 2, ny / 2);
    supports.push(Support {
        node: id(ci, cj),
        fixed: [true, true, false, false, false, false],
        kind: SupportKind::Physical,
    });
    supports.push(Support {
        node: id(ci, 0),
        fixed: [true, false, false, false, false, false],
        kind: SupportKind::Physical,
    });
    let plan = Rect::new(0.0, 0.0, cfg.span, cfg.width);
    let model = StructuralModel {
        kind: ModelKind::Slab,
        nodes,
        shells,
        beams: Vec::new(),
        sections: Vec::new(),
        concretes: vec![cfg.concrete],
        steels: vec![cfg.rebar_steel],
        links: Vec::new(),
        supports,
        contacts: Vec::new(),
        bonds: Vec::new(),
        loads: Vec::new(),
        damage: Vec::new(),
        plan,
        retained: plan,
        symmetry: Vec::new(),
        girder_lines: Vec::new(),
        deck_thickness: cfg.thickness,
        monitors: Monitors { girder: None, deck: Some(id(ci, cj)) },
    };
    model.validate()?;
    crate::solver::check_well_posed(&model)?;
    Ok(model)
}

/// Deck nodes lying on a girder line (plan position within tolerance).
pub(crate) fn on_line(y: f64, lines: &[f64]) -> bool {
    lines.iter().any(|l| (l - y).abs() <= GEOM_TOL)
}
