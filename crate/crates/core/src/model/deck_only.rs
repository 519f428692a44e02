use std::collections::HashSet;

use super::{mesh::on_line, ModelKind, ShellRole, StructuralModel, Support, SupportKind};
use crate::error::{Error, Result};

/// Removes the girders and their links and supports the deck vertically at
/// every deck node on a girder line, along the full length.
pub fn build_deck_only(model: &StructuralModel) -> Result<StructuralModel> {
    if !model.has_girders() {
        return Err(Error::InvalidInput("deck-only extraction needs a model with girders".into()));
    }
    let mut m = model.clone();
    m.beams.clear();
    m.links.clear();
    m.kind = ModelKind::DeckOnly;

    let mut keep = vec![false; m.nodes.len()];
    m.shells.iter().flat_map(|s| s.nodes).for_each(|n| keep[n] = true);
    // Duplicated nodes above a fracture plane are not seated on the girder.
    let seated: HashSet<usize> = m
        .shells
        .iter()
        .filter(|s| s.role != ShellRole::UpperSublayer)
        .flat_map(|s| s.nodes)
        .collect();
    for n in 0..m.nodes.len() {
        if !seated.contains(&n) || !on_line(m.nodes[n].position[1], &m.girder_lines) {
            continue;
        }
        if m.fixed_dofs(n)[2] {
            continue;
        }
        let mut fixed = [false; 6];
        fixed[2] = true;
        m.supports.push(Support { node: n, fixed, kind: SupportKind::Physical });
    }
    m.monitors.girder = None;
    m.compact_nodes(&keep);
    m.validate()?;
    Ok(m)
}
