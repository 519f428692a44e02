//! Shipped model documents.

use crate::error::Result;
use crate::io::{parse_model_document, ModelDocument};

pub const REPRESENTATIVE_BRIDGE: &str = include_str!("../../../configs/representative_bridge.txt");
pub const OVERLAY_SLAB: &str = include_str!("../../../configs/overlay_slab.txt");

/// Five-girder representative bridge with delamination cases a to d.
pub fn representative_bridge() -> Result<ModelDocument> {
    parse_model_document(REPRESENTATIVE_BRIDGE)
}

/// Two-layer slab panel with bonded and unbonded interlayer cases.
pub fn overlay_slab() -> Result<ModelDocument> {
    parse_model_document(OVERLAY_SLAB)
}
