//! Model documents, result tables and charts.

pub mod chart;
pub mod document;
pub mod output;

pub use chart::{emit_chart, Curve};
pub use document::{parse_model_document, serialize_model_document, LoadLayout, LoadSpec, ModelDocument, Structure};
pub use output::{curve_csv, parse_curve_csv, sig6, to_json, CURVE_HEADER};
