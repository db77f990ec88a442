//! Model dumps and DOT rendering.

mod dot;
mod json;

pub use dot::{to_dot, Color, LabelMode, RenderOptions};
pub use json::{from_json, to_json, ExportError, DUMP_VERSION};
