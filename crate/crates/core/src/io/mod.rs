// SPDX-License-Identifier: Apache-2.0

//! Reading and writing networks, and DOT export.

mod dot;
mod format;

pub use dot::{export_dot, View};
pub use format::{
    parse_document, parse_network, serialize, serialize_json, NetworkDocument, ParseError, FORMAT_VERSION,
};
