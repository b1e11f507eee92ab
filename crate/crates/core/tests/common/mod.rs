// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::path::PathBuf;

use railnet::io::parse_network;
use railnet::RailNetwork;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn fixture(name: &str) -> RailNetwork {
    parse_network(&fixture_text(&format!("{name}.railnet"))).unwrap()
}

pub const FIXTURES: [&str; 6] = [
    "theta",
    "yinyang",
    "dumbbell",
    "cross-ring",
    "cross-ring-split",
    "absorbing",
];
