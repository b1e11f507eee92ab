// SPDX-License-Identifier: Apache-2.0

//! Analysis of toy-railroad networks built from Y-switches.
//!
//! A network ([`RailNetwork`]) pairs the three ends of every switch into
//! tracks. Trains never reverse, so movement lives on the
//! [`DoubleTrackGraph`]. A network is *one-way* when the tracks can be given
//! directions that every train respects, and *two-way* otherwise;
//! [`classify()`] decides this three independent ways and reports an
//! orientation or an odd witness cycle. [`journey`] simulates trains and
//! checks whether every track is reachable from every start,
//! [`randomgen`] samples and enumerates networks, and [`io`] reads and
//! writes network files and DOT.

pub mod classify;
pub mod double_track;
pub mod dsu;
pub mod exec;
pub mod io;
pub mod journey;
pub mod model;
pub mod randomgen;
pub mod walk;

pub use classify::{classify, ClassificationReport, Verdict};
pub use double_track::DoubleTrackGraph;
pub use exec::Execution;
pub use model::{EndKind, EndRef, RailNetwork, RawEnd, RawNetwork, SwitchId, Track, TrackId};
pub use walk::{Walk, WalkStep};
