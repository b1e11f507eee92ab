// SPDX-License-Identifier: Apache-2.0

//! Graphviz DOT export of a network or its double-track graph.

use std::fmt::Write as _;

use crate::classify::{track_class, ClassificationReport, TrackClass};
use crate::double_track::{DoubleTrackGraph, Role};
use crate::model::RailNetwork;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum View {
    /// Switches and tracks; cross tracks in bold red.
    Network,
    /// Converging and diverging vertices with directed arcs, coloured by
    /// component when there are two.
    DoubleTrack,
}

const BLOCK_COLOURS: [&str; 2] = ["#1f77b4", "#ff7f0e"];

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT text for `net`. Output depends only on the network and report.
pub fn export_dot(net: &RailNetwork, view: View, report: Option<&ClassificationReport>) -> String {
    let mut out = String::new();
    let w = &mut out;
    let ok = "writing to a string";
    match view {
        View::Network => {
            writeln!(w, "graph railnet {{").expect(ok);
            annotate(w, report);
            writeln!(w, "  node [shape=circle];").expect(ok);
            for name in net.names() {
                writeln!(w, "  {};", quote(name)).expect(ok);
            }
            for (id, t) in net.track_ids().zip(net.tracks()) {
                let class = track_class(t);
                let style = match class {
                    TrackClass::Cross => ", color=red, style=bold",
                    TrackClass::Parallel => "",
                };
                writeln!(
                    w,
                    "  {} -- {} [label=\"{id} {class}\", taillabel=\"{}\", headlabel=\"{}\"{style}];",
                    quote(net.name(t.a.switch)),
                    quote(net.name(t.b.switch)),
                    t.a.kind,
                    t.b.kind,
                )
                .expect(ok);
            }
        }
        View::DoubleTrack => {
            let graph = DoubleTrackGraph::new(net);
            let blocks = graph.components().ok().filter(|c| c.count() == 2);
            let colour = |v| blocks.as_ref().map(|b| BLOCK_COLOURS[b.block_of(v)]);
            writeln!(w, "digraph railnet {{").expect(ok);
            annotate(w, report);
            for v in graph.vertices() {
                let shape = match v.role {
                    Role::Converging => "circle",
                    Role::Diverging => "doublecircle",
                };
                let c = colour(v).map(|c| format!(", color=\"{c}\"")).unwrap_or_default();
                writeln!(w, "  {} [shape={shape}{c}];", quote(&v.label(net))).expect(ok);
            }
            for id in graph.arc_ids() {
                let arc = graph.arc(id);
                let c = colour(arc.tail).map(|c| format!(", color=\"{c}\"")).unwrap_or_default();
                writeln!(
                    w,
                    "  {} -> {} [label=\"{}\"{c}];",
                    quote(&arc.tail.label(net)),
                    quote(&arc.head.label(net)),
                    id,
                )
                .expect(ok);
            }
        }
    }
    out.push_str("}\n");
    out
}

fn annotate(w: &mut String, report: Option<&ClassificationReport>) {
    if let Some(r) = report {
        writeln!(w, "  label=\"{}\";\n  labelloc=t;", r.verdict).expect("writing to a string");
    }
}
