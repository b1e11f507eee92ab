// SPDX-License-Identifier: Apache-2.0

//! One-way / two-way classification.
//!
//! Three independent deciders are provided and must agree:
//!
//! * [`classify_by_components`]: the double-track graph splits into two
//!   components exactly when the network is one-way.
//! * [`classify_by_parity`]: a network is one-way exactly when no cycle uses
//!   an odd number of cross tracks. Checked with a parity union-find over
//!   switches; a conflict yields a witness cycle.
//! * [`classify_by_angles`]: the same question asked about angles (transits
//!   entering and leaving a switch through its two branch ends). Checked
//!   with a parity union-find over end states, never looking at track
//!   classes.
//!
//! [`oracle_enumerate`] is the exhaustive reference for small networks.

mod cycle;
mod oracle;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cycle::{
    analyze_cycle, classify_by_angle_basis, cycle_basis, random_closed_walk, CycleAnalysis, CycleError, StateSymbol,
};
pub use oracle::{is_journey_closed, oracle_enumerate, OracleError, DEFAULT_ORACLE_BOUND};

use crate::double_track::{Components, DoubleTrackError, DoubleTrackGraph, Orientation, PolarityMap};
use crate::dsu::ParityUnionFind;
use crate::model::{EndKind, EndRef, RailNetwork, Track, TrackId};
use crate::walk::{Walk, WalkStep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackClass {
    /// Joins a stem end to a branch end.
    Parallel,
    /// Joins two stems or two branches.
    Cross,
}

impl fmt::Display for TrackClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrackClass::Parallel => "parallel",
            TrackClass::Cross => "cross",
        })
    }
}

pub fn track_class(track: &Track) -> TrackClass {
    if track.a.kind.is_stem() != track.b.kind.is_stem() {
        TrackClass::Parallel
    } else {
        TrackClass::Cross
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    OneWay,
    TwoWay,
}

impl Verdict {
    fn from_one_way(one_way: bool) -> Self {
        if one_way {
            Verdict::OneWay
        } else {
            Verdict::TwoWay
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::OneWay => "OneWay",
            Verdict::TwoWay => "TwoWay",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Components,
    Parity,
    Angles,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Components, Method::Parity, Method::Angles];

    pub fn name(self) -> &'static str {
        match self {
            Method::Components => "components",
            Method::Parity => "parity",
            Method::Angles => "angles",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    DoubleTrack(#[from] DoubleTrackError),
    #[error("classifiers disagree: components={c:?} parity={p:?} angles={a:?}", c = .0.components, p = .0.parity, a = .0.angles)]
    MethodDisagreement(MethodVerdicts),
}

#[derive(Clone, Debug)]
pub struct ComponentsOutcome {
    pub verdict: Verdict,
    pub graph: DoubleTrackGraph,
    pub components: Components,
}

pub fn classify_by_components(net: &RailNetwork) -> Result<ComponentsOutcome, ClassifyError> {
    let graph = DoubleTrackGraph::new(net);
    let components = graph.components()?;
    Ok(ComponentsOutcome {
        verdict: Verdict::from_one_way(components.count() == 2),
        graph,
        components,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityOutcome {
    pub verdict: Verdict,
    /// A closed walk with an odd number of cross tracks, when two-way.
    pub witness: Option<Walk>,
}

/// Cross tracks force opposite parity between their switches, parallel
/// tracks equal parity. The first contradiction closes an odd cycle: the
/// offending track plus the spanning-forest path between its switches.
pub fn classify_by_parity(net: &RailNetwork) -> ParityOutcome {
    let mut uf = ParityUnionFind::new(net.switch_count());
    let mut forest = Vec::with_capacity(net.switch_count());
    for t in net.track_ids() {
        let track = net.track(t);
        let odd = track_class(track) == TrackClass::Cross;
        match uf.relate(track.a.switch.index(), track.b.switch.index(), odd) {
            Ok(true) => forest.push(t),
            Ok(false) => {}
            Err(_) => {
                return ParityOutcome {
                    verdict: Verdict::TwoWay,
                    witness: Some(odd_cycle_witness(net, &forest, t)),
                }
            }
        }
    }
    ParityOutcome {
        verdict: Verdict::OneWay,
        witness: None,
    }
}

fn odd_cycle_witness(net: &RailNetwork, forest: &[TrackId], closing: TrackId) -> Walk {
    let chord = *net.track(closing);
    let (from, to) = (chord.b.switch, chord.a.switch);
    let mut in_forest = vec![false; net.track_count()];
    for &t in forest {
        in_forest[t.index()] = true;
    }
    // Breadth-first over forest tracks from `to`, remembering the arrival end.
    let mut arrived_by: Vec<Option<EndRef>> = vec![None; net.switch_count()];
    let mut seen = vec![false; net.switch_count()];
    seen[to.index()] = true;
    let mut queue = VecDeque::from([to]);
    while let Some(s) = queue.pop_front() {
        if s == from {
            break;
        }
        for kind in EndKind::ALL {
            let end = EndRef::new(s, kind);
            if !in_forest[net.track_at(end).index()] {
                continue;
            }
            let far = net.mate(end);
            if !seen[far.switch.index()] {
                seen[far.switch.index()] = true;
                arrived_by[far.switch.index()] = Some(far);
                queue.push_back(far.switch);
            }
        }
    }
    // Path to..from, then the closing track from..to.
    let mut path = Vec::new();
    let mut cur = from;
    while cur != to {
        let entry = arrived_by[cur.index()].expect("forest path exists");
        let step = WalkStep::leaving(net, net.mate(entry));
        cur = step.exit.switch;
        path.push(step);
    }
    path.reverse();
    path.push(WalkStep::leaving(net, chord.b));
    Walk::new(net, path).expect("witness is a walk")
}

/// Parity union-find over end states.
///
/// Every end `e` has two states, `(e, in)` and `(e, out)`. A track `xy`
/// links `(x, out)` to `(y, in)` and `(y, out)` to `(x, in)` with parity 0.
/// Inside a switch, `(p, in)` links to `(q, out)` for each ordered pair of
/// distinct ends, with parity 1 exactly when both are branch ends (an
/// angle).
///
/// A cycle of the network is a closed path here whose parity is its angle
/// count. The six states of one switch form an even ring, so a closed path
/// that wanders inside a switch has the parity of a network closed walk that
/// turns back at that switch, one per turn-back. Angles plus turn-backs of a
/// closed walk have the parity of its cross tracks, which is additive over
/// the cycle space; hence a conflict appears exactly when some cycle has an
/// odd number of angles.
pub fn classify_by_angles(net: &RailNetwork) -> Verdict {
    let state = |e: EndRef, out: bool| e.index() * 2 + out as usize;
    let mut uf = ParityUnionFind::new(net.switch_count() * 6);
    for track in net.tracks() {
        let linked = uf
            .relate(state(track.a, true), state(track.b, false), false)
            .and_then(|_| uf.relate(state(track.b, true), state(track.a, false), false));
        if linked.is_err() {
            return Verdict::TwoWay;
        }
    }
    for s in net.switches() {
        for p in EndKind::ALL {
            for q in EndKind::ALL {
                if p == q {
                    continue;
                }
                let angle = p.is_branch() && q.is_branch();
                if uf
                    .relate(state(EndRef::new(s, p), false), state(EndRef::new(s, q), true), angle)
                    .is_err()
                {
                    return Verdict::TwoWay;
                }
            }
        }
    }
    Verdict::OneWay
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodVerdicts {
    pub components: Verdict,
    pub parity: Verdict,
    pub angles: Verdict,
}

impl MethodVerdicts {
    pub fn get(&self, method: Method) -> Verdict {
        match method {
            Method::Components => self.components,
            Method::Parity => self.parity,
            Method::Angles => self.angles,
        }
    }

    pub fn agree(&self) -> bool {
        self.components == self.parity && self.parity == self.angles
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub component_count: usize,
    /// The canonical one-way orientation (containing the forward arc of the
    /// first track) and its reverse.
    pub orientation_pair: Option<(Orientation, Orientation)>,
    /// Polarity under the canonical orientation.
    pub polarity: Option<PolarityMap>,
    pub witness: Option<CycleAnalysis>,
    pub methods: MethodVerdicts,
}

/// Runs all three deciders and assembles orientation, polarity or witness.
pub fn classify(net: &RailNetwork) -> Result<ClassificationReport, ClassifyError> {
    let by_components = classify_by_components(net)?;
    let by_parity = classify_by_parity(net);
    let methods = MethodVerdicts {
        components: by_components.verdict,
        parity: by_parity.verdict,
        angles: classify_by_angles(net),
    };
    if !methods.agree() {
        return Err(ClassifyError::MethodDisagreement(methods));
    }
    let (orientation_pair, polarity) = match methods.components {
        Verdict::OneWay => {
            let graph = &by_components.graph;
            let canonical = graph.orientation_from(&by_components.components, graph.forward_arc(TrackId(0)))?;
            let polarity = graph
                .polarity_of(&canonical)
                .uniform()
                .ok_or(ClassifyError::MethodDisagreement(methods))?;
            let reverse = canonical.reverse();
            (Some((canonical, reverse)), Some(polarity))
        }
        Verdict::TwoWay => (None, None),
    };
    let witness = by_parity
        .witness
        .map(|w| analyze_cycle(net, &w).expect("parity witness is a cycle"));
    Ok(ClassificationReport {
        verdict: methods.components,
        component_count: by_components.components.count(),
        orientation_pair,
        polarity,
        witness,
        methods,
    })
}
