// SPDX-License-Identifier: Apache-2.0

//! Train journeys and the functioning property.
//!
//! A journey is a directed walk in the double-track graph. A train arriving
//! at a converging vertex has one way out (the stem); at a diverging vertex
//! it picks one of two branches.
//!
//! A network is treated as *functioning* when, for every arc a train can
//! start on, its journeys together traverse every track in at least one
//! direction. A track counts as reached as soon as one journey runs along
//! it, since that passes every point of the track.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::double_track::{ArcId, DirectedVertex, DoubleTrackGraph, Role};
use crate::model::{EndKind, EndRef, RailNetwork, SwitchId, TrackId};
use crate::walk::{valid_transit, Walk, WalkStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JourneyError {
    #[error("journey has no arcs")]
    Empty,
    #[error("arc {position} does not start where arc {} ends", position - 1)]
    Broken { position: usize },
    #[error("unknown switch `{0}`")]
    UnknownSwitch(String),
    #[error("no branch chosen for switch `{0}`")]
    IncompleteMap(String),
    #[error("switch `{0}` mapped to the stem; choose branch_a or branch_b")]
    NotABranch(String),
}

/// How a train picks a branch at a diverging vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SwitchPolicy {
    AlwaysA,
    AlwaysB,
    /// A branch for every switch, indexed by switch id.
    FixedMap(Vec<EndKind>),
    /// Branch chosen from `(seed, step index)` by a counter-based generator.
    SeededRandom(u64),
}

impl SwitchPolicy {
    pub fn fixed_map<'a>(
        net: &RailNetwork,
        choices: impl IntoIterator<Item = (&'a str, EndKind)>,
    ) -> Result<Self, JourneyError> {
        let mut map: Vec<Option<EndKind>> = vec![None; net.switch_count()];
        for (name, kind) in choices {
            let s = net
                .switch_by_name(name)
                .ok_or_else(|| JourneyError::UnknownSwitch(name.to_owned()))?;
            if kind.is_stem() {
                return Err(JourneyError::NotABranch(name.to_owned()));
            }
            map[s.index()] = Some(kind);
        }
        map.iter()
            .enumerate()
            .map(|(i, k)| k.ok_or_else(|| JourneyError::IncompleteMap(net.name(SwitchId(i as u32)).to_owned())))
            .collect::<Result<Vec<_>, _>>()
            .map(SwitchPolicy::FixedMap)
    }

    /// Branch taken at `switch` on the `step_index`-th move.
    pub fn branch(&self, switch: SwitchId, step_index: usize) -> EndKind {
        match self {
            SwitchPolicy::AlwaysA => EndKind::BranchA,
            SwitchPolicy::AlwaysB => EndKind::BranchB,
            SwitchPolicy::FixedMap(map) => map[switch.index()],
            SwitchPolicy::SeededRandom(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_word_pos(step_index as u128);
                if rng.next_u32() & 1 == 0 {
                    EndKind::BranchA
                } else {
                    EndKind::BranchB
                }
            }
        }
    }
}

/// The arc following `current`, the `step_index`-th move of a journey.
pub fn step(graph: &DoubleTrackGraph, current: ArcId, policy: &SwitchPolicy, step_index: usize) -> ArcId {
    let head = graph.arc(current).head;
    let kind = match head.role {
        Role::Converging => EndKind::Stem,
        Role::Diverging => policy.branch(head.switch, step_index),
    };
    graph.arc_leaving(EndRef::new(head.switch, kind))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recurrence {
    /// Index of the first visit to the repeated arc.
    pub first: usize,
    /// Index of the repeat.
    pub again: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Journey {
    arcs: Vec<ArcId>,
    recurrence: Option<Recurrence>,
}

impl Journey {
    pub fn new(graph: &DoubleTrackGraph, arcs: Vec<ArcId>) -> Result<Self, JourneyError> {
        if arcs.is_empty() {
            return Err(JourneyError::Empty);
        }
        if let Some(position) = (1..arcs.len()).find(|&i| graph.arc(arcs[i - 1]).head != graph.arc(arcs[i]).tail) {
            return Err(JourneyError::Broken { position });
        }
        let recurrence = first_recurrence(graph, &arcs);
        Ok(Journey { arcs, recurrence })
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// First arc seen twice, if any.
    pub fn recurrence(&self) -> Option<Recurrence> {
        self.recurrence
    }

    /// The same movement driven backwards.
    pub fn reversed(&self, graph: &DoubleTrackGraph) -> Journey {
        let arcs: Vec<ArcId> = self.arcs.iter().rev().map(|a| a.reverse()).collect();
        let recurrence = first_recurrence(graph, &arcs);
        Journey { arcs, recurrence }
    }
}

fn first_recurrence(graph: &DoubleTrackGraph, arcs: &[ArcId]) -> Option<Recurrence> {
    let mut seen = vec![usize::MAX; graph.arc_count()];
    for (i, a) in arcs.iter().enumerate() {
        let slot = &mut seen[a.index()];
        if *slot != usize::MAX {
            return Some(Recurrence { first: *slot, again: i });
        }
        *slot = i;
    }
    None
}

/// Runs a train from `start` for `max_steps` arcs in total (at least 1).
pub fn simulate(graph: &DoubleTrackGraph, start: ArcId, policy: &SwitchPolicy, max_steps: usize) -> Journey {
    let mut arcs = Vec::with_capacity(max_steps.max(1));
    arcs.push(start);
    while arcs.len() < max_steps {
        let next = step(graph, arcs[arcs.len() - 1], policy, arcs.len() - 1);
        arcs.push(next);
    }
    let recurrence = first_recurrence(graph, &arcs);
    Journey { arcs, recurrence }
}

/// A set of arcs, indexed by [`ArcId`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcSet {
    member: Vec<bool>,
}

impl ArcSet {
    pub fn contains(&self, a: ArcId) -> bool {
        self.member[a.index()]
    }

    pub fn len(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.member.iter().any(|&m| m)
    }

    pub fn iter(&self) -> impl Iterator<Item = ArcId> + '_ {
        self.member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| ArcId(i as u32))
    }

    /// Which directions of `track` are in the set.
    pub fn reach(&self, track: TrackId) -> DirectionReach {
        let i = track.index() * 2;
        match (self.member[i] as u8) + (self.member[i + 1] as u8) {
            0 => DirectionReach::Unreached,
            1 => DirectionReach::One,
            _ => DirectionReach::Both,
        }
    }
}

/// `start` plus every arc some journey from `start` can use.
pub fn reachable_arcs(graph: &DoubleTrackGraph, start: ArcId) -> ArcSet {
    let mut seen = vec![false; graph.vertex_count()];
    let mut stack = vec![graph.arc(start).head];
    seen[graph.arc(start).head.index()] = true;
    let mut member = vec![false; graph.arc_count()];
    member[start.index()] = true;
    while let Some(v) = stack.pop() {
        for a in graph.out_arcs(v) {
            member[a.index()] = true;
            let w = graph.arc(a).head;
            if !seen[w.index()] {
                seen[w.index()] = true;
                stack.push(w);
            }
        }
    }
    ArcSet { member }
}

/// Strongly connected components of the double-track graph (iterative
/// Tarjan). Component ids are in reverse topological order: every arc goes
/// from a component to one with an id no larger.
pub fn strong_components(graph: &DoubleTrackGraph) -> (Vec<u32>, usize) {
    const NONE: u32 = u32::MAX;
    let n = graph.vertex_count();
    let mut index = vec![NONE; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![NONE; n];
    let mut stack: Vec<u32> = Vec::new();
    // (vertex, next out-arc slot)
    let mut call: Vec<(u32, u8)> = Vec::new();
    let mut next_index = 0u32;
    let mut count = 0u32;
    for root in 0..n as u32 {
        if index[root as usize] != NONE {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;
        while let Some(&mut (v, ref mut slot)) = call.last_mut() {
            let vtx = DirectedVertex::from_index(v as usize);
            let degree = if vtx.role == Role::Converging { 1 } else { 2 };
            if (*slot as usize) < degree {
                let a = graph.out_arcs(vtx).nth(*slot as usize).expect("slot < degree");
                *slot += 1;
                let w = graph.arc(a).head.index() as u32;
                if index[w as usize] == NONE {
                    index[w as usize] = next_index;
                    low[w as usize] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    call.push((w, 0));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                loop {
                    let w = stack.pop().expect("component on stack");
                    on_stack[w as usize] = false;
                    comp[w as usize] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    (comp, count as usize)
}

/// Whether `start`'s journeys reach `track` in no, one or both directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionReach {
    Unreached,
    One,
    Both,
}

/// [`DirectionReach`] for every (start arc, track) pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachTable {
    tracks: usize,
    cells: Vec<DirectionReach>,
}

impl ReachTable {
    pub fn get(&self, start: ArcId, track: TrackId) -> DirectionReach {
        self.cells[start.index() * self.tracks + track.index()]
    }

    pub fn row(&self, start: ArcId) -> &[DirectionReach] {
        &self.cells[start.index() * self.tracks..(start.index() + 1) * self.tracks]
    }

    pub fn starts(&self) -> usize {
        self.cells.len() / self.tracks.max(1)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReachMode {
    /// One reachability pass per strongly connected component.
    #[default]
    Condensation,
    /// One search per start arc.
    Naive,
}

/// Per-pair reach for all starts. Quadratic in size; meant for networks of
/// up to a few thousand switches.
pub fn reach_table(graph: &DoubleTrackGraph, mode: ReachMode) -> ReachTable {
    let tracks = graph.arc_count() / 2;
    let mut cells = Vec::with_capacity(graph.arc_count() * tracks);
    match mode {
        ReachMode::Naive => {
            for start in graph.arc_ids() {
                let set = reachable_arcs(graph, start);
                cells.extend((0..tracks as u32).map(|t| set.reach(TrackId(t))));
            }
        }
        ReachMode::Condensation => {
            let (comp, count) = strong_components(graph);
            let words = graph.vertex_count().div_ceil(64);
            // reach[c]: vertices reachable from component c
            let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
            for (v, &c) in comp.iter().enumerate() {
                members[c as usize].push(v);
            }
            let mut reach = vec![0u64; count * words];
            for (c, vertices) in members.iter().enumerate() {
                let (done, rest) = reach.split_at_mut(c * words);
                let own = &mut rest[..words];
                for &v in vertices {
                    own[v / 64] |= 1 << (v % 64);
                    for a in graph.out_arcs(DirectedVertex::from_index(v)) {
                        let d = comp[graph.arc(a).head.index()] as usize;
                        if d != c {
                            for (o, x) in own.iter_mut().zip(&done[d * words..(d + 1) * words]) {
                                *o |= x;
                            }
                        }
                    }
                }
            }
            for start in graph.arc_ids() {
                let c = comp[graph.arc(start).head.index()] as usize;
                let bits = &reach[c * words..(c + 1) * words];
                let has = |a: ArcId| {
                    let tail = graph.arc(a).tail.index();
                    a == start || bits[tail / 64] >> (tail % 64) & 1 == 1
                };
                cells.extend((0..tracks as u32).map(|t| {
                    let fwd = ArcId(t * 2);
                    match has(fwd) as u8 + has(fwd.reverse()) as u8 {
                        0 => DirectionReach::Unreached,
                        1 => DirectionReach::One,
                        _ => DirectionReach::Both,
                    }
                }));
            }
        }
    }
    ReachTable { tracks, cells }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionCoverage {
    /// Every start that reaches the track does so in exactly one direction.
    OneDirection,
    /// Every start that reaches the track does so in both directions.
    BothDirections,
    /// Some starts see one direction, others both.
    Mixed,
}

impl fmt::Display for DirectionCoverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DirectionCoverage::OneDirection => "one-direction",
            DirectionCoverage::BothDirections => "both-directions",
            DirectionCoverage::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctioningReport {
    pub functioning: bool,
    /// (start arc, track never traversed from it).
    pub unreachable_pairs: Vec<(ArcId, TrackId)>,
    /// Per track, over the starts that reach it.
    pub direction_coverage: Vec<DirectionCoverage>,
}

pub fn check_functioning(net: &RailNetwork, mode: ReachMode) -> FunctioningReport {
    let graph = DoubleTrackGraph::new(net);
    let table = reach_table(&graph, mode);
    let tracks = net.track_count();
    let mut unreachable_pairs = Vec::new();
    let mut seen_one = vec![false; tracks];
    let mut seen_both = vec![false; tracks];
    for start in graph.arc_ids() {
        for (t, cell) in table.row(start).iter().enumerate() {
            match cell {
                DirectionReach::Unreached => unreachable_pairs.push((start, TrackId(t as u32))),
                DirectionReach::One => seen_one[t] = true,
                DirectionReach::Both => seen_both[t] = true,
            }
        }
    }
    let direction_coverage = (0..tracks)
        .map(|t| match (seen_one[t], seen_both[t]) {
            (true, true) => DirectionCoverage::Mixed,
            (false, true) => DirectionCoverage::BothDirections,
            _ => DirectionCoverage::OneDirection,
        })
        .collect();
    FunctioningReport {
        functioning: unreachable_pairs.is_empty(),
        unreachable_pairs,
        direction_coverage,
    }
}

/// Linear-time functioning test.
///
/// Every start eventually enters a sink component of the condensation and
/// can then use exactly the arcs leaving that component's vertices; a start
/// inside a sink sees nothing else. So the network functions iff the arcs of
/// every sink component cover all tracks.
pub fn is_functioning(graph: &DoubleTrackGraph) -> bool {
    let (comp, count) = strong_components(graph);
    let mut is_sink = vec![true; count];
    for a in graph.arcs() {
        if comp[a.tail.index()] != comp[a.head.index()] {
            is_sink[comp[a.tail.index()] as usize] = false;
        }
    }
    let tracks = graph.arc_count() / 2;
    let mut covered = vec![0usize; count];
    let mut last_seen = vec![u32::MAX; count];
    for t in 0..tracks as u32 {
        for a in [ArcId(t * 2), ArcId(t * 2 + 1)] {
            let c = comp[graph.arc(a).tail.index()] as usize;
            if is_sink[c] && last_seen[c] != t {
                last_seen[c] = t;
                covered[c] += 1;
            }
        }
    }
    (0..count).all(|c| !is_sink[c] || covered[c] == tracks)
}

/// The track-level walk a journey runs along.
pub fn journey_to_walk(net: &RailNetwork, graph: &DoubleTrackGraph, journey: &Journey) -> Walk {
    let steps = journey
        .arcs()
        .iter()
        .map(|&a| {
            let arc = graph.arc(a);
            WalkStep {
                track: arc.track,
                exit: arc.tail_end,
                entry: arc.head_end,
            }
        })
        .collect();
    Walk::new(net, steps).expect("journeys project to walks")
}

/// The journey running along `walk`, if the walk is a railway line.
pub fn walk_to_journey(graph: &DoubleTrackGraph, walk: &Walk) -> Option<Journey> {
    if !walk.steps().windows(2).all(|w| valid_transit(w[0].entry, w[1].exit)) {
        return None;
    }
    let arcs = walk.steps().iter().map(|s| graph.arc_leaving(s.exit)).collect();
    Journey::new(graph, arcs).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::double_track::Direction;
    use crate::model::fixtures::*;

    fn arc(t: u32, d: Direction) -> ArcId {
        ArcId::new(TrackId(t), d)
    }

    #[test]
    fn theta_steps() {
        let net = theta();
        let g = DoubleTrackGraph::new(&net);
        // c1 -> d2 is t1 forward; always-a at d2 takes t2 back to c1
        let next = step(&g, arc(0, Direction::Forward), &SwitchPolicy::AlwaysA, 0);
        assert_eq!(next, arc(1, Direction::Backward));
        assert_eq!(g.arc(next).head, DirectedVertex::converging(SwitchId(0)));
        let forced = step(&g, next, &SwitchPolicy::AlwaysB, 1);
        assert_eq!(forced, arc(0, Direction::Forward));
    }

    #[test]
    fn theta_simulation_has_period_two() {
        let g = DoubleTrackGraph::new(&theta());
        let j = simulate(&g, arc(0, Direction::Forward), &SwitchPolicy::AlwaysA, 6);
        let expected: Vec<ArcId> = (0..6)
            .map(|i| {
                if i % 2 == 0 {
                    arc(0, Direction::Forward)
                } else {
                    arc(1, Direction::Backward)
                }
            })
            .collect();
        assert_eq!(j.arcs(), expected.as_slice());
        assert_eq!(j.recurrence(), Some(Recurrence { first: 0, again: 2 }));
        let one = simulate(&g, arc(2, Direction::Backward), &SwitchPolicy::AlwaysA, 1);
        assert_eq!(one.arcs(), &[arc(2, Direction::Backward)]);
        assert_eq!(one.recurrence(), None);
    }

    #[test]
    fn seeded_policy_is_reproducible() {
        let g = DoubleTrackGraph::new(&yin_yang());
        let p = SwitchPolicy::SeededRandom(99);
        let a = simulate(&g, ArcId(3), &p, 50);
        let b = simulate(&g, ArcId(3), &p, 50);
        assert_eq!(a, b);
    }

    #[test]
    fn fixed_map_must_cover_every_switch() {
        let net = theta();
        use EndKind::*;
        assert_eq!(
            SwitchPolicy::fixed_map(&net, [("s1", BranchA)]).unwrap_err(),
            JourneyError::IncompleteMap("s2".into())
        );
        assert_eq!(
            SwitchPolicy::fixed_map(&net, [("s1", Stem)]).unwrap_err(),
            JourneyError::NotABranch("s1".into())
        );
        let p = SwitchPolicy::fixed_map(&net, [("s1", BranchA), ("s2", BranchB)]).unwrap();
        assert_eq!(p.branch(SwitchId(1), 7), BranchB);
    }

    #[test]
    fn theta_reachability() {
        let g = DoubleTrackGraph::new(&theta());
        let set = reachable_arcs(&g, arc(0, Direction::Forward));
        let got: Vec<_> = set.iter().collect();
        assert_eq!(
            got,
            vec![
                arc(0, Direction::Forward),
                arc(1, Direction::Backward),
                arc(2, Direction::Backward)
            ]
        );
    }

    #[test]
    fn yin_yang_reaches_both_directions_from_the_d_side() {
        let g = DoubleTrackGraph::new(&yin_yang());
        // t2 backward is d1 -> d2
        let set = reachable_arcs(&g, arc(1, Direction::Backward));
        assert_eq!(set.reach(TrackId(0)), DirectionReach::Both);
    }

    #[test]
    fn theta_functions_one_way() {
        let report = check_functioning(&theta(), ReachMode::Condensation);
        assert!(report.functioning);
        assert!(report
            .direction_coverage
            .iter()
            .all(|&c| c == DirectionCoverage::OneDirection));
        assert_eq!(report, check_functioning(&theta(), ReachMode::Naive));
        assert!(is_functioning(&DoubleTrackGraph::new(&theta())));
    }

    #[test]
    fn yin_yang_outer_loop_traps_trains() {
        // c1 -> c2 -> c1 runs the two parallel tracks forever
        let net = yin_yang();
        let report = check_functioning(&net, ReachMode::Condensation);
        assert!(!report.functioning);
        assert!(report
            .unreachable_pairs
            .contains(&(arc(0, Direction::Forward), TrackId(2))));
        assert_eq!(report, check_functioning(&net, ReachMode::Naive));
        assert!(!is_functioning(&DoubleTrackGraph::new(&net)));
    }

    #[test]
    fn projection_and_lift() {
        let net = theta();
        let g = DoubleTrackGraph::new(&net);
        let j = Journey::new(&g, vec![arc(0, Direction::Forward), arc(1, Direction::Backward)]).unwrap();
        let w = journey_to_walk(&net, &g, &j);
        assert!(w.is_railway_line());
        assert_eq!(
            w.display(&net).to_string(),
            "s1 -t1[stem>stem]-> s2 -t2[branch_a>branch_a]-> s1"
        );
        assert_eq!(walk_to_journey(&g, &w), Some(j.clone()));
        let back = j.reversed(&g);
        assert_eq!(journey_to_walk(&net, &g, &back), w.reversed());
        assert!(Journey::new(&g, vec![arc(0, Direction::Forward), arc(0, Direction::Forward)]).is_err());
    }

    #[test]
    fn strong_components_are_reverse_topological() {
        let g = DoubleTrackGraph::new(&yin_yang());
        let (comp, count) = strong_components(&g);
        assert!(count >= 2);
        for a in g.arcs() {
            assert!(comp[a.tail.index()] >= comp[a.head.index()]);
        }
    }
}
