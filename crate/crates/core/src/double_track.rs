// SPDX-License-Identifier: Apache-2.0

//! The double-track digraph of a rail network.
//!
//! Every switch `s` becomes two directed vertices: a converging vertex `c(s)`
//! (travel from a branch end out through the stem) and a diverging vertex
//! `d(s)` (travel in through the stem, out through a branch). Every track
//! becomes two opposite arcs. An arc leaving through end `x` and arriving
//! through end `y` starts at `c(x.switch)` if `x` is a stem, else at
//! `d(x.switch)`, and ends at `d(y.switch)` if `y` is a stem, else at
//! `c(y.switch)`.
//!
//! Arc ids are `2 * track + direction`, so reversal is `id ^ 1`.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EndKind, EndRef, RailNetwork, SwitchId, TrackId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Converging,
    Diverging,
}

impl Role {
    pub fn opposite(self) -> Role {
        match self {
            Role::Converging => Role::Diverging,
            Role::Diverging => Role::Converging,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DirectedVertex {
    pub switch: SwitchId,
    pub role: Role,
}

impl DirectedVertex {
    pub fn converging(switch: SwitchId) -> Self {
        DirectedVertex {
            switch,
            role: Role::Converging,
        }
    }

    pub fn diverging(switch: SwitchId) -> Self {
        DirectedVertex {
            switch,
            role: Role::Diverging,
        }
    }

    /// Dense index `2 * switch + role`.
    #[inline]
    pub fn index(self) -> usize {
        self.switch.index() * 2 + (self.role == Role::Diverging) as usize
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        DirectedVertex {
            switch: SwitchId((index / 2) as u32),
            role: if index.is_multiple_of(2) {
                Role::Converging
            } else {
                Role::Diverging
            },
        }
    }

    /// The other directed vertex of the same switch.
    pub fn twin(self) -> Self {
        DirectedVertex {
            switch: self.switch,
            role: self.role.opposite(),
        }
    }

    /// The vertex an arc leaves from when it exits through `end`.
    #[inline]
    pub fn tail_for(end: EndRef) -> Self {
        if end.kind.is_stem() {
            Self::converging(end.switch)
        } else {
            Self::diverging(end.switch)
        }
    }

    /// The vertex an arc arrives at when it enters through `end`.
    #[inline]
    pub fn head_for(end: EndRef) -> Self {
        if end.kind.is_stem() {
            Self::diverging(end.switch)
        } else {
            Self::converging(end.switch)
        }
    }

    pub fn label(self, net: &RailNetwork) -> String {
        let prefix = match self.role {
            Role::Converging => 'c',
            Role::Diverging => 'd',
        };
        format!("{prefix}:{}", net.name(self.switch))
    }
}

/// Direction of travel along a track relative to its stored end order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// From `track.a` to `track.b`.
    Forward,
    Backward,
}

impl Direction {
    pub fn opposite(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArcId(pub u32);

impl ArcId {
    #[inline]
    pub fn new(track: TrackId, direction: Direction) -> Self {
        ArcId(track.0 * 2 + (direction == Direction::Backward) as u32)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn track(self) -> TrackId {
        TrackId(self.0 / 2)
    }

    #[inline]
    pub fn direction(self) -> Direction {
        if self.0 & 1 == 0 {
            Direction::Forward
        } else {
            Direction::Backward
        }
    }

    #[inline]
    pub fn reverse(self) -> ArcId {
        ArcId(self.0 ^ 1)
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.track(), self.direction())
    }
}

impl std::str::FromStr for ArcId {
    type Err = String;

    /// Parses `t<n>:forward` or `t<n>:backward`.
    fn from_str(s: &str) -> Result<Self, String> {
        let (track, dir) = s
            .split_once(':')
            .ok_or_else(|| format!("expected <track>:<direction>, got `{s}`"))?;
        let direction = match dir {
            "forward" => Direction::Forward,
            "backward" => Direction::Backward,
            _ => return Err(format!("direction must be forward or backward, got `{dir}`")),
        };
        Ok(ArcId::new(track.parse()?, direction))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub track: TrackId,
    pub tail: DirectedVertex,
    pub head: DirectedVertex,
    pub tail_end: EndRef,
    pub head_end: EndRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DoubleTrackError {
    #[error("double-track graph has {0} components; at most 2 are possible")]
    InternalInvariantViolation(usize),
    #[error("double-track graph is connected, so the network is not one-way")]
    NotOneWay,
}

/// Connected components of the underlying undirected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    block: Vec<u8>,
    count: usize,
}

impl Components {
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn block_of(&self, v: DirectedVertex) -> usize {
        self.block[v.index()] as usize
    }

    /// Vertices of each block, in index order.
    pub fn blocks(&self) -> Vec<Vec<DirectedVertex>> {
        let mut out = vec![Vec::new(); self.count];
        for (i, &b) in self.block.iter().enumerate() {
            out[b as usize].push(DirectedVertex::from_index(i));
        }
        out
    }
}

/// Immutable double-track digraph.
#[derive(Clone, Debug)]
pub struct DoubleTrackGraph {
    arcs: Vec<Arc>,
    /// Arc whose tail end is the given end, indexed by [`EndRef::index`].
    leaving: Vec<ArcId>,
    switch_count: usize,
}

impl DoubleTrackGraph {
    pub fn new(net: &RailNetwork) -> Self {
        let mut arcs = Vec::with_capacity(net.track_count() * 2);
        let mut leaving = vec![ArcId(0); net.switch_count() * 3];
        for (i, t) in net.tracks().iter().enumerate() {
            let track = TrackId(i as u32);
            for (dir, from, to) in [(Direction::Forward, t.a, t.b), (Direction::Backward, t.b, t.a)] {
                leaving[from.index()] = ArcId::new(track, dir);
                arcs.push(Arc {
                    track,
                    tail: DirectedVertex::tail_for(from),
                    head: DirectedVertex::head_for(to),
                    tail_end: from,
                    head_end: to,
                });
            }
        }
        DoubleTrackGraph {
            arcs,
            leaving,
            switch_count: net.switch_count(),
        }
    }

    pub fn switch_count(&self) -> usize {
        self.switch_count
    }

    pub fn vertex_count(&self) -> usize {
        self.switch_count * 2
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = DirectedVertex> {
        (0..self.vertex_count()).map(DirectedVertex::from_index)
    }

    pub fn arc_ids(&self) -> impl ExactSizeIterator<Item = ArcId> {
        (0..self.arcs.len() as u32).map(ArcId)
    }

    #[inline]
    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id.index()]
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// The arc that leaves its tail through `end`.
    #[inline]
    pub fn arc_leaving(&self, end: EndRef) -> ArcId {
        self.leaving[end.index()]
    }

    /// The arc that reaches its head through `end`.
    #[inline]
    pub fn arc_entering(&self, end: EndRef) -> ArcId {
        self.leaving[end.index()].reverse()
    }

    /// Out-arcs: one (via the stem) at a converging vertex, two (via the
    /// branches) at a diverging vertex.
    pub fn out_arcs(&self, v: DirectedVertex) -> impl Iterator<Item = ArcId> + '_ {
        let kinds: &[EndKind] = match v.role {
            Role::Converging => &[EndKind::Stem],
            Role::Diverging => &[EndKind::BranchA, EndKind::BranchB],
        };
        kinds.iter().map(move |&k| self.arc_leaving(EndRef::new(v.switch, k)))
    }

    /// In-arcs: two (via the branches) at a converging vertex, one (via the
    /// stem) at a diverging vertex.
    pub fn in_arcs(&self, v: DirectedVertex) -> impl Iterator<Item = ArcId> + '_ {
        let kinds: &[EndKind] = match v.role {
            Role::Converging => &[EndKind::BranchA, EndKind::BranchB],
            Role::Diverging => &[EndKind::Stem],
        };
        kinds.iter().map(move |&k| self.arc_entering(EndRef::new(v.switch, k)))
    }

    /// All three arcs incident to `v`.
    pub fn arcs_at(&self, v: DirectedVertex) -> impl Iterator<Item = ArcId> + '_ {
        self.in_arcs(v).chain(self.out_arcs(v))
    }

    pub fn forward_arc(&self, track: TrackId) -> ArcId {
        ArcId::new(track, Direction::Forward)
    }

    /// Components of the underlying undirected graph, found breadth-first.
    pub fn components(&self) -> Result<Components, DoubleTrackError> {
        const UNSEEN: u8 = u8::MAX;
        let n = self.vertex_count();
        let mut block = vec![UNSEEN; n];
        let mut count = 0usize;
        let mut queue = VecDeque::new();
        for root in 0..n {
            if block[root] != UNSEEN {
                continue;
            }
            if count == 2 {
                return Err(DoubleTrackError::InternalInvariantViolation(count + 1));
            }
            let id = count as u8;
            count += 1;
            block[root] = id;
            queue.push_back(DirectedVertex::from_index(root));
            while let Some(v) = queue.pop_front() {
                for a in self.out_arcs(v) {
                    let w = self.arc(a).head;
                    if block[w.index()] == UNSEEN {
                        block[w.index()] = id;
                        queue.push_back(w);
                    }
                }
                for a in self.in_arcs(v) {
                    let w = self.arc(a).tail;
                    if block[w.index()] == UNSEEN {
                        block[w.index()] = id;
                        queue.push_back(w);
                    }
                }
            }
        }
        Ok(Components { block, count })
    }

    /// The orientation made of every arc in the same component as `seed`.
    pub fn extract_orientation(&self, seed: ArcId) -> Result<Orientation, DoubleTrackError> {
        let components = self.components()?;
        self.orientation_from(&components, seed)
    }

    pub fn orientation_from(&self, components: &Components, seed: ArcId) -> Result<Orientation, DoubleTrackError> {
        if components.count() < 2 {
            return Err(DoubleTrackError::NotOneWay);
        }
        let target = components.block_of(self.arc(seed).tail);
        let backward = (0..self.arcs.len() / 2)
            .map(|t| {
                let fwd = ArcId::new(TrackId(t as u32), Direction::Forward);
                components.block_of(self.arc(fwd).tail) != target
            })
            .collect();
        Ok(Orientation { backward })
    }

    /// Classifies every switch as upward or downward under `orientation`.
    pub fn polarity_of(&self, orientation: &Orientation) -> PolarityVerdict {
        let mut polarity = Vec::with_capacity(self.switch_count);
        for s in 0..self.switch_count as u32 {
            let s = SwitchId(s);
            let all_in = |v: DirectedVertex| self.arcs_at(v).all(|a| orientation.contains(a));
            if all_in(DirectedVertex::converging(s)) {
                polarity.push(Polarity::Upward);
            } else if all_in(DirectedVertex::diverging(s)) {
                polarity.push(Polarity::Downward);
            } else {
                return PolarityVerdict::NotUniform { switch: s };
            }
        }
        PolarityVerdict::Uniform(PolarityMap { polarity })
    }
}

/// One arc chosen from each reverse pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Orientation {
    /// Per track: `true` if the backward arc is chosen.
    backward: Vec<bool>,
}

impl Orientation {
    pub fn from_directions(directions: impl IntoIterator<Item = Direction>) -> Self {
        Orientation {
            backward: directions.into_iter().map(|d| d == Direction::Backward).collect(),
        }
    }

    /// Bit `t` of `mask` set means track `t` runs backward.
    pub fn from_mask(track_count: usize, mask: u64) -> Self {
        Orientation {
            backward: (0..track_count).map(|t| mask >> t & 1 == 1).collect(),
        }
    }

    pub fn track_count(&self) -> usize {
        self.backward.len()
    }

    pub fn direction(&self, track: TrackId) -> Direction {
        if self.backward[track.index()] {
            Direction::Backward
        } else {
            Direction::Forward
        }
    }

    #[inline]
    pub fn contains(&self, arc: ArcId) -> bool {
        self.backward[arc.track().index()] == (arc.direction() == Direction::Backward)
    }

    pub fn arcs(&self) -> impl Iterator<Item = ArcId> + '_ {
        self.backward
            .iter()
            .enumerate()
            .map(|(t, &b)| ArcId(t as u32 * 2 + b as u32))
    }

    /// The complementary choice.
    pub fn reverse(&self) -> Orientation {
        Orientation {
            backward: self.backward.iter().map(|b| !b).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Upward,
    Downward,
}

impl Polarity {
    pub fn opposite(self) -> Polarity {
        match self {
            Polarity::Upward => Polarity::Downward,
            Polarity::Downward => Polarity::Upward,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Upward => "upward",
            Polarity::Downward => "downward",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarityMap {
    polarity: Vec<Polarity>,
}

impl PolarityMap {
    pub fn get(&self, switch: SwitchId) -> Polarity {
        self.polarity[switch.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (SwitchId, Polarity)> + '_ {
        self.polarity.iter().enumerate().map(|(i, &p)| (SwitchId(i as u32), p))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolarityVerdict {
    Uniform(PolarityMap),
    /// First switch (in id order) that is neither upward nor downward.
    NotUniform {
        switch: SwitchId,
    },
}

impl PolarityVerdict {
    pub fn uniform(self) -> Option<PolarityMap> {
        match self {
            PolarityVerdict::Uniform(map) => Some(map),
            PolarityVerdict::NotUniform { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    #[test]
    fn arc_names_round_trip() {
        let a: ArcId = "t3:backward".parse().unwrap();
        assert_eq!(a, ArcId(5));
        assert_eq!(a.to_string(), "t3:backward");
        assert!("t0:forward".parse::<ArcId>().is_err());
        assert!("t1:up".parse::<ArcId>().is_err());
        assert!("t1".parse::<ArcId>().is_err());
    }

    fn v(net: &RailNetwork, label: &str) -> DirectedVertex {
        let (role, name) = label.split_at(1);
        let s = net.switch_by_name(&format!("s{name}")).unwrap();
        match role {
            "c" => DirectedVertex::converging(s),
            _ => DirectedVertex::diverging(s),
        }
    }

    fn arc_pairs(net: &RailNetwork, d: &DoubleTrackGraph) -> Vec<(String, String)> {
        d.arcs()
            .iter()
            .map(|a| (a.tail.label(net), a.head.label(net)))
            .collect()
    }

    #[test]
    fn theta_arcs() {
        let net = theta();
        let d = DoubleTrackGraph::new(&net);
        assert_eq!(d.vertex_count(), 4);
        assert_eq!(d.arc_count(), 6);
        let pairs = arc_pairs(&net, &d);
        let p = |a: &str, b: &str| (a.to_string(), b.to_string());
        assert_eq!(
            pairs,
            vec![
                p("c:s1", "d:s2"),
                p("c:s2", "d:s1"),
                p("d:s1", "c:s2"),
                p("d:s2", "c:s1"),
                p("d:s1", "c:s2"),
                p("d:s2", "c:s1"),
            ]
        );
    }

    #[test]
    fn yin_yang_arcs() {
        let net = yin_yang();
        let d = DoubleTrackGraph::new(&net);
        let p = |a: &str, b: &str| (a.to_string(), b.to_string());
        assert_eq!(
            arc_pairs(&net, &d),
            vec![
                p("c:s1", "c:s2"),
                p("d:s2", "d:s1"),
                p("c:s2", "c:s1"),
                p("d:s1", "d:s2"),
                p("d:s1", "c:s2"),
                p("d:s2", "c:s1"),
            ]
        );
    }

    #[test]
    fn degree_law_and_reversal() {
        for net in [theta(), yin_yang()] {
            let d = DoubleTrackGraph::new(&net);
            for vtx in d.vertices() {
                let (i, o) = (d.in_arcs(vtx).count(), d.out_arcs(vtx).count());
                match vtx.role {
                    Role::Converging => assert_eq!((i, o), (2, 1)),
                    Role::Diverging => assert_eq!((i, o), (1, 2)),
                }
                for a in d.out_arcs(vtx) {
                    assert_eq!(d.arc(a).tail, vtx);
                }
                for a in d.in_arcs(vtx) {
                    assert_eq!(d.arc(a).head, vtx);
                }
            }
            for a in d.arc_ids() {
                let r = a.reverse();
                assert_ne!(a, r);
                assert_eq!(r.reverse(), a);
                assert_eq!(d.arc(r).tail_end, d.arc(a).head_end);
                assert_eq!(d.arc(r).track, d.arc(a).track);
            }
        }
    }

    #[test]
    fn theta_components() {
        let net = theta();
        let d = DoubleTrackGraph::new(&net);
        let comps = d.components().unwrap();
        assert_eq!(comps.count(), 2);
        assert_eq!(comps.block_of(v(&net, "c1")), comps.block_of(v(&net, "d2")));
        assert_eq!(comps.block_of(v(&net, "c2")), comps.block_of(v(&net, "d1")));
        assert_ne!(comps.block_of(v(&net, "c1")), comps.block_of(v(&net, "d1")));
    }

    #[test]
    fn yin_yang_is_connected() {
        let d = DoubleTrackGraph::new(&yin_yang());
        assert_eq!(d.components().unwrap().count(), 1);
        assert_eq!(
            d.extract_orientation(ArcId(0)).unwrap_err(),
            DoubleTrackError::NotOneWay
        );
    }

    #[test]
    fn theta_orientation_and_polarity() {
        let net = theta();
        let d = DoubleTrackGraph::new(&net);
        // seed c1 -> d2 is the forward arc of t1
        let o = d.extract_orientation(ArcId(0)).unwrap();
        let labels: Vec<_> = o
            .arcs()
            .map(|a| (d.arc(a).tail.label(&net), d.arc(a).head.label(&net)))
            .collect();
        assert_eq!(
            labels,
            vec![
                ("c:s1".into(), "d:s2".into()),
                ("d:s2".into(), "c:s1".into()),
                ("d:s2".into(), "c:s1".into())
            ]
        );
        let rev = d.extract_orientation(ArcId(1)).unwrap();
        assert_eq!(rev, o.reverse());

        let map = d.polarity_of(&o).uniform().unwrap();
        assert_eq!(map.get(SwitchId(0)), Polarity::Upward);
        assert_eq!(map.get(SwitchId(1)), Polarity::Downward);
        let rmap = d.polarity_of(&rev).uniform().unwrap();
        for (s, p) in map.iter() {
            assert_eq!(rmap.get(s), p.opposite());
        }
    }

    #[test]
    fn mixed_orientation_is_not_uniform() {
        let net = theta();
        let d = DoubleTrackGraph::new(&net);
        // {c1->d2, d1->c2, d2->c1}
        let o = Orientation::from_directions([Direction::Forward, Direction::Forward, Direction::Backward]);
        assert_eq!(d.polarity_of(&o), PolarityVerdict::NotUniform { switch: SwitchId(0) });
    }

    #[test]
    fn self_loop_arcs_stay_on_one_switch() {
        use crate::model::EndKind::*;
        let net = RailNetwork::validate(&raw(
            &["s1", "s2"],
            &[
                (("s1", BranchA), ("s1", BranchB)),
                (("s1", Stem), ("s2", Stem)),
                (("s2", BranchA), ("s2", BranchB)),
            ],
        ))
        .unwrap();
        let d = DoubleTrackGraph::new(&net);
        // branch-branch loop: d(s1) -> c(s1) both ways
        assert_eq!(d.arc(ArcId(0)).tail, v(&net, "d1"));
        assert_eq!(d.arc(ArcId(0)).head, v(&net, "c1"));
        assert_eq!(d.arc(ArcId(1)).tail, v(&net, "d1"));
        assert_eq!(d.components().unwrap().count(), 1);
    }

    #[test]
    fn orientation_masks() {
        let o = Orientation::from_mask(3, 0b101);
        assert_eq!(o.direction(TrackId(0)), Direction::Backward);
        assert_eq!(o.direction(TrackId(1)), Direction::Forward);
        assert!(o.contains(ArcId(1)));
        assert!(o.contains(ArcId(2)));
        assert!(!o.contains(ArcId(3)));
        assert_eq!(o.reverse().reverse(), o);
    }
}
