// SPDX-License-Identifier: Apache-2.0

//! Switches, switch ends, tracks and validated rail networks.
//!
//! A rail network is a 3-regular connected multigraph: every switch has one
//! stem end and two branch ends, and every end is paired with exactly one
//! other end by a track. Self-loop tracks (both ends on one switch) and
//! repeated tracks between the same pair of switches are allowed.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a switch inside a [`RailNetwork`].
///
/// Switches are numbered in lexicographic order of their names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SwitchId(pub u32);

impl SwitchId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of a track inside a [`RailNetwork`], in input order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrackId(pub u32);

impl TrackId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TrackId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0 + 1)
    }
}

impl std::str::FromStr for TrackId {
    type Err = String;

    /// Parses the one-based `t<n>` form.
    fn from_str(s: &str) -> Result<Self, String> {
        s.strip_prefix('t')
            .and_then(|n| n.parse::<u32>().ok())
            .filter(|&n| n >= 1)
            .map(|n| TrackId(n - 1))
            .ok_or_else(|| format!("expected a track like `t1`, got `{s}`"))
    }
}

/// The three ends of a Y-switch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndKind {
    Stem,
    BranchA,
    BranchB,
}

impl EndKind {
    pub const ALL: [EndKind; 3] = [EndKind::Stem, EndKind::BranchA, EndKind::BranchB];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            EndKind::Stem => 0,
            EndKind::BranchA => 1,
            EndKind::BranchB => 2,
        }
    }

    #[inline]
    pub fn from_index(index: usize) -> EndKind {
        Self::ALL[index]
    }

    #[inline]
    pub fn is_stem(self) -> bool {
        self == EndKind::Stem
    }

    #[inline]
    pub fn is_branch(self) -> bool {
        self != EndKind::Stem
    }

    /// Swaps the two branch ends; the stem maps to itself.
    pub fn swap_branches(self) -> EndKind {
        match self {
            EndKind::Stem => EndKind::Stem,
            EndKind::BranchA => EndKind::BranchB,
            EndKind::BranchB => EndKind::BranchA,
        }
    }

    /// Name used in network documents.
    pub fn name(self) -> &'static str {
        match self {
            EndKind::Stem => "stem",
            EndKind::BranchA => "branch_a",
            EndKind::BranchB => "branch_b",
        }
    }

    pub fn from_name(name: &str) -> Option<EndKind> {
        match name {
            "stem" => Some(EndKind::Stem),
            "branch_a" => Some(EndKind::BranchA),
            "branch_b" => Some(EndKind::BranchB),
            _ => None,
        }
    }
}

impl fmt::Display for EndKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One end of one switch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EndRef {
    pub switch: SwitchId,
    pub kind: EndKind,
}

impl EndRef {
    pub fn new(switch: SwitchId, kind: EndKind) -> Self {
        EndRef { switch, kind }
    }

    /// Dense index `3 * switch + kind`.
    #[inline]
    pub fn index(self) -> usize {
        self.switch.index() * 3 + self.kind.index()
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        EndRef {
            switch: SwitchId((index / 3) as u32),
            kind: EndKind::from_index(index % 3),
        }
    }
}

/// An unordered pair of distinct ends.
///
/// The stored order `a`, `b` is kept because it names the forward direction
/// of the track, but equality and hashing ignore it.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Track {
    pub a: EndRef,
    pub b: EndRef,
}

impl Track {
    pub fn new(a: EndRef, b: EndRef) -> Self {
        Track { a, b }
    }

    /// The ends ordered by switch, then `Stem < BranchA < BranchB`.
    pub fn canonical(&self) -> (EndRef, EndRef) {
        if self.a <= self.b {
            (self.a, self.b)
        } else {
            (self.b, self.a)
        }
    }

    pub fn is_self_loop(&self) -> bool {
        self.a.switch == self.b.switch
    }

    /// The end paired with `end`, if `end` belongs to this track.
    pub fn other_end(&self, end: EndRef) -> Option<EndRef> {
        if end == self.a {
            Some(self.b)
        } else if end == self.b {
            Some(self.a)
        } else {
            None
        }
    }
}

impl PartialEq for Track {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for Track {}

impl Hash for Track {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state);
    }
}

/// An end named by switch name, as read from a document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawEnd {
    pub switch: String,
    pub kind: EndKind,
}

impl RawEnd {
    pub fn new(switch: impl Into<String>, kind: EndKind) -> Self {
        RawEnd {
            switch: switch.into(),
            kind,
        }
    }
}

impl fmt::Display for RawEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.switch, self.kind)
    }
}

/// An unvalidated network description.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawNetwork {
    pub switches: Vec<String>,
    pub tracks: Vec<(RawEnd, RawEnd)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("network has no switches")]
    Empty,
    #[error("switch `{0}` is declared more than once")]
    DuplicateSwitch(String),
    #[error("unknown switch `{0}`")]
    UnknownSwitch(String),
    #[error("{0} switches cannot be perfectly paired (3 ends each, count must be even)")]
    OddSwitchCount(usize),
    #[error("track {track} pairs end {end} with itself")]
    SelfPairedEnd { track: TrackId, end: String },
    #[error("end {end} appears in tracks {first} and {second}")]
    DuplicateEnd {
        end: String,
        first: TrackId,
        second: TrackId,
    },
    #[error("end {end} belongs to no track")]
    MissingEnd { end: String },
    #[error("network is disconnected ({components} components)")]
    Disconnected { components: usize },
}

/// A validated rail network. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RailNetwork {
    names: Vec<String>,
    tracks: Vec<Track>,
    /// Track owning each end, indexed by [`EndRef::index`].
    track_at: Vec<TrackId>,
}

impl RailNetwork {
    /// Resolves names and checks the perfect-pairing and connectivity axioms.
    pub fn validate(raw: &RawNetwork) -> Result<Self, NetworkError> {
        if raw.switches.is_empty() {
            return Err(NetworkError::Empty);
        }
        let mut names = raw.switches.clone();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(NetworkError::DuplicateSwitch(w[0].clone()));
        }
        let lookup: HashMap<&str, SwitchId> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), SwitchId(i as u32)))
            .collect();
        let resolve = |end: &RawEnd| -> Result<EndRef, NetworkError> {
            lookup
                .get(end.switch.as_str())
                .map(|&switch| EndRef::new(switch, end.kind))
                .ok_or_else(|| NetworkError::UnknownSwitch(end.switch.clone()))
        };
        let tracks = raw
            .tracks
            .iter()
            .map(|(a, b)| Ok(Track::new(resolve(a)?, resolve(b)?)))
            .collect::<Result<Vec<_>, NetworkError>>()?;
        Self::assemble(names, tracks)
    }

    /// Builds a network from tracks over already-numbered switches.
    ///
    /// `names[i]` names `SwitchId(i)`. Names need not be sorted; ids are
    /// renumbered so that switch order is lexicographic.
    pub fn from_tracks(names: Vec<String>, tracks: Vec<Track>) -> Result<Self, NetworkError> {
        if names.is_empty() {
            return Err(NetworkError::Empty);
        }
        if let Some(t) = tracks
            .iter()
            .flat_map(|t| [t.a, t.b])
            .find(|e| e.switch.index() >= names.len())
        {
            return Err(NetworkError::UnknownSwitch(format!("#{}", t.switch.0)));
        }
        if names.windows(2).all(|w| w[0] < w[1]) {
            return Self::assemble(names, tracks);
        }
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by(|&x, &y| names[x].cmp(&names[y]));
        let mut new_id = vec![0u32; names.len()];
        for (new, &old) in order.iter().enumerate() {
            new_id[old] = new as u32;
        }
        let remap = |e: EndRef| EndRef::new(SwitchId(new_id[e.switch.index()]), e.kind);
        let sorted_names: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
        if let Some(w) = sorted_names.windows(2).find(|w| w[0] == w[1]) {
            return Err(NetworkError::DuplicateSwitch(w[0].clone()));
        }
        let tracks = tracks.into_iter().map(|t| Track::new(remap(t.a), remap(t.b))).collect();
        Self::assemble(sorted_names, tracks)
    }

    fn assemble(names: Vec<String>, tracks: Vec<Track>) -> Result<Self, NetworkError> {
        let n = names.len();
        if n % 2 == 1 {
            return Err(NetworkError::OddSwitchCount(n));
        }
        let end_name = |e: EndRef| format!("{}.{}", names[e.switch.index()], e.kind);
        let mut track_at: Vec<Option<TrackId>> = vec![None; 3 * n];
        for (i, t) in tracks.iter().enumerate() {
            let id = TrackId(i as u32);
            if t.a == t.b {
                return Err(NetworkError::SelfPairedEnd {
                    track: id,
                    end: end_name(t.a),
                });
            }
            for e in [t.a, t.b] {
                if let Some(first) = track_at[e.index()] {
                    return Err(NetworkError::DuplicateEnd {
                        end: end_name(e),
                        first,
                        second: id,
                    });
                }
                track_at[e.index()] = Some(id);
            }
        }
        let track_at = track_at
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                t.ok_or_else(|| NetworkError::MissingEnd {
                    end: end_name(EndRef::from_index(i)),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let net = RailNetwork {
            names,
            tracks,
            track_at,
        };
        let components = net.count_components();
        if components != 1 {
            return Err(NetworkError::Disconnected { components });
        }
        Ok(net)
    }

    fn count_components(&self) -> usize {
        let n = self.switch_count();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        let mut components = 0;
        for root in 0..n {
            if seen[root] {
                continue;
            }
            components += 1;
            seen[root] = true;
            queue.push_back(SwitchId(root as u32));
            while let Some(s) = queue.pop_front() {
                for kind in EndKind::ALL {
                    let next = self.mate(EndRef::new(s, kind)).switch;
                    if !seen[next.index()] {
                        seen[next.index()] = true;
                        queue.push_back(next);
                    }
                }
            }
        }
        components
    }

    pub fn switch_count(&self) -> usize {
        self.names.len()
    }

    pub fn track_count(&self) -> usize {
        self.tracks.len()
    }

    pub fn switches(&self) -> impl ExactSizeIterator<Item = SwitchId> + '_ {
        (0..self.names.len() as u32).map(SwitchId)
    }

    pub fn track_ids(&self) -> impl ExactSizeIterator<Item = TrackId> + '_ {
        (0..self.tracks.len() as u32).map(TrackId)
    }

    pub fn name(&self, switch: SwitchId) -> &str {
        &self.names[switch.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn switch_by_name(&self, name: &str) -> Option<SwitchId> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(|i| SwitchId(i as u32))
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn track(&self, id: TrackId) -> &Track {
        &self.tracks[id.index()]
    }

    /// The track that owns `end`.
    #[inline]
    pub fn track_at(&self, end: EndRef) -> TrackId {
        self.track_at[end.index()]
    }

    /// The end joined to `end` by its track.
    #[inline]
    pub fn mate(&self, end: EndRef) -> EndRef {
        let t = &self.tracks[self.track_at(end).index()];
        if t.a == end {
            t.b
        } else {
            t.a
        }
    }

    pub fn end_label(&self, end: EndRef) -> String {
        format!("{}.{}", self.name(end.switch), end.kind)
    }

    /// Exchanges the two branch ends of `switch` in every track.
    pub fn branch_swap(&self, switch: &str) -> Result<RailNetwork, NetworkError> {
        let s = self
            .switch_by_name(switch)
            .ok_or_else(|| NetworkError::UnknownSwitch(switch.to_owned()))?;
        let swap = |e: EndRef| {
            if e.switch == s {
                EndRef::new(s, e.kind.swap_branches())
            } else {
                e
            }
        };
        let tracks: Vec<Track> = self.tracks.iter().map(|t| Track::new(swap(t.a), swap(t.b))).collect();
        let mut track_at = self.track_at.clone();
        for (i, t) in tracks.iter().enumerate() {
            track_at[t.a.index()] = TrackId(i as u32);
            track_at[t.b.index()] = TrackId(i as u32);
        }
        Ok(RailNetwork {
            names: self.names.clone(),
            tracks,
            track_at,
        })
    }

    pub fn to_raw(&self) -> RawNetwork {
        let raw_end = |e: EndRef| RawEnd::new(self.name(e.switch), e.kind);
        RawNetwork {
            switches: self.names.clone(),
            tracks: self.tracks.iter().map(|t| (raw_end(t.a), raw_end(t.b))).collect(),
        }
    }
}
