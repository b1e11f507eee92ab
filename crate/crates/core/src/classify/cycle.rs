// SPDX-License-Identifier: Apache-2.0

//! Cross-track and angle counts of cycles, state sequences, and a
//! spanning-tree cycle basis.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{track_class, TrackClass, Verdict};
use crate::model::{EndKind, EndRef, RailNetwork, SwitchId};
use crate::walk::{Walk, WalkError, WalkStep};

/// How an end is used while following a cycle: stem or branch, leaving or
/// entering a switch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSymbol {
    StemOut,
    StemIn,
    BranchOut,
    BranchIn,
}

impl StateSymbol {
    pub fn leaving(end: EndRef) -> Self {
        if end.kind.is_stem() {
            StateSymbol::StemOut
        } else {
            StateSymbol::BranchOut
        }
    }

    pub fn entering(end: EndRef) -> Self {
        if end.kind.is_stem() {
            StateSymbol::StemIn
        } else {
            StateSymbol::BranchIn
        }
    }

    /// `false` for {stem-out, branch-in}, `true` for {stem-in, branch-out}.
    ///
    /// Cross tracks and angle transits move between the two sides; parallel
    /// tracks and ordinary transits stay on one side.
    pub fn side(self) -> bool {
        matches!(self, StateSymbol::StemIn | StateSymbol::BranchOut)
    }
}

impl fmt::Display for StateSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateSymbol::StemOut => "σ_out",
            StateSymbol::StemIn => "σ_in",
            StateSymbol::BranchOut => "β_out",
            StateSymbol::BranchIn => "β_in",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleAnalysis {
    pub cycle: Walk,
    pub cross_count: usize,
    pub angle_count: usize,
    /// `2 * len + 1` symbols; the last repeats the first.
    pub state_sequence: Vec<StateSymbol>,
}

impl CycleAnalysis {
    /// Number of adjacent symbol pairs on opposite sides.
    pub fn side_changes(&self) -> usize {
        self.state_sequence
            .windows(2)
            .filter(|w| w[0].side() != w[1].side())
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("walk is not closed")]
    NotClosed,
    #[error("walk turns back through the end it arrived by at step {position}")]
    Reversal { position: usize },
    #[error("not a walk in this network: {0}")]
    NotAWalk(#[from] WalkError),
}

/// Counts cross tracks and angles of a closed walk and builds its state
/// sequence.
///
/// The walk must not leave a switch through the end it just arrived by; the
/// wrap-around switch counts like every other.
pub fn analyze_cycle(net: &RailNetwork, cycle: &Walk) -> Result<CycleAnalysis, CycleError> {
    let cycle = Walk::new(net, cycle.steps().to_vec())?;
    if !cycle.is_closed() {
        return Err(CycleError::NotClosed);
    }
    let steps = cycle.steps();
    let l = steps.len();
    let mut angle_count = 0;
    for (i, step) in steps.iter().enumerate() {
        let entry = steps[(i + l - 1) % l].entry;
        if entry == step.exit {
            return Err(CycleError::Reversal { position: i });
        }
        if entry.kind.is_branch() && step.exit.kind.is_branch() {
            angle_count += 1;
        }
    }
    let cross_count = steps
        .iter()
        .filter(|s| track_class(net.track(s.track)) == TrackClass::Cross)
        .count();
    let mut state_sequence = Vec::with_capacity(2 * l + 1);
    for s in steps {
        state_sequence.push(StateSymbol::leaving(s.exit));
        state_sequence.push(StateSymbol::entering(s.entry));
    }
    state_sequence.push(StateSymbol::leaving(steps[0].exit));
    Ok(CycleAnalysis {
        cycle,
        cross_count,
        angle_count,
        state_sequence,
    })
}

struct SpanningTree {
    /// End at each switch through which its parent edge leaves; `None` at the root.
    up: Vec<Option<EndRef>>,
    depth: Vec<u32>,
    in_tree: Vec<bool>,
}

fn bfs_tree(net: &RailNetwork) -> SpanningTree {
    let n = net.switch_count();
    let mut up = vec![None; n];
    let mut depth = vec![u32::MAX; n];
    let mut in_tree = vec![false; net.track_count()];
    let mut queue = VecDeque::from([SwitchId(0)]);
    depth[0] = 0;
    while let Some(s) = queue.pop_front() {
        for kind in EndKind::ALL {
            let end = EndRef::new(s, kind);
            let far = net.mate(end);
            let t = far.switch;
            if depth[t.index()] == u32::MAX {
                depth[t.index()] = depth[s.index()] + 1;
                up[t.index()] = Some(far);
                in_tree[net.track_at(end).index()] = true;
                queue.push_back(t);
            }
        }
    }
    SpanningTree { up, depth, in_tree }
}

/// Fundamental cycles of a breadth-first spanning tree rooted at the first
/// switch, one per non-tree track, in track order.
///
/// Each cycle starts and ends at the lowest common ancestor of the chord's
/// endpoints. Cross-track parity is additive over the cycle space (mod 2),
/// and every cycle is a sum of basis cycles, so parity over the basis
/// decides parity over all cycles.
pub fn cycle_basis(net: &RailNetwork) -> Vec<Walk> {
    let tree = bfs_tree(net);
    let up_step = |s: SwitchId| WalkStep::leaving(net, tree.up[s.index()].expect("non-root"));
    let mut basis = Vec::with_capacity(net.track_count() + 1 - net.switch_count());
    for t in net.track_ids() {
        if tree.in_tree[t.index()] {
            continue;
        }
        let chord = *net.track(t);
        let (mut u, mut v) = (chord.a.switch, chord.b.switch);
        let mut down = Vec::new(); // u up to the ancestor, reversed later
        let mut rise = Vec::new(); // v up to the ancestor
        while u != v {
            if tree.depth[u.index()] >= tree.depth[v.index()] {
                let s = up_step(u);
                u = s.entry.switch;
                down.push(s);
            } else {
                let s = up_step(v);
                v = s.entry.switch;
                rise.push(s);
            }
        }
        let steps: Vec<WalkStep> = down
            .iter()
            .rev()
            .map(|s| s.reversed())
            .chain(std::iter::once(WalkStep::leaving(net, chord.a)))
            .chain(rise)
            .collect();
        basis.push(Walk::new(net, steps).expect("fundamental cycle is a walk"));
    }
    basis
}

/// OneWay iff every fundamental cycle has an even number of angles.
pub fn classify_by_angle_basis(net: &RailNetwork) -> Verdict {
    let odd = cycle_basis(net).iter().any(|c| {
        analyze_cycle(net, c)
            .expect("fundamental cycles are closed and never reverse")
            .angle_count
            % 2
            == 1
    });
    if odd {
        Verdict::TwoWay
    } else {
        Verdict::OneWay
    }
}

/// Samples a closed walk that never turns back through its arrival end.
///
/// Starts at a random switch and end and keeps walking until it is back at
/// the start switch with a non-reversing wrap-around; each such return closes
/// the walk with probability 1/2. Gives up after `max_len` steps.
pub fn random_closed_walk<R: Rng + ?Sized>(net: &RailNetwork, rng: &mut R, max_len: usize) -> Option<Walk> {
    let start = SwitchId(rng.random_range(0..net.switch_count() as u32));
    let first = EndRef::new(start, EndKind::from_index(rng.random_range(0..3)));
    let mut steps = vec![WalkStep::leaving(net, first)];
    while steps.len() < max_len {
        let entry = steps[steps.len() - 1].entry;
        if entry.switch == start && entry != first && rng.random_bool(0.5) {
            return Some(Walk::new(net, steps).expect("sampled steps are continuous"));
        }
        let skip = rng.random_range(1..3);
        let exit = EndRef::new(entry.switch, EndKind::from_index((entry.kind.index() + skip) % 3));
        steps.push(WalkStep::leaving(net, exit));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::EndKind::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn end(net: &RailNetwork, s: &str, kind: EndKind) -> EndRef {
        EndRef::new(net.switch_by_name(s).unwrap(), kind)
    }

    #[test]
    fn yin_yang_small_cycle_has_one_cross_and_one_angle() {
        let net = yin_yang();
        // t1 (s1.stem -> s2.branch_a) then t3 (s2.branch_b -> s1.branch_b)
        let w = Walk::from_exits(&net, &[end(&net, "s1", Stem), end(&net, "s2", BranchB)]).unwrap();
        let a = analyze_cycle(&net, &w).unwrap();
        assert_eq!((a.cross_count, a.angle_count), (1, 1));
        use StateSymbol::*;
        assert_eq!(a.state_sequence, vec![StemOut, BranchIn, BranchOut, BranchIn, StemOut]);
        assert_eq!(a.side_changes(), 2);
    }

    #[test]
    fn theta_branch_cycle_has_two_angles() {
        let net = theta();
        let w = Walk::from_exits(&net, &[end(&net, "s1", BranchA), end(&net, "s2", BranchB)]).unwrap();
        let a = analyze_cycle(&net, &w).unwrap();
        assert_eq!((a.cross_count, a.angle_count), (2, 2));
        assert_eq!(a.state_sequence.len(), 5);
    }

    #[test]
    fn open_and_reversing_walks_are_rejected() {
        let net = theta();
        let open = Walk::from_exits(&net, &[end(&net, "s1", Stem)]).unwrap();
        assert_eq!(analyze_cycle(&net, &open).unwrap_err(), CycleError::NotClosed);
        let back = Walk::from_exits(&net, &[end(&net, "s1", Stem), end(&net, "s2", Stem)]).unwrap();
        assert_eq!(
            analyze_cycle(&net, &back).unwrap_err(),
            CycleError::Reversal { position: 0 }
        );
    }

    #[test]
    fn branch_self_loop_is_one_cross_one_angle() {
        let net = crate::model::RailNetwork::validate(&raw(
            &["s1", "s2"],
            &[
                (("s1", BranchA), ("s1", BranchB)),
                (("s1", Stem), ("s2", Stem)),
                (("s2", BranchA), ("s2", BranchB)),
            ],
        ))
        .unwrap();
        let w = Walk::from_exits(&net, &[end(&net, "s1", BranchA)]).unwrap();
        let a = analyze_cycle(&net, &w).unwrap();
        assert_eq!((a.cross_count, a.angle_count), (1, 1));
    }

    #[test]
    fn basis_size_and_closure() {
        for net in [theta(), yin_yang()] {
            let basis = cycle_basis(&net);
            assert_eq!(basis.len(), net.track_count() - net.switch_count() + 1);
            for c in &basis {
                assert!(c.is_closed());
                analyze_cycle(&net, c).unwrap();
            }
        }
        assert_eq!(classify_by_angle_basis(&theta()), Verdict::OneWay);
        assert_eq!(classify_by_angle_basis(&yin_yang()), Verdict::TwoWay);
    }

    #[test]
    fn random_walks_close_without_reversal() {
        let net = yin_yang();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            if let Some(w) = random_closed_walk(&net, &mut rng, 64) {
                let a = analyze_cycle(&net, &w).unwrap();
                assert_eq!(a.cross_count % 2, a.angle_count % 2);
            }
        }
    }
}
