// SPDX-License-Identifier: Apache-2.0

//! Exhaustive search for one-way orientations.

use thiserror::Error;

use crate::double_track::{ArcId, DoubleTrackGraph, Orientation};
use crate::exec::Execution;
use crate::model::RailNetwork;

pub const DEFAULT_ORACLE_BOUND: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{tracks} tracks exceed the enumeration bound of {bound}")]
    TooLarge { tracks: usize, bound: usize },
}

/// Whether every journey starting on an arc of `orientation` stays inside it.
///
/// A one-step check is enough: if every successor of every chosen arc is
/// chosen, no journey can leave.
pub fn is_journey_closed(graph: &DoubleTrackGraph, orientation: &Orientation) -> bool {
    orientation
        .arcs()
        .all(|a| graph.out_arcs(graph.arc(a).head).all(|b| orientation.contains(b)))
}

/// Tries all `2^tracks` orientations and returns those that are closed under
/// journeys together with their reverse, in mask order.
pub fn oracle_enumerate(net: &RailNetwork, bound: usize, exec: Execution) -> Result<Vec<Orientation>, OracleError> {
    let tracks = net.track_count();
    if tracks > bound || tracks >= 63 {
        return Err(OracleError::TooLarge { tracks, bound });
    }
    let graph = DoubleTrackGraph::new(net);
    // successor pairs (a, b): b can follow a in a journey
    let follows: Vec<(ArcId, ArcId)> = graph
        .arc_ids()
        .flat_map(|a| {
            graph
                .out_arcs(graph.arc(a).head)
                .map(move |b| (a, b))
                .collect::<Vec<_>>()
        })
        .collect();
    let chosen = |mask: u64, a: ArcId| (mask >> a.track().0 & 1) as u32 == a.0 & 1;
    let closed = |mask: u64| follows.iter().all(|&(a, b)| !chosen(mask, a) || chosen(mask, b));
    let hits = exec.map_range(0..1usize << tracks, |m| {
        let mask = m as u64;
        let reverse = !mask & ((1u64 << tracks) - 1);
        closed(mask) && closed(reverse)
    });
    Ok(hits
        .iter()
        .enumerate()
        .filter(|(_, &ok)| ok)
        .map(|(m, _)| Orientation::from_mask(tracks, m as u64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    #[test]
    fn theta_has_one_reverse_pair() {
        let net = theta();
        let found = oracle_enumerate(&net, DEFAULT_ORACLE_BOUND, Execution::Sequential).unwrap();
        assert_eq!(found.len(), 2);
        assert_eq!(found[0].reverse(), found[1]);
        let graph = DoubleTrackGraph::new(&net);
        let extracted = graph
            .extract_orientation(graph.forward_arc(crate::model::TrackId(0)))
            .unwrap();
        assert!(found.contains(&extracted));
        assert!(found.contains(&extracted.reverse()));
    }

    #[test]
    fn yin_yang_has_none() {
        let found = oracle_enumerate(&yin_yang(), DEFAULT_ORACLE_BOUND, Execution::Parallel).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn bound_is_enforced() {
        assert_eq!(
            oracle_enumerate(&theta(), 2, Execution::Sequential).unwrap_err(),
            OracleError::TooLarge { tracks: 3, bound: 2 }
        );
    }
}
