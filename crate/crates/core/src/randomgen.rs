// SPDX-License-Identifier: Apache-2.0

//! Random and exhaustive generation of networks, and Monte Carlo estimates
//! over random networks.
//!
//! A random network of `n` switches is a uniformly random perfect matching
//! of its `3n` labelled ends: shuffle the ends, then pair neighbours.

use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{classify_by_parity, Verdict};
use crate::double_track::DoubleTrackGraph;
use crate::exec::Execution;
use crate::journey::is_functioning;
use crate::model::{EndRef, RailNetwork, Track};

/// Redraws allowed per sample when disconnected draws are rejected.
pub const REJECTION_BUDGET: usize = 1000;

/// Largest switch count [`enumerate_networks`] accepts by default.
pub const DEFAULT_ENUMERATION_BOUND: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("switch count must be even and positive, got {0}")]
    InvalidSwitchCount(usize),
    #[error("sample count must be positive")]
    NoSamples,
    #[error("no connected network after {attempts} draws at {switches} switches")]
    RejectionBudgetExceeded { switches: usize, attempts: usize },
    #[error("enumerating {switches} switches exceeds the bound of {bound}")]
    BoundExceeded { switches: usize, bound: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisconnectedPolicy {
    /// Redraw until connected.
    #[default]
    Reject,
    /// Keep disconnected draws as they are.
    Keep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub switch_count: usize,
    pub seed: u64,
    pub disconnected_policy: DisconnectedPolicy,
    pub sample_count: usize,
}

impl GenConfig {
    pub fn new(switch_count: usize, seed: u64, sample_count: usize) -> Self {
        GenConfig {
            switch_count,
            seed,
            disconnected_policy: DisconnectedPolicy::Reject,
            sample_count,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.switch_count == 0 || self.switch_count % 2 == 1 {
            return Err(GenError::InvalidSwitchCount(self.switch_count));
        }
        if self.sample_count == 0 {
            return Err(GenError::NoSamples);
        }
        Ok(())
    }
}

/// A perfect matching of the `3n` ends of `n` switches, by end index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pairing {
    mate: Vec<u32>,
}

impl Pairing {
    /// Panics unless `mate` is an involution without fixed points on `3n` ends.
    pub fn from_mates(mate: Vec<u32>) -> Self {
        assert_eq!(mate.len() % 3, 0, "end count must be a multiple of 3");
        for (i, &j) in mate.iter().enumerate() {
            assert!(
                j as usize != i && mate[j as usize] as usize == i,
                "not a perfect matching"
            );
        }
        Pairing { mate }
    }

    pub fn switch_count(&self) -> usize {
        self.mate.len() / 3
    }

    pub fn mate(&self, end: usize) -> usize {
        self.mate[end] as usize
    }

    /// Switch index of each switch's component, numbered by first switch.
    pub fn component_labels(&self) -> (Vec<u32>, usize) {
        let n = self.switch_count();
        let mut label = vec![u32::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for root in 0..n {
            if label[root] != u32::MAX {
                continue;
            }
            label[root] = count;
            stack.push(root);
            while let Some(s) = stack.pop() {
                for e in 3 * s..3 * s + 3 {
                    let t = self.mate(e) / 3;
                    if label[t] == u32::MAX {
                        label[t] = count;
                        stack.push(t);
                    }
                }
            }
            count += 1;
        }
        (label, count as usize)
    }

    pub fn is_connected(&self) -> bool {
        self.component_labels().1 == 1
    }

    /// The network on switches `s1..sn`, with one track per pair in order
    /// of its lower end.
    pub fn to_network(&self) -> Option<RailNetwork> {
        let tracks = (0..self.mate.len())
            .filter(|&e| e < self.mate(e))
            .map(|e| Track::new(EndRef::from_index(e), EndRef::from_index(self.mate(e))))
            .collect();
        RailNetwork::from_tracks(switch_names(self.switch_count()), tracks).ok()
    }

    /// One network per connected component.
    pub fn component_networks(&self) -> Vec<RailNetwork> {
        let (label, count) = self.component_labels();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
        for (s, &c) in label.iter().enumerate() {
            members[c as usize].push(s);
        }
        members
            .iter()
            .map(|switches| {
                let mut local = vec![0usize; self.switch_count()];
                for (i, &s) in switches.iter().enumerate() {
                    local[s] = i;
                }
                let relabel = |e: usize| 3 * local[e / 3] + e % 3;
                let mate = switches
                    .iter()
                    .flat_map(|&s| 3 * s..3 * s + 3)
                    .map(|e| relabel(self.mate(e)) as u32)
                    .collect();
                Pairing { mate }.to_network().expect("component is connected")
            })
            .collect()
    }
}

/// `s1..sn`, zero-padded so that name order is numeric order.
pub fn switch_names(n: usize) -> Vec<String> {
    let width = n.to_string().len();
    (1..=n).map(|i| format!("s{i:0width$}")).collect()
}

/// A uniformly random perfect matching on the ends of `n` switches.
pub fn random_pairing<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Pairing {
    let mut ends: Vec<u32> = (0..3 * n as u32).collect();
    ends.shuffle(rng);
    let mut mate = vec![0u32; ends.len()];
    for pair in ends.chunks_exact(2) {
        mate[pair[0] as usize] = pair[1];
        mate[pair[1] as usize] = pair[0];
    }
    Pairing { mate }
}

/// One draw of [`random_network`].
#[derive(Clone, Debug)]
pub struct Sample {
    pub pairing: Pairing,
    /// `None` for a disconnected draw kept under [`DisconnectedPolicy::Keep`].
    pub network: Option<RailNetwork>,
    /// Disconnected draws thrown away before this one.
    pub redraws: usize,
}

/// The generator behind sample `sample_index` of `cfg`.
pub fn sample_rng(cfg: &GenConfig, sample_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(sample_index);
    rng
}

pub fn random_network(cfg: &GenConfig, sample_index: u64) -> Result<Sample, GenError> {
    cfg.validate()?;
    let mut rng = sample_rng(cfg, sample_index);
    for redraws in 0..=REJECTION_BUDGET {
        let pairing = random_pairing(cfg.switch_count, &mut rng);
        let network = pairing.to_network();
        if network.is_some() || cfg.disconnected_policy == DisconnectedPolicy::Keep {
            return Ok(Sample {
                pairing,
                network,
                redraws,
            });
        }
    }
    Err(GenError::RejectionBudgetExceeded {
        switches: cfg.switch_count,
        attempts: REJECTION_BUDGET + 1,
    })
}

/// One matching produced by [`enumerate_networks`].
#[derive(Clone, Debug)]
pub struct Enumerated {
    pub pairing: Pairing,
    /// `None` when the matching is disconnected.
    pub network: Option<RailNetwork>,
}

/// Every perfect matching on the ends of `n` switches, each exactly once,
/// in lexicographic order of the mate array.
pub fn enumerate_networks(n: usize, bound: usize) -> Result<impl Iterator<Item = Enumerated>, GenError> {
    if n == 0 || n % 2 == 1 {
        return Err(GenError::InvalidSwitchCount(n));
    }
    if n > bound {
        return Err(GenError::BoundExceeded { switches: n, bound });
    }
    Ok(MatchingIter::new(3 * n).map(|mate| {
        let pairing = Pairing { mate };
        let network = pairing.to_network();
        Enumerated { pairing, network }
    }))
}

/// Depth-first enumeration of perfect matchings: the lowest unmatched end is
/// paired with each higher unmatched end in turn.
struct MatchingIter {
    mate: Vec<u32>,
    /// Per level: the end being matched and the partner last tried.
    stack: Vec<(u32, u32)>,
    started: bool,
}

const FREE: u32 = u32::MAX;

impl MatchingIter {
    fn new(ends: usize) -> Self {
        MatchingIter {
            mate: vec![FREE; ends],
            stack: Vec::with_capacity(ends / 2),
            started: false,
        }
    }

    fn lowest_free(&self) -> Option<u32> {
        self.mate.iter().position(|&m| m == FREE).map(|i| i as u32)
    }

    /// Tries partners of `low` after `after`; pushes a level on success.
    fn advance(&mut self, low: u32, after: u32) -> bool {
        let next = (after + 1..self.mate.len() as u32).find(|&j| self.mate[j as usize] == FREE);
        match next {
            Some(j) => {
                self.mate[low as usize] = j;
                self.mate[j as usize] = low;
                self.stack.push((low, j));
                true
            }
            None => false,
        }
    }

    /// Fills the remaining levels with their first choices.
    fn descend(&mut self) {
        while let Some(low) = self.lowest_free() {
            let ok = self.advance(low, low);
            debug_assert!(ok, "an even number of free ends always pairs");
        }
    }
}

impl Iterator for MatchingIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if !self.started {
            self.started = true;
            self.descend();
            return Some(self.mate.clone());
        }
        while let Some((low, j)) = self.stack.pop() {
            self.mate[low as usize] = FREE;
            self.mate[j as usize] = FREE;
            if self.advance(low, j) {
                self.descend();
                return Some(self.mate.clone());
            }
        }
        None
    }
}

/// Per-size results of [`monte_carlo`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeEstimate {
    pub switch_count: usize,
    pub samples_used: usize,
    pub rejected_disconnected: usize,
    pub p_functioning: f64,
    pub p_oneway: f64,
    /// Absent when no sample functions.
    pub p_oneway_given_functioning: Option<f64>,
    /// Binomial standard error of `p_functioning`.
    pub standard_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub per_size: Vec<SizeEstimate>,
}

pub const CSV_HEADER: &str = "size,samples,rejected,p_functioning,p_oneway,p_oneway_given_functioning,stderr";

impl MonteCarloReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.per_size {
            let given = r
                .p_oneway_given_functioning
                .map(|p| format!("{p:.6}"))
                .unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{:.6},{:.6},{},{:.6}",
                r.switch_count,
                r.samples_used,
                r.rejected_disconnected,
                r.p_functioning,
                r.p_oneway,
                given,
                r.standard_error
            )
            .expect("writing to a string");
        }
        out
    }
}

impl fmt::Display for MonteCarloReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>8} {:>8} {:>9} {:>13} {:>9} {:>13} {:>9}",
            "size", "samples", "rejected", "p_functioning", "p_oneway", "p_oneway|func", "stderr"
        )?;
        for r in &self.per_size {
            let given = r
                .p_oneway_given_functioning
                .map(|p| format!("{p:.4}"))
                .unwrap_or_else(|| "-".into());
            writeln!(
                f,
                "{:>8} {:>8} {:>9} {:>13.4} {:>9.4} {:>13} {:>9.4}",
                r.switch_count,
                r.samples_used,
                r.rejected_disconnected,
                r.p_functioning,
                r.p_oneway,
                given,
                r.standard_error
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Outcome {
    functioning: bool,
    one_way: bool,
    redraws: usize,
    disconnected: bool,
}

fn one_way(net: &RailNetwork) -> bool {
    classify_by_parity(net).verdict == Verdict::OneWay
}

fn evaluate(cfg: &GenConfig, index: u64) -> Result<Outcome, GenError> {
    let sample = random_network(cfg, index)?;
    Ok(match &sample.network {
        Some(net) => Outcome {
            functioning: is_functioning(&DoubleTrackGraph::new(net)),
            one_way: one_way(net),
            redraws: sample.redraws,
            disconnected: false,
        },
        // A train never leaves its component, so a disconnected network
        // cannot function. It is one-way iff every component is.
        None => Outcome {
            functioning: false,
            one_way: sample.pairing.component_networks().iter().all(one_way),
            redraws: sample.redraws,
            disconnected: true,
        },
    })
}

/// Estimates, per configuration, how often random networks function and how
/// often they are one-way. The result does not depend on `exec`.
pub fn monte_carlo(sweep: &[GenConfig], exec: Execution) -> Result<MonteCarloReport, GenError> {
    let mut per_size = Vec::with_capacity(sweep.len());
    for cfg in sweep {
        cfg.validate()?;
        let outcomes = exec
            .map_range(0..cfg.sample_count, |i| evaluate(cfg, i as u64))
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        let n = outcomes.len();
        let functioning = outcomes.iter().filter(|o| o.functioning).count();
        let one_way = outcomes.iter().filter(|o| o.one_way).count();
        let both = outcomes.iter().filter(|o| o.one_way && o.functioning).count();
        let rejected_disconnected = match cfg.disconnected_policy {
            DisconnectedPolicy::Reject => outcomes.iter().map(|o| o.redraws).sum(),
            DisconnectedPolicy::Keep => outcomes.iter().filter(|o| o.disconnected).count(),
        };
        let p = functioning as f64 / n as f64;
        per_size.push(SizeEstimate {
            switch_count: cfg.switch_count,
            samples_used: n,
            rejected_disconnected,
            p_functioning: p,
            p_oneway: one_way as f64 / n as f64,
            p_oneway_given_functioning: (functioning > 0).then(|| both as f64 / functioning as f64),
            standard_error: (p * (1.0 - p) / n as f64).sqrt(),
        });
    }
    Ok(MonteCarloReport { per_size })
}
