// SPDX-License-Identifier: Apache-2.0

//! Walks along tracks and the railway-line condition.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EndRef, RailNetwork, SwitchId, TrackId};

/// One traversal of a track: leave a switch through `exit`, arrive at the
/// next switch through `entry`.
///
/// Both ends are explicit so self-loop traversals are unambiguous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WalkStep {
    pub track: TrackId,
    pub exit: EndRef,
    pub entry: EndRef,
}

impl WalkStep {
    /// The step leaving through `exit` along the track that owns it.
    pub fn leaving(net: &RailNetwork, exit: EndRef) -> Self {
        WalkStep {
            track: net.track_at(exit),
            exit,
            entry: net.mate(exit),
        }
    }

    pub fn reversed(self) -> Self {
        WalkStep {
            track: self.track,
            exit: self.entry,
            entry: self.exit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("walk has no steps")]
    Empty,
    #[error("step {position} names unknown track {track}")]
    UnknownTrack { position: usize, track: TrackId },
    #[error("step {position} ends do not match track {track}")]
    EndsMismatch { position: usize, track: TrackId },
    #[error("step {position} does not start at the switch where step {} arrived", position - 1)]
    Discontinuous { position: usize },
}

/// A sequence of neighbouring tracks `s1 t1 s2 t2 ...` with the ends used at
/// every switch.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Walk {
    steps: Vec<WalkStep>,
}

impl Walk {
    pub fn new(net: &RailNetwork, steps: Vec<WalkStep>) -> Result<Self, WalkError> {
        if steps.is_empty() {
            return Err(WalkError::Empty);
        }
        for (position, step) in steps.iter().enumerate() {
            if step.track.index() >= net.track_count() {
                return Err(WalkError::UnknownTrack {
                    position,
                    track: step.track,
                });
            }
            let track = net.track(step.track);
            if track.other_end(step.exit) != Some(step.entry) {
                return Err(WalkError::EndsMismatch {
                    position,
                    track: step.track,
                });
            }
            if position > 0 && steps[position - 1].entry.switch != step.exit.switch {
                return Err(WalkError::Discontinuous { position });
            }
        }
        Ok(Walk { steps })
    }

    /// The walk that leaves through each of `exits` in turn.
    pub fn from_exits(net: &RailNetwork, exits: &[EndRef]) -> Result<Self, WalkError> {
        Walk::new(net, exits.iter().map(|&e| WalkStep::leaving(net, e)).collect())
    }

    pub fn steps(&self) -> &[WalkStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn start(&self) -> SwitchId {
        self.steps[0].exit.switch
    }

    pub fn end(&self) -> SwitchId {
        self.steps[self.steps.len() - 1].entry.switch
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    /// The visited switches `s1 .. s(l+1)`.
    pub fn switches(&self) -> Vec<SwitchId> {
        std::iter::once(self.start())
            .chain(self.steps.iter().map(|s| s.entry.switch))
            .collect()
    }

    pub fn tracks(&self) -> impl Iterator<Item = TrackId> + '_ {
        self.steps.iter().map(|s| s.track)
    }

    pub fn reversed(&self) -> Walk {
        Walk {
            steps: self.steps.iter().rev().map(|s| s.reversed()).collect(),
        }
    }

    /// The same closed walk started at step `offset`.
    pub fn rotated(&self, offset: usize) -> Walk {
        let mut steps = self.steps.clone();
        let len = steps.len().max(1);
        steps.rotate_left(offset % len);
        Walk { steps }
    }

    /// Every interior transit enters or leaves through the stem, never both.
    ///
    /// Closed walks are not checked at the wrap-around switch; see
    /// [`Walk::is_closed_railway_line`].
    pub fn is_railway_line(&self) -> bool {
        self.steps.windows(2).all(|w| valid_transit(w[0].entry, w[1].exit))
    }

    /// [`Walk::is_railway_line`] plus the transit from the last step back
    /// into the first.
    pub fn is_closed_railway_line(&self) -> bool {
        self.is_closed()
            && self.is_railway_line()
            && valid_transit(self.steps[self.steps.len() - 1].entry, self.steps[0].exit)
    }

    pub fn display<'a>(&'a self, net: &'a RailNetwork) -> WalkDisplay<'a> {
        WalkDisplay { walk: self, net }
    }
}

#[inline]
pub(crate) fn valid_transit(entry: EndRef, exit: EndRef) -> bool {
    entry.kind.is_stem() != exit.kind.is_stem()
}

pub struct WalkDisplay<'a> {
    walk: &'a Walk,
    net: &'a RailNetwork,
}

impl fmt::Display for WalkDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.net.name(self.walk.start()))?;
        for step in &self.walk.steps {
            write!(
                f,
                " -{}[{}>{}]-> {}",
                step.track,
                step.exit.kind,
                step.entry.kind,
                self.net.name(step.entry.switch)
            )?;
        }
        Ok(())
    }
}
