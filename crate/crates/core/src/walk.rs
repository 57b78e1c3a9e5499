//! Life segment generation along a downward tree path.
//!
//! Walking a path top to bottom, the occurrence set only shrinks: entering
//! the next node deletes every position that branches off. Deleting one
//! position `x` with alive neighbours `p < x < s` closes the pairs `(p, x)`
//! and `(x, s)` and opens `(p, s)`. Each pair's tenure over a contiguous
//! range of path depths becomes one [`LifeSegment`].
//!
//! A walk can be capped at `tau` tracked pairs: the window keeps the best
//! `tau` by the mode's order and spills the rest to an overflow set, so the
//! emitted segments describe exactly the top-`tau` pairs at every depth.
//! When one transition both closes and reopens a pair's window membership,
//! the close is cancelled instead of splitting its segment in two.

use crate::plist::LifeSegment;
use crate::text::{NodeId, TextIndex};
use std::collections::{BTreeMap, BTreeSet};

/// Which consecutive occurrence pairs a structure keeps and how they rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// All pairs, smallest distance first.
    Closest,
    /// All pairs, largest distance first.
    Farthest,
    /// Pairs with distance >= the bound, smallest first.
    ClosestMinGap(u64),
    /// Pairs with distance <= the bound, largest first.
    FarthestMaxGap(u64),
}

impl Mode {
    pub(crate) fn eligible(self, dist: u64) -> bool {
        match self {
            Mode::Closest | Mode::Farthest => true,
            Mode::ClosestMinGap(alpha) => dist >= alpha,
            Mode::FarthestMaxGap(beta) => dist <= beta,
        }
    }

    pub(crate) fn far(self) -> bool {
        matches!(self, Mode::Farthest | Mode::FarthestMaxGap(_))
    }

    /// Ranking key, best first: distance, then leftmost pair.
    pub(crate) fn key(self, i: u64, j: u64) -> (u64, u64, u64) {
        let d = j - i;
        if self.far() {
            (!d, i, j)
        } else {
            (d, i, j)
        }
    }
}

pub(crate) fn pack_pair(i: u64, j: u64) -> u64 {
    debug_assert!(i < (1 << 32) && j < (1 << 32));
    (i << 32) | j
}

pub(crate) fn unpack_pair(payload: u64) -> (usize, usize) {
    ((payload >> 32) as usize, (payload & 0xFFFF_FFFF) as usize)
}

const NONE: u32 = u32::MAX;

/// Tracks the top-`tau` eligible pairs across one walk.
struct PairWindow {
    mode: Mode,
    tau: usize,
    /// key -> first depth of the current tenure.
    stored: BTreeMap<(u64, u64, u64), u32>,
    /// Eligible pairs currently outside the top `tau`.
    overflow: BTreeSet<(u64, u64, u64)>,
    /// Tenures ended during the current transition; resurrected on re-entry.
    pending: BTreeMap<(u64, u64, u64), u32>,
    segments: Vec<LifeSegment>,
}

impl PairWindow {
    fn new(mode: Mode, tau: usize) -> Self {
        assert!(tau >= 1, "window capacity starts at 1");
        PairWindow {
            mode,
            tau,
            stored: BTreeMap::new(),
            overflow: BTreeSet::new(),
            pending: BTreeMap::new(),
            segments: Vec::new(),
        }
    }

    fn emit(&mut self, key: (u64, u64, u64), start: u32, end: u32) {
        if start > end {
            // Tenure opened and closed inside one transition.
            return;
        }
        let (_, i, j) = key;
        self.segments.push(LifeSegment { x: j - i, start, end, payload: pack_pair(i, j) });
    }

    /// Pair `(i, j)` comes alive at depth `t`.
    fn add(&mut self, i: u64, j: u64, t: u32) {
        if !self.mode.eligible(j - i) {
            return;
        }
        let key = self.mode.key(i, j);
        let resumed = self.pending.remove(&key);
        if self.stored.len() < self.tau {
            debug_assert!(self.overflow.is_empty());
            self.stored.insert(key, resumed.unwrap_or(t));
            return;
        }
        let worst = *self.stored.keys().next_back().expect("window is full");
        if key < worst {
            let (wkey, wstart) = self.stored.pop_last().expect("window is full");
            let stale = self.pending.insert(wkey, wstart);
            debug_assert!(stale.is_none());
            self.overflow.insert(wkey);
            self.stored.insert(key, resumed.unwrap_or(t));
        } else {
            if let Some(start) = resumed {
                // Re-added but no longer in the window: the old tenure ends.
                self.emit(key, start, t - 1);
            }
            self.overflow.insert(key);
        }
    }

    /// Pair `(i, j)` dies at depth `t` (last alive depth `t - 1`).
    fn remove(&mut self, i: u64, j: u64, t: u32) {
        if !self.mode.eligible(j - i) {
            return;
        }
        let key = self.mode.key(i, j);
        if self.overflow.remove(&key) {
            // A pending eviction record for it, if any, still emits later.
            return;
        }
        let start = self.stored.remove(&key).expect("tracked pair expected in window");
        let stale = self.pending.insert(key, start);
        debug_assert!(stale.is_none());
        if let Some(best) = self.overflow.pop_first() {
            let resumed = self.pending.remove(&best);
            self.stored.insert(best, resumed.unwrap_or(t));
        }
    }

    /// Ends a transition into depth `last_alive + 1`.
    fn flush(&mut self, last_alive: u32) {
        let pending = std::mem::take(&mut self.pending);
        for (key, start) in pending {
            self.emit(key, start, last_alive);
        }
    }

    fn finish(mut self, last_depth: u32) -> Vec<LifeSegment> {
        debug_assert!(self.pending.is_empty());
        let stored = std::mem::take(&mut self.stored);
        for (key, start) in stored {
            self.emit(key, start, last_depth);
        }
        self.segments
    }
}

/// Generates the life segments of `path`, top node first. Depths are
/// 1-based path positions. `tau` of `None` tracks every eligible pair.
///
/// Occurrence sets come from the global suffix array ranges, so the walk is
/// correct even when the path is a cluster spine and off-path subtrees
/// belong to other clusters.
pub(crate) fn path_life_segments(
    index: &TextIndex,
    path: &[NodeId],
    mode: Mode,
    tau: Option<usize>,
) -> Vec<LifeSegment> {
    assert!(!path.is_empty(), "a path has at least its top node");
    let n = index.n();
    let top = index.node(path[0]);
    let mut occ: Vec<u32> = index.sa()[top.sa_start as usize..top.sa_end as usize]
        .iter()
        .copied()
        .filter(|&p| (p as usize) < n)
        .collect();
    occ.sort_unstable();

    let mut window = PairWindow::new(mode, tau.unwrap_or(usize::MAX));

    // Seed the window with the top node's pairs directly: best tau stored
    // since depth 1, the rest in overflow.
    let mut seed: Vec<(u64, u64, u64)> = occ
        .windows(2)
        .map(|w| (w[0] as u64, w[1] as u64))
        .filter(|&(i, j)| mode.eligible(j - i))
        .map(|(i, j)| mode.key(i, j))
        .collect();
    seed.sort_unstable();
    for (rank, key) in seed.into_iter().enumerate() {
        if rank < window.tau {
            window.stored.insert(key, 1);
        } else {
            window.overflow.insert(key);
        }
    }

    let mut prev: Vec<u32> = (0..occ.len() as u32).map(|r| r.wrapping_sub(1)).collect();
    let mut next: Vec<u32> =
        (0..occ.len() as u32).map(|r| if r + 1 < occ.len() as u32 { r + 1 } else { NONE }).collect();
    if !prev.is_empty() {
        prev[0] = NONE;
    }

    for depth in 1..path.len() {
        let cur = index.node(path[depth - 1]);
        let nxt = index.node(path[depth]);
        debug_assert_eq!(nxt.parent, path[depth - 1], "path nodes are parent and child");
        let t = depth as u32 + 1;

        let mut dying: Vec<u32> = index.sa()[cur.sa_start as usize..nxt.sa_start as usize]
            .iter()
            .chain(&index.sa()[nxt.sa_end as usize..cur.sa_end as usize])
            .copied()
            .filter(|&p| (p as usize) < n)
            .collect();
        dying.sort_unstable();

        for pos in dying {
            let r = occ.binary_search(&pos).expect("dying position is in the top set") as u32;
            let (pr, nx) = (prev[r as usize], next[r as usize]);
            if pr != NONE {
                window.remove(occ[pr as usize] as u64, pos as u64, t);
            }
            if nx != NONE {
                window.remove(pos as u64, occ[nx as usize] as u64, t);
            }
            if pr != NONE && nx != NONE {
                window.add(occ[pr as usize] as u64, occ[nx as usize] as u64, t);
            }
            if pr != NONE {
                next[pr as usize] = nx;
            }
            if nx != NONE {
                prev[nx as usize] = pr;
            }
        }
        window.flush(depth as u32);
    }

    window.finish(path.len() as u32)
}
