//! Queries beyond top-k closest: farthest pairs, distance bands with one
//! fixed bound, and non-overlapping pairs.
//!
//! Band queries carry one bound chosen at build time and take the other at
//! query time. A min-gap store keeps pairs at distance `>= alpha` ascending
//! and answers `[alpha, beta]` for any `beta`; a max-gap store keeps pairs
//! at distance `<= beta` descending and answers `[alpha, beta]` for any
//! `alpha`. Non-overlapping pairs are the max-gap band `[|P|, n]`, so they
//! ride a max-gap store built with bound `n`.

use crate::cluster::{RecursiveIndex, Trace};
use crate::error::Error;
use crate::heavy::FullIndex;
use crate::pairs::ConsecutivePair;
use crate::plist::QueryStats;
use crate::walk::{unpack_pair, Mode};

impl FullIndex {
    /// The `k` farthest pairs of `pattern`, farthest first, ties leftmost.
    /// Needs the index built with the farthest family.
    pub fn query_topk_far(
        &self,
        pattern: &[u8],
        k: usize,
    ) -> Result<Vec<ConsecutivePair>, Error> {
        let mut stats = QueryStats::default();
        self.query_topk_far_with_stats(pattern, k, &mut stats)
    }

    pub fn query_topk_far_with_stats(
        &self,
        pattern: &[u8],
        k: usize,
        stats: &mut QueryStats,
    ) -> Result<Vec<ConsecutivePair>, Error> {
        let far = self
            .farthest
            .as_ref()
            .ok_or(Error::ModeUnavailable("farthest pair order not built"))?;
        let Some(locus) = self.index.locus(pattern) else {
            return Ok(Vec::new());
        };
        let (path, depth) = self.decomposition.locate(locus.node);
        let entries = far[path]
            .largest_segments(depth, k, stats)
            .expect("locus depth is on its heavy path");
        Ok(entries
            .into_iter()
            .map(|(_, payload)| {
                let (i, j) = unpack_pair(payload);
                ConsecutivePair::new(i, j)
            })
            .collect())
    }
}

impl RecursiveIndex {
    /// The `k` farthest pairs of `pattern`, farthest first, ties leftmost.
    pub fn query_topk_far(
        &self,
        pattern: &[u8],
        k: usize,
    ) -> Result<Vec<ConsecutivePair>, Error> {
        self.query_topk_far_traced(pattern, k).map(|(pairs, _)| pairs)
    }

    pub fn query_topk_far_traced(
        &self,
        pattern: &[u8],
        k: usize,
    ) -> Result<(Vec<ConsecutivePair>, Trace), Error> {
        let slot = self.slot_exact(Mode::Farthest, "farthest pair order not built")?;
        let mut trace = Trace::default();
        let pairs = self.topk_on_slot(slot, pattern, k, &mut trace);
        Ok((pairs, trace))
    }

    /// All pairs at distance in `[alpha, beta]` where `alpha` was fixed at
    /// build time, ascending by (distance, left).
    pub fn query_gap_with_beta(
        &self,
        pattern: &[u8],
        beta: u64,
    ) -> Result<Vec<ConsecutivePair>, Error> {
        self.query_gap_with_beta_traced(pattern, beta).map(|(pairs, _)| pairs)
    }

    pub fn query_gap_with_beta_traced(
        &self,
        pattern: &[u8],
        beta: u64,
    ) -> Result<(Vec<ConsecutivePair>, Trace), Error> {
        let slot = self.slot_where(
            |m| matches!(m, Mode::ClosestMinGap(_)),
            "min-gap band order not built",
        )?;
        let Mode::ClosestMinGap(alpha) = self.modes[slot] else { unreachable!() };
        if beta < alpha {
            return Err(Error::InvalidGapRange { alpha, beta });
        }
        let mut trace = Trace::default();
        let pairs = self.band_on_slot(slot, pattern, alpha, beta, &mut trace);
        Ok((pairs, trace))
    }

    /// All pairs at distance in `[alpha, beta]` where `beta` was fixed at
    /// build time, descending by distance, ties leftmost.
    pub fn query_gap_with_alpha(
        &self,
        pattern: &[u8],
        alpha: u64,
    ) -> Result<Vec<ConsecutivePair>, Error> {
        self.query_gap_with_alpha_traced(pattern, alpha).map(|(pairs, _)| pairs)
    }

    pub fn query_gap_with_alpha_traced(
        &self,
        pattern: &[u8],
        alpha: u64,
    ) -> Result<(Vec<ConsecutivePair>, Trace), Error> {
        // A non-overlap store is a max-gap store with bound `n`. Any stored
        // bound of at least `alpha` yields the same pair set (no distance
        // reaches `n`), so serve from the tightest one that still covers the
        // query and reject only when none does.
        let bounds: Vec<(u64, usize)> = self
            .modes
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| match m {
                Mode::FarthestMaxGap(beta) => Some((beta, i)),
                _ => None,
            })
            .collect();
        if bounds.is_empty() {
            return Err(Error::ModeUnavailable("max-gap band order not built"));
        }
        let Some(&(beta, slot)) = bounds.iter().filter(|&&(b, _)| b >= alpha).min() else {
            let widest = bounds.iter().map(|&(b, _)| b).max().expect("non-empty");
            return Err(Error::InvalidGapRange { alpha, beta: widest });
        };
        let mut trace = Trace::default();
        let pairs = self.band_on_slot(slot, pattern, alpha, beta, &mut trace);
        Ok((pairs, trace))
    }

    /// All pairs whose occurrences do not overlap (distance `>= |pattern|`),
    /// farthest first, ties leftmost. Needs a max-gap store with bound `n`.
    pub fn query_nonoverlapping(
        &self,
        pattern: &[u8],
    ) -> Result<Vec<ConsecutivePair>, Error> {
        self.query_nonoverlapping_traced(pattern).map(|(pairs, _)| pairs)
    }

    pub fn query_nonoverlapping_traced(
        &self,
        pattern: &[u8],
    ) -> Result<(Vec<ConsecutivePair>, Trace), Error> {
        let n = self.index.n() as u64;
        let slot = self.slot_exact(
            Mode::FarthestMaxGap(n),
            "non-overlapping pair order not built",
        )?;
        let mut trace = Trace::default();
        let pairs =
            self.band_on_slot(slot, pattern, pattern.len() as u64, n, &mut trace);
        Ok((pairs, trace))
    }
}
