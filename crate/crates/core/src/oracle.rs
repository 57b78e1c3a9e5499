//! Brute-force reference implementations.
//!
//! Everything here rescans the text, so runtimes are quadratic-ish and only
//! suitable for tests and the `oracle` CLI subcommand. The indexes must
//! agree with these functions on every input; the fuzz suites enforce that.

use crate::pairs::{select_topk, ConsecutivePair, PairOrder};

/// All positions where `pattern` occurs in `text`, ascending. The empty
/// pattern is treated as absent.
pub fn oracle_occurrences(text: &[u8], pattern: &[u8]) -> Vec<usize> {
    if pattern.is_empty() || pattern.len() > text.len() {
        return Vec::new();
    }
    let m = pattern.len();
    (0..=text.len() - m).filter(|&i| &text[i..i + m] == pattern).collect()
}

/// All consecutive occurrence pairs of `pattern`, ascending by position.
pub fn oracle_consecutive(text: &[u8], pattern: &[u8]) -> Vec<ConsecutivePair> {
    let occ = oracle_occurrences(text, pattern);
    occ.windows(2).map(|w| ConsecutivePair::new(w[0], w[1])).collect()
}

/// The `k` closest consecutive pairs, ascending by (distance, left).
pub fn oracle_topk(text: &[u8], pattern: &[u8], k: usize) -> Vec<ConsecutivePair> {
    let mut pairs = oracle_consecutive(text, pattern);
    pairs.sort_unstable_by(|a, b| PairOrder::CloseFirst.cmp(a, b));
    pairs.truncate(k);
    pairs
}

/// The `k` farthest consecutive pairs, descending by distance, ties by
/// ascending position.
pub fn oracle_topk_far(text: &[u8], pattern: &[u8], k: usize) -> Vec<ConsecutivePair> {
    let mut pairs = oracle_consecutive(text, pattern);
    pairs.sort_unstable_by(|a, b| PairOrder::FarFirst.cmp(a, b));
    pairs.truncate(k);
    pairs
}

/// All consecutive pairs with `alpha <= distance <= beta`, ascending by
/// (distance, left).
pub fn oracle_gap(text: &[u8], pattern: &[u8], alpha: usize, beta: usize) -> Vec<ConsecutivePair> {
    let mut pairs: Vec<_> = oracle_consecutive(text, pattern)
        .into_iter()
        .filter(|p| (alpha..=beta).contains(&p.distance()))
        .collect();
    pairs.sort_unstable_by(|a, b| PairOrder::CloseFirst.cmp(a, b));
    pairs
}

/// All non-overlapping consecutive pairs (distance >= |pattern|),
/// descending by distance. Equivalent to a gap filter with
/// `alpha = |pattern|` and `beta = |text|`.
pub fn oracle_nonoverlap(text: &[u8], pattern: &[u8]) -> Vec<ConsecutivePair> {
    let mut pairs: Vec<_> = oracle_consecutive(text, pattern)
        .into_iter()
        .filter(|p| p.distance() >= pattern.len())
        .collect();
    pairs.sort_unstable_by(|a, b| PairOrder::FarFirst.cmp(a, b));
    pairs
}

/// Convenience used by selection-based query paths: top-k of an explicit
/// occurrence list, for cross-checking enumeration fallbacks.
pub fn pairs_of_occurrences(occ: &[usize]) -> Vec<ConsecutivePair> {
    occ.windows(2).map(|w| ConsecutivePair::new(w[0], w[1])).collect()
}

/// Re-export so oracle-only callers can rank without pulling in the index
/// modules.
pub fn oracle_select_topk(pairs: Vec<ConsecutivePair>, k: usize, order: PairOrder) -> Vec<ConsecutivePair> {
    select_topk(pairs, k, order)
}

/// Shared test fixture, 45 bytes; "AN" occurs at 4, 7, 11, 22, 24, 26, 30,
/// 39, 41.
#[cfg(test)]
pub(crate) const SONG: &[u8] = b"BATMAN AND ANNA SING NANANANA AND EAT BANANAS";
/// Shared test fixture, 20 bytes; "A" occurs at 0, 2, 4, 6, 9, 12, 15, 18.
#[cfg(test)]
pub(crate) const DRUM: &[u8] = b"ABACABACDABDACDABDAC";
