use std::cmp::Ordering;

/// A pair of neighbouring pattern occurrences: `P` occurs at `left` and
/// `right` and nowhere strictly between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConsecutivePair {
    pub left: usize,
    pub right: usize,
}

impl ConsecutivePair {
    pub fn new(left: usize, right: usize) -> Self {
        debug_assert!(left < right, "pair positions must be strictly increasing");
        ConsecutivePair { left, right }
    }

    #[inline]
    pub fn distance(&self) -> usize {
        self.right - self.left
    }
}

/// Report order for ranked queries. Ties on distance always fall back to
/// ascending position so that answers are independent of build order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairOrder {
    /// Smallest distance first.
    CloseFirst,
    /// Largest distance first.
    FarFirst,
}

impl PairOrder {
    #[inline]
    pub fn cmp(&self, a: &ConsecutivePair, b: &ConsecutivePair) -> Ordering {
        let by_dist = match self {
            PairOrder::CloseFirst => a.distance().cmp(&b.distance()),
            PairOrder::FarFirst => b.distance().cmp(&a.distance()),
        };
        by_dist.then(a.left.cmp(&b.left)).then(a.right.cmp(&b.right))
    }
}

/// Exact top-k selection under `order`, linear in `pairs.len()` plus
/// `k log k` to sort the survivors.
pub fn select_topk(mut pairs: Vec<ConsecutivePair>, k: usize, order: PairOrder) -> Vec<ConsecutivePair> {
    if k == 0 {
        return Vec::new();
    }
    if k < pairs.len() {
        pairs.select_nth_unstable_by(k - 1, |a, b| order.cmp(a, b));
        pairs.truncate(k);
    }
    pairs.sort_unstable_by(|a, b| order.cmp(a, b));
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(left: usize, right: usize) -> ConsecutivePair {
        ConsecutivePair::new(left, right)
    }

    #[test]
    fn orders_break_ties_by_left_position() {
        let a = p(2, 6);
        let b = p(5, 9);
        assert_eq!(PairOrder::CloseFirst.cmp(&a, &b), Ordering::Less);
        assert_eq!(PairOrder::FarFirst.cmp(&a, &b), Ordering::Less);
        assert_eq!(PairOrder::CloseFirst.cmp(&p(1, 2), &a), Ordering::Less);
        assert_eq!(PairOrder::FarFirst.cmp(&p(1, 2), &a), Ordering::Greater);
    }

    #[test]
    fn select_topk_matches_full_sort_on_every_prefix() {
        let pairs = vec![p(10, 14), p(0, 2), p(4, 7), p(20, 22), p(8, 10), p(30, 37)];
        for order in [PairOrder::CloseFirst, PairOrder::FarFirst] {
            let mut sorted = pairs.clone();
            sorted.sort_by(|a, b| order.cmp(a, b));
            for k in 0..=pairs.len() + 2 {
                let got = select_topk(pairs.clone(), k, order);
                let want: Vec<_> = sorted.iter().copied().take(k).collect();
                assert_eq!(got, want, "k={k} order={order:?}");
            }
        }
    }

    #[test]
    fn select_topk_k_zero_is_empty() {
        assert!(select_topk(vec![p(0, 1)], 0, PairOrder::CloseFirst).is_empty());
    }
}
