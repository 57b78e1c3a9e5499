//! Heavy path decomposition and the full index built on it.
//!
//! The heavy child of a node is the child with the largest subtree (node
//! count, first child wins ties). Following heavy children partitions the
//! tree into downward paths, and any root-to-leaf walk crosses at most
//! `log2(nodes) + 1` of them, so the occurrence set shrinks along few long
//! runs.
//!
//! The full index walks every heavy path once, records the life segments
//! of all consecutive occurrence pairs, and stores them per path in a
//! [`VersionedOrderedList`] keyed by distance. Answering a query is then a
//! locus lookup plus a read of the first `k` list cells at the locus depth.

use crate::pairs::ConsecutivePair;
use crate::plist::{ListOrder, ListRaw, QueryStats, VersionedOrderedList};
use crate::text::{NodeId, Text, TextIndex, NO_NODE, ROOT};
use crate::walk::{path_life_segments, unpack_pair, Mode};

#[derive(Debug, Clone)]
pub struct HeavyPathDecomposition {
    /// Each path lists its nodes top to bottom; the last node is a leaf.
    paths: Vec<Vec<NodeId>>,
    /// node -> (path id, 1-based depth on that path).
    node_path: Vec<(u32, u32)>,
}

impl HeavyPathDecomposition {
    pub fn build(index: &TextIndex) -> Self {
        let nodes = index.nodes();
        let count = nodes.len();
        let mut order = Vec::with_capacity(count);
        let mut stack = vec![ROOT];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend_from_slice(&nodes[v as usize].children);
        }
        let mut size = vec![1u32; count];
        for &v in order.iter().rev() {
            for &c in &nodes[v as usize].children {
                size[v as usize] += size[c as usize];
            }
        }
        let heavy: Vec<NodeId> = (0..count)
            .map(|v| {
                let mut best = NO_NODE;
                let mut best_size = 0;
                for &c in &nodes[v].children {
                    if size[c as usize] > best_size {
                        best_size = size[c as usize];
                        best = c;
                    }
                }
                best
            })
            .collect();

        let mut paths = Vec::new();
        let mut node_path = vec![(u32::MAX, 0u32); count];
        for v in 0..count as u32 {
            let parent = nodes[v as usize].parent;
            if v != ROOT && heavy[parent as usize] == v {
                continue;
            }
            let id = paths.len() as u32;
            let mut path = Vec::new();
            let mut cur = v;
            loop {
                node_path[cur as usize] = (id, path.len() as u32 + 1);
                path.push(cur);
                match heavy[cur as usize] {
                    NO_NODE => break,
                    h => cur = h,
                }
            }
            paths.push(path);
        }
        debug_assert!(node_path.iter().all(|&(p, _)| p != u32::MAX));
        HeavyPathDecomposition { paths, node_path }
    }

    pub fn paths(&self) -> &[Vec<NodeId>] {
        &self.paths
    }

    /// Path id and 1-based depth of `node` on its path.
    pub fn locate(&self, node: NodeId) -> (usize, usize) {
        let (p, d) = self.node_path[node as usize];
        (p as usize, d as usize)
    }
}

/// Space-heavy, query-light variant: every heavy path keeps the full life
/// segment history of all its consecutive occurrence pairs.
#[derive(Debug, Clone)]
pub struct FullIndex {
    pub(crate) index: TextIndex,
    pub(crate) decomposition: HeavyPathDecomposition,
    pub(crate) closest: Vec<VersionedOrderedList>,
    /// Present when built for farthest queries as well.
    pub(crate) farthest: Option<Vec<VersionedOrderedList>>,
}

/// Everything a [`FullIndex`] needs on disk; the rest is derived.
#[derive(Debug, Clone)]
pub struct FullIndexParts {
    pub text: Vec<u8>,
    pub sa: Vec<u32>,
    pub closest: Vec<ListRaw>,
    pub farthest: Option<Vec<ListRaw>>,
}

/// Size report under the logical packing accounting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullIndexStats {
    pub n: usize,
    pub node_count: usize,
    pub path_count: usize,
    pub longest_path: usize,
    pub segments: u64,
    pub cells: u64,
    pub far_segments: Option<u64>,
    pub far_cells: Option<u64>,
    pub stored_bits: u64,
}

impl FullIndex {
    pub fn build(text: Text, with_far: bool) -> Self {
        let index = TextIndex::build(text);
        let decomposition = HeavyPathDecomposition::build(&index);
        let lists = |mode: Mode, order: ListOrder| {
            decomposition
                .paths()
                .iter()
                .map(|path| {
                    let segments = path_life_segments(&index, path, mode, None);
                    VersionedOrderedList::build(&segments, path.len(), order)
                        .expect("walker emits in-range segments")
                })
                .collect::<Vec<_>>()
        };
        let closest = lists(Mode::Closest, ListOrder::Ascending);
        let farthest = with_far.then(|| lists(Mode::Farthest, ListOrder::Descending));
        FullIndex { index, decomposition, closest, farthest }
    }

    pub fn text_index(&self) -> &TextIndex {
        &self.index
    }

    pub fn decomposition(&self) -> &HeavyPathDecomposition {
        &self.decomposition
    }

    pub fn has_far(&self) -> bool {
        self.farthest.is_some()
    }

    /// Total pair tenures in the closest-family lists.
    pub fn segment_count(&self) -> u64 {
        self.closest.iter().map(|l| l.segment_count() as u64).sum()
    }

    /// The `k` closest pairs of `pattern`, closest first, ties leftmost.
    pub fn query_topk(&self, pattern: &[u8], k: usize) -> Vec<ConsecutivePair> {
        let mut stats = QueryStats::default();
        self.query_topk_with_stats(pattern, k, &mut stats)
    }

    pub fn query_topk_with_stats(
        &self,
        pattern: &[u8],
        k: usize,
        stats: &mut QueryStats,
    ) -> Vec<ConsecutivePair> {
        let Some(locus) = self.index.locus(pattern) else {
            return Vec::new();
        };
        let (path, depth) = self.decomposition.locate(locus.node);
        let entries = self.closest[path]
            .smallest_segments(depth, k, stats)
            .expect("locus depth is on its heavy path");
        entries
            .into_iter()
            .map(|(_, payload)| {
                let (i, j) = unpack_pair(payload);
                ConsecutivePair::new(i, j)
            })
            .collect()
    }

    pub fn stats(&self) -> FullIndexStats {
        let n = self.index.n();
        let key_bits = crate::packed::PackedIntVec::width_for(n + 1);
        let payload_bits = 2 * key_bits;
        let sum_bits = |lists: &[VersionedOrderedList]| {
            lists.iter().map(|l| l.logical_bits(key_bits, payload_bits)).sum::<u64>()
        };
        let mut stored_bits = sum_bits(&self.closest);
        if let Some(far) = &self.farthest {
            stored_bits += sum_bits(far);
        }
        FullIndexStats {
            n,
            node_count: self.index.node_count(),
            path_count: self.decomposition.paths().len(),
            longest_path: self.decomposition.paths().iter().map(Vec::len).max().unwrap_or(0),
            segments: self.segment_count(),
            cells: self.closest.iter().map(|l| l.cell_count() as u64).sum(),
            far_segments: self
                .farthest
                .as_ref()
                .map(|ls| ls.iter().map(|l| l.segment_count() as u64).sum()),
            far_cells: self
                .farthest
                .as_ref()
                .map(|ls| ls.iter().map(|l| l.cell_count() as u64).sum()),
            stored_bits,
        }
    }

    pub fn to_parts(&self) -> FullIndexParts {
        FullIndexParts {
            text: self.index.text().as_bytes().to_vec(),
            sa: self.index.sa().to_vec(),
            closest: self.closest.iter().map(VersionedOrderedList::to_raw).collect(),
            farthest: self
                .farthest
                .as_ref()
                .map(|ls| ls.iter().map(VersionedOrderedList::to_raw).collect()),
        }
    }

    /// Rebuilds from stored parts; `None` when they are inconsistent.
    pub fn from_parts(parts: FullIndexParts) -> Option<Self> {
        let text = Text::new(parts.text).ok()?;
        let index = TextIndex::from_parts(text, parts.sa)?;
        let decomposition = HeavyPathDecomposition::build(&index);
        let restore = |raws: Vec<ListRaw>, order: ListOrder| -> Option<Vec<VersionedOrderedList>> {
            if raws.len() != decomposition.paths().len() {
                return None;
            }
            raws.into_iter()
                .zip(decomposition.paths())
                .map(|(raw, path)| {
                    let list = VersionedOrderedList::from_raw(raw)?;
                    (list.max_version() == path.len() && list.order() == order).then_some(list)
                })
                .collect()
        };
        let closest = restore(parts.closest, ListOrder::Ascending)?;
        let farthest = match parts.farthest {
            Some(raws) => Some(restore(raws, ListOrder::Descending)?),
            None => None,
        };
        Some(FullIndex { index, decomposition, closest, farthest })
    }
}
