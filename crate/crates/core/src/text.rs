//! Text storage, suffix array, and a compact suffix tree.
//!
//! The tree is built once from the suffix array and LCP array and is
//! immutable afterwards. A virtual sentinel byte 0x00 terminates the text;
//! input texts must not contain it, so every suffix is distinct and every
//! internal node has at least two children. Leaf `r` in suffix-array order
//! represents the suffix starting at `sa[r]`; the suffix of just the
//! sentinel occupies rank 0.

use crate::error::Error;

pub type NodeId = u32;

pub const ROOT: NodeId = 0;
pub const NO_NODE: NodeId = u32::MAX;

/// A validated input text: nonempty, free of the sentinel byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text {
    bytes: Vec<u8>,
}

impl Text {
    pub fn new(bytes: Vec<u8>) -> Result<Self, Error> {
        if bytes.is_empty() {
            return Err(Error::EmptyText);
        }
        if let Some(pos) = bytes.iter().position(|&b| b == 0) {
            return Err(Error::SentinelByte(pos));
        }
        Ok(Text { bytes })
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}

/// One suffix tree node. Edge labels are not stored; the label of the edge
/// into `v` is `padded[sa[v.sa_start] + depth(parent) .. sa[v.sa_start] + depth(v)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixTreeNode {
    pub parent: NodeId,
    /// Length of the string spelled from the root, sentinel included for
    /// leaves.
    pub string_depth: u32,
    /// Half-open suffix-array rank range `[sa_start, sa_end)` of the leaves
    /// below.
    pub sa_start: u32,
    pub sa_end: u32,
    /// Children ordered by the first byte of their edge label.
    pub children: Vec<NodeId>,
}

impl SuffixTreeNode {
    #[inline]
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    #[inline]
    pub fn leaf_count(&self) -> usize {
        (self.sa_end - self.sa_start) as usize
    }
}

/// Result of walking a pattern from the root: the minimum-depth node whose
/// string has the pattern as a prefix, plus the half-open suffix-array
/// range of its occurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocusResult {
    pub node: NodeId,
    pub sa_start: usize,
    pub sa_end: usize,
    pub matched: usize,
}

impl LocusResult {
    pub fn occurrence_count(&self) -> usize {
        self.sa_end - self.sa_start
    }
}

/// Suffix array, LCP array, and suffix tree over one text.
#[derive(Debug, Clone)]
pub struct TextIndex {
    text: Text,
    sa: Vec<u32>,
    isa: Vec<u32>,
    lcp: Vec<u32>,
    nodes: Vec<SuffixTreeNode>,
    // rmq[j][r]: rank of the position-minimum among ranks [r, r + 2^j).
    rmq: Vec<Vec<u32>>,
}

impl TextIndex {
    /// Builds every component. Runs in `O(n log n)`.
    pub fn build(text: Text) -> Self {
        let n = text.len();
        let padded_len = n + 1;
        let sa = build_suffix_array(text.as_bytes());
        let mut isa = vec![0u32; padded_len];
        for (r, &p) in sa.iter().enumerate() {
            isa[p as usize] = r as u32;
        }
        let lcp = build_lcp(text.as_bytes(), &sa, &isa);
        let nodes = build_suffix_tree(&sa, &lcp, padded_len);
        debug_assert!(nodes.len() <= 2 * padded_len, "node count exceeds 2(n+1)");
        let rmq = build_rmq(&sa);
        TextIndex { text, sa, isa, lcp, nodes, rmq }
    }

    /// Rebuilds from a stored suffix array, skipping the sort. The array
    /// must be a permutation of `0..=n`; everything else is derived.
    pub fn from_parts(text: Text, sa: Vec<u32>) -> Option<Self> {
        let n = text.len();
        let padded_len = n + 1;
        if sa.len() != padded_len {
            return None;
        }
        let mut isa = vec![NO_NODE; padded_len];
        for (rank, &pos) in sa.iter().enumerate() {
            if pos as usize >= padded_len || isa[pos as usize] != NO_NODE {
                return None;
            }
            isa[pos as usize] = rank as u32;
        }
        let lcp = build_lcp(text.as_bytes(), &sa, &isa);
        let nodes = build_suffix_tree(&sa, &lcp, padded_len);
        let rmq = build_rmq(&sa);
        Some(TextIndex { text, sa, isa, lcp, nodes, rmq })
    }

    pub fn text(&self) -> &Text {
        &self.text
    }

    /// Text length, excluding the sentinel.
    pub fn n(&self) -> usize {
        self.text.len()
    }

    pub fn sa(&self) -> &[u32] {
        &self.sa
    }

    pub fn isa(&self) -> &[u32] {
        &self.isa
    }

    pub fn lcp(&self) -> &[u32] {
        &self.lcp
    }

    pub fn nodes(&self) -> &[SuffixTreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &SuffixTreeNode {
        &self.nodes[id as usize]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Byte at a padded-text position; position `n` is the sentinel.
    #[inline]
    pub fn byte_at(&self, pos: usize) -> u8 {
        if pos == self.text.len() {
            0
        } else {
            self.text.as_bytes()[pos]
        }
    }

    /// First byte of the edge label leading into `v`.
    pub fn first_edge_byte(&self, v: NodeId) -> u8 {
        let node = self.node(v);
        let parent_depth = self.node(node.parent).string_depth as usize;
        self.byte_at(self.sa[node.sa_start as usize] as usize + parent_depth)
    }

    /// The string spelled from the root to `v`, as padded-text coordinates
    /// `(start, len)`.
    pub fn node_string(&self, v: NodeId) -> (usize, usize) {
        let node = self.node(v);
        (self.sa[node.sa_start as usize] as usize, node.string_depth as usize)
    }

    /// Minimum-depth node whose string has `pattern` as a prefix, or `None`
    /// when the pattern does not occur. Patterns that are empty or contain
    /// the sentinel byte cannot occur in any text and return `None`.
    pub fn locus(&self, pattern: &[u8]) -> Option<LocusResult> {
        if pattern.is_empty() || pattern.contains(&0) {
            return None;
        }
        let mut v = ROOT;
        let mut matched = 0usize;
        while matched < pattern.len() {
            let u = self.child_by_byte(v, pattern[matched])?;
            let node = self.node(u);
            let edge_start = self.sa[node.sa_start as usize] as usize
                + self.node(node.parent).string_depth as usize;
            let edge_len = (node.string_depth - self.node(node.parent).string_depth) as usize;
            let take = edge_len.min(pattern.len() - matched);
            for t in 0..take {
                if self.byte_at(edge_start + t) != pattern[matched + t] {
                    return None;
                }
            }
            matched += take;
            v = u;
        }
        let node = self.node(v);
        Some(LocusResult {
            node: v,
            sa_start: node.sa_start as usize,
            sa_end: node.sa_end as usize,
            matched,
        })
    }

    fn child_by_byte(&self, v: NodeId, byte: u8) -> Option<NodeId> {
        let children = &self.node(v).children;
        children
            .binary_search_by_key(&byte, |&c| self.first_edge_byte(c))
            .ok()
            .map(|idx| children[idx])
    }

    /// Reports up to `limit` text positions of the suffixes in the half-open
    /// rank range, in ascending position order. Each reported position costs
    /// `O(log)` via range-minimum extraction over a priority queue, so a
    /// small `limit` never pays for the whole range.
    pub fn occurrences_in_text_order(
        &self,
        sa_start: usize,
        sa_end: usize,
        limit: usize,
    ) -> Vec<usize> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;
        assert!(sa_start <= sa_end && sa_end <= self.sa.len(), "rank range out of bounds");
        let mut out = Vec::new();
        if limit == 0 || sa_start == sa_end {
            return out;
        }
        let mut heap: BinaryHeap<Reverse<(u32, u32, u32, u32)>> = BinaryHeap::new();
        let seed = |heap: &mut BinaryHeap<_>, lo: usize, hi: usize| {
            if lo <= hi {
                let r = self.rmq_argmin(lo, hi);
                heap.push(Reverse((self.sa[r], lo as u32, hi as u32, r as u32)));
            }
        };
        seed(&mut heap, sa_start, sa_end - 1);
        while let Some(Reverse((pos, lo, hi, r))) = heap.pop() {
            out.push(pos as usize);
            if out.len() == limit {
                break;
            }
            if r > lo {
                seed(&mut heap, lo as usize, r as usize - 1);
            }
            if r < hi {
                seed(&mut heap, r as usize + 1, hi as usize);
            }
        }
        out
    }

    /// Rank of the smallest suffix position within ranks `[lo, hi]`.
    fn rmq_argmin(&self, lo: usize, hi: usize) -> usize {
        let j = (usize::BITS - 1 - (hi - lo + 1).leading_zeros()) as usize;
        let a = self.rmq[j][lo] as usize;
        let b = self.rmq[j][hi + 1 - (1 << j)] as usize;
        if self.sa[a] <= self.sa[b] {
            a
        } else {
            b
        }
    }
}

/// Prefix-doubling suffix array over `text + sentinel`. Counting sort on
/// both keys keeps each round linear.
fn build_suffix_array(text: &[u8]) -> Vec<u32> {
    let n = text.len() + 1;
    let byte = |i: usize| if i == text.len() { 0usize } else { text[i] as usize };

    let mut sa: Vec<u32> = (0..n as u32).collect();
    sa.sort_unstable_by_key(|&i| byte(i as usize));
    let mut rank = vec![0u32; n];
    for r in 1..n {
        let same = byte(sa[r] as usize) == byte(sa[r - 1] as usize);
        rank[sa[r] as usize] = rank[sa[r - 1] as usize] + u32::from(!same);
    }

    let mut tmp = vec![0u32; n];
    let mut new_rank = vec![0u32; n];
    let mut cnt = vec![0u32; n + 1];
    let mut h = 1;
    while (rank[sa[n - 1] as usize] as usize) < n - 1 {
        // Order by second key: suffixes whose second half runs off the end
        // sort first, then previous sa order shifted by h.
        let mut p = 0;
        for i in n - h..n {
            tmp[p] = i as u32;
            p += 1;
        }
        for &i in sa.iter() {
            if i as usize >= h {
                tmp[p] = i - h as u32;
                p += 1;
            }
        }
        // Stable counting sort by first key.
        cnt[..=n].fill(0);
        for i in 0..n {
            cnt[rank[i] as usize + 1] += 1;
        }
        for c in 1..=n {
            cnt[c] += cnt[c - 1];
        }
        for &i in tmp.iter() {
            let slot = &mut cnt[rank[i as usize] as usize];
            sa[*slot as usize] = i;
            *slot += 1;
        }
        // Re-rank on (first, second) key pairs.
        new_rank[sa[0] as usize] = 0;
        for r in 1..n {
            let (a, b) = (sa[r - 1] as usize, sa[r] as usize);
            let second = |i: usize| if i + h < n { rank[i + h] as i64 } else { -1 };
            let same = rank[a] == rank[b] && second(a) == second(b);
            new_rank[b] = new_rank[a] + u32::from(!same);
        }
        std::mem::swap(&mut rank, &mut new_rank);
        h *= 2;
    }
    sa
}

/// Kasai's algorithm; `lcp[r]` is the common prefix length of the suffixes
/// at ranks `r-1` and `r`, and `lcp[0] = 0`.
fn build_lcp(text: &[u8], sa: &[u32], isa: &[u32]) -> Vec<u32> {
    let n = sa.len();
    let byte = |i: usize| if i == text.len() { 0u8 } else { text[i] };
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = isa[i] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + h < n && j + h < n && byte(i + h) == byte(j + h) {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}

/// Stack construction of the suffix tree from SA + LCP. Leaves are added in
/// rank order; an interior node materializes whenever the LCP drops below
/// the depth of the open node on top of the stack.
fn build_suffix_tree(sa: &[u32], lcp: &[u32], padded_len: usize) -> Vec<SuffixTreeNode> {
    let n = sa.len();
    let mut nodes = vec![SuffixTreeNode {
        parent: NO_NODE,
        string_depth: 0,
        sa_start: 0,
        sa_end: 0,
        children: Vec::new(),
    }];
    let mut stack: Vec<NodeId> = vec![ROOT];

    let finalize = |nodes: &mut Vec<SuffixTreeNode>, stack: &mut Vec<NodeId>, l: usize, upto: usize| {
        while nodes[*stack.last().unwrap() as usize].string_depth as usize > l {
            let v = stack.pop().unwrap();
            nodes[v as usize].sa_end = upto as u32;
            let t = *stack.last().unwrap();
            if (nodes[t as usize].string_depth as usize) >= l {
                nodes[v as usize].parent = t;
            } else {
                let mid = nodes.len() as NodeId;
                nodes.push(SuffixTreeNode {
                    parent: NO_NODE,
                    string_depth: l as u32,
                    sa_start: nodes[v as usize].sa_start,
                    sa_end: 0,
                    children: Vec::new(),
                });
                nodes[v as usize].parent = mid;
                stack.push(mid);
            }
        }
    };

    for r in 0..n {
        let l = if r == 0 { 0 } else { lcp[r] as usize };
        finalize(&mut nodes, &mut stack, l, r);
        let leaf = nodes.len() as NodeId;
        nodes.push(SuffixTreeNode {
            parent: NO_NODE,
            string_depth: (padded_len - sa[r] as usize) as u32,
            sa_start: r as u32,
            sa_end: r as u32 + 1,
            children: Vec::new(),
        });
        stack.push(leaf);
    }
    finalize(&mut nodes, &mut stack, 0, n);
    nodes[ROOT as usize].sa_end = n as u32;

    // Child lists, ordered by rank range start; within one parent that is
    // exactly first-edge-byte order.
    let mut order: Vec<NodeId> = (1..nodes.len() as NodeId).collect();
    order.sort_unstable_by_key(|&v| nodes[v as usize].sa_start);
    for v in order {
        let p = nodes[v as usize].parent;
        nodes[p as usize].children.push(v);
    }
    nodes
}

fn build_rmq(sa: &[u32]) -> Vec<Vec<u32>> {
    let n = sa.len();
    let levels = (usize::BITS - n.leading_zeros()) as usize;
    let mut rmq: Vec<Vec<u32>> = Vec::with_capacity(levels);
    rmq.push((0..n as u32).collect());
    let mut j = 1;
    while (1 << j) <= n {
        let half = 1 << (j - 1);
        let prev = &rmq[j - 1];
        let mut row = Vec::with_capacity(n - (1 << j) + 1);
        for r in 0..=n - (1 << j) {
            let a = prev[r];
            let b = prev[r + half];
            row.push(if sa[a as usize] <= sa[b as usize] { a } else { b });
        }
        rmq.push(row);
        j += 1;
    }
    rmq
}
