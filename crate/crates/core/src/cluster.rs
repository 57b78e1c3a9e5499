//! Cluster partition of the suffix tree and the recursive index.
//!
//! A cluster is a connected set of tree edges with at most two *boundary*
//! nodes (nodes also touching edges outside the cluster). The partition is
//! built bottom up: each node merges its children's open components while
//! they fit under the size cap and keep at most one interior boundary,
//! closing components into clusters otherwise.
//!
//! The recursive index partitions the tree with a shrinking size schedule
//! `tau_1 > tau_2 > ...`. Every cluster contributes its *spine*, the path
//! between its boundary nodes, and each spine node stores only the top
//! `tau_i` consecutive pairs per configured order, in one persistent list
//! per spine with keys reduced to distance ranks and payloads reduced to
//! suffix-array offsets below the spine top. Subtrees hanging off a spine
//! recurse at the next level; trees left after the last level are terminal
//! and answer queries by enumerating their few occurrences. Queries with
//! `k` over a spine's cap fall back to enumeration bounded by the previous
//! level's size.

use crate::error::Error;
use crate::packed::PackedIntVec;
use crate::pairs::{select_topk, ConsecutivePair, PairOrder};
use crate::plist::{LifeSegment, ListOrder, ListRaw, QueryStats, VersionedOrderedList};
use crate::text::{LocusResult, NodeId, Text, TextIndex, ROOT};
use crate::walk::{path_life_segments, unpack_pair, Mode};

const NONE: u32 = u32::MAX;

/// Per-level cluster size schedule: `tau_i` is the smallest `t` with
/// `t^(num+den) >= tau_{i-1}^den`, starting from `tau_0 = n`, stopping
/// before any level would get `tau <= 8`. The exponent `eps = num/den`
/// trades space for query reach: larger `eps`, fewer levels.
pub fn tau_schedule(n: usize, epsilon: (u32, u32)) -> Result<Vec<usize>, Error> {
    let (num, den) = epsilon;
    // den <= 4 keeps prev^den inside u128 exactly, so the search never
    // rounds; num <= 16 keeps the schedule meaningful.
    if num < 1 || num > 16 || den < 1 || den > 4 {
        return Err(Error::InvalidEpsilon { num, den });
    }
    let exp = num + den;
    let pow_at_least = |base: u128, e: u32, target: u128| -> bool {
        let mut acc: u128 = 1;
        for _ in 0..e {
            match acc.checked_mul(base) {
                Some(v) => acc = v,
                None => return true,
            }
        }
        acc >= target
    };
    let mut taus = Vec::new();
    let mut prev = n;
    while prev > 8 {
        let target = (prev as u128).pow(den);
        let (mut lo, mut hi) = (2usize, prev);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if pow_at_least(mid as u128, exp, target) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let t = lo.min(prev - 1);
        if t <= 8 {
            break;
        }
        taus.push(t);
        prev = t;
    }
    Ok(taus)
}

/// One cluster: its edges (named by child node), the top boundary, and the
/// second boundary when the cluster continues below.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub top: NodeId,
    pub bottom: Option<NodeId>,
    pub edges: Vec<NodeId>,
}

impl Cluster {
    /// The path between the boundary nodes, top first. A single-boundary
    /// cluster has a one-node spine.
    pub fn spine(&self, index: &TextIndex) -> Vec<NodeId> {
        let Some(bottom) = self.bottom else {
            return vec![self.top];
        };
        let mut path = vec![bottom];
        let mut v = bottom;
        while v != self.top {
            v = index.node(v).parent;
            path.push(v);
        }
        path.reverse();
        path
    }
}

/// Edge partition of one subtree.
#[derive(Debug, Clone)]
pub struct ClusterPartition {
    pub clusters: Vec<Cluster>,
    /// Nodes in the partitioned subtree.
    pub tree_nodes: usize,
}

#[derive(Clone, Copy)]
struct OpenComp {
    head: u32,
    tail: u32,
    len: u32,
    /// Interior node already serving as a boundary of a closed cluster.
    bb: u32,
}

const EMPTY_COMP: OpenComp = OpenComp { head: NONE, tail: NONE, len: 0, bb: NONE };

struct PartitionScratch {
    comp: Vec<OpenComp>,
    dirty: Vec<bool>,
    /// Intrusive chain over edges (named by child node id).
    next_edge: Vec<u32>,
    stack: Vec<(NodeId, u32)>,
    /// Spine membership marker, reused across clusters.
    marked: Vec<bool>,
}

impl PartitionScratch {
    fn new(node_count: usize) -> Self {
        PartitionScratch {
            comp: vec![EMPTY_COMP; node_count],
            dirty: vec![false; node_count],
            next_edge: vec![NONE; node_count],
            stack: Vec::new(),
            marked: vec![false; node_count],
        }
    }
}

/// Partitions the subtree rooted at `root` into clusters of at most `tau`
/// nodes each.
pub fn partition_subtree(index: &TextIndex, root: NodeId, tau: usize) -> ClusterPartition {
    let mut scratch = PartitionScratch::new(index.node_count());
    partition_subtree_with(index, root, tau, &mut scratch)
}

fn partition_subtree_with(
    index: &TextIndex,
    root: NodeId,
    tau: usize,
    scratch: &mut PartitionScratch,
) -> ClusterPartition {
    let cap = tau.saturating_sub(1).max(1) as u32;
    let mut clusters = Vec::new();
    let mut tree_nodes = 0usize;

    let append_edge = |sc: &mut PartitionScratch, comp: &mut OpenComp, child: u32| {
        sc.next_edge[child as usize] = NONE;
        match comp.tail {
            NONE => comp.head = child,
            tail => sc.next_edge[tail as usize] = child,
        }
        comp.tail = child;
        comp.len += 1;
    };
    let close = |sc: &mut PartitionScratch,
                 clusters: &mut Vec<Cluster>,
                 comp: OpenComp,
                 top: NodeId| {
        debug_assert!(comp.len > 0, "only non-empty components close");
        let mut edges = Vec::with_capacity(comp.len as usize);
        let mut e = comp.head;
        while e != NONE {
            edges.push(e);
            e = sc.next_edge[e as usize];
        }
        debug_assert_eq!(edges.len(), comp.len as usize);
        clusters.push(Cluster {
            top,
            bottom: (comp.bb != NONE).then_some(comp.bb),
            edges,
        });
        sc.dirty[top as usize] = true;
    };

    scratch.stack.clear();
    scratch.stack.push((root, 0));
    scratch.comp[root as usize] = EMPTY_COMP;
    scratch.dirty[root as usize] = false;
    tree_nodes += 1;

    while let Some(&mut (u, ref mut next_child)) = scratch.stack.last_mut() {
        let children = &index.node(u).children;
        if (*next_child as usize) < children.len() {
            let c = children[*next_child as usize];
            *next_child += 1;
            scratch.comp[c as usize] = EMPTY_COMP;
            scratch.dirty[c as usize] = false;
            tree_nodes += 1;
            scratch.stack.push((c, 0));
            continue;
        }
        scratch.stack.pop();

        // End-of-node rules: a component cannot travel up carrying both an
        // interior boundary and a closed cluster at u, and a full one has
        // no room for the parent edge.
        let mut comp = scratch.comp[u as usize];
        if u == root {
            if comp.len > 0 {
                close(scratch, &mut clusters, comp, u);
            }
            break;
        }
        if scratch.dirty[u as usize] && comp.bb != NONE && comp.len > 0 {
            close(scratch, &mut clusters, comp, u);
            comp = EMPTY_COMP;
        }
        if comp.len == cap {
            close(scratch, &mut clusters, comp, u);
            comp = EMPTY_COMP;
        }

        // Hand the component to the parent as `comp + edge(parent, u)`.
        let mut k = comp;
        let parent = index.node(u).parent;
        append_edge(scratch, &mut k, u);
        if k.bb == NONE && scratch.dirty[u as usize] {
            k.bb = u;
        }

        let mut a = scratch.comp[parent as usize];
        if a.len + k.len <= cap && (a.bb == NONE || k.bb == NONE) {
            if a.len == 0 {
                a = k;
            } else {
                scratch.next_edge[a.tail as usize] = k.head;
                a.tail = k.tail;
                a.len += k.len;
                if a.bb == NONE {
                    a.bb = k.bb;
                }
            }
        } else if a.len > k.len {
            close(scratch, &mut clusters, a, parent);
            a = k;
        } else {
            close(scratch, &mut clusters, k, parent);
        }
        scratch.comp[parent as usize] = a;
    }

    debug_assert!(
        clusters.len() <= 8 * tree_nodes.div_ceil(tau.max(1)),
        "{} clusters for {} nodes at tau {}",
        clusters.len(),
        tree_nodes,
        tau
    );
    ClusterPartition { clusters, tree_nodes }
}

/// Per-spine store for one pair order: a persistent list over spine depths
/// whose keys are distance ranks and whose payloads index a packed array of
/// suffix-array offsets below the spine top.
#[derive(Debug, Clone)]
pub struct SpineStructure {
    list: VersionedOrderedList,
    offsets: PackedIntVec,
}

impl SpineStructure {
    fn build(index: &TextIndex, spine: &[NodeId], mode: Mode, tau: usize) -> Self {
        let segments = path_life_segments(index, spine, mode, Some(tau));
        debug_assert!(
            segments.len() <= 8 * tau,
            "{} tenures on one spine at tau {tau}",
            segments.len()
        );
        let mut ranks: Vec<u64> = segments.iter().map(|s| s.x).collect();
        ranks.sort_unstable();
        ranks.dedup();
        let mut order: Vec<u32> = (0..segments.len() as u32).collect();
        order.sort_unstable_by_key(|&s| {
            let seg = &segments[s as usize];
            (seg.x, seg.payload)
        });

        let top = index.node(spine[0]);
        let base = top.sa_start as usize;
        let isa = index.isa();
        let mut offsets = PackedIntVec::new(PackedIntVec::width_for(top.leaf_count()));
        let mut reduced = Vec::with_capacity(segments.len());
        for (id, &s) in order.iter().enumerate() {
            let seg = &segments[s as usize];
            let (i, j) = unpack_pair(seg.payload);
            offsets.push(isa[i] as u64 - base as u64);
            offsets.push(isa[j] as u64 - base as u64);
            reduced.push(LifeSegment {
                x: ranks.binary_search(&seg.x).expect("rank of a present key") as u64 + 1,
                start: seg.start,
                end: seg.end,
                payload: id as u64,
            });
        }
        let dir =
            if mode.far() { ListOrder::Descending } else { ListOrder::Ascending };
        let list = VersionedOrderedList::build(&reduced, spine.len(), dir)
            .expect("walker emits in-range tenures");
        SpineStructure { list, offsets }
    }

    fn decode(&self, index: &TextIndex, top_sa_start: usize, id: u64) -> ConsecutivePair {
        let at = |o: usize| {
            index.sa()[top_sa_start + self.offsets.get(o) as usize] as usize
        };
        let (i, j) = (at(2 * id as usize), at(2 * id as usize + 1));
        debug_assert!(i < j, "offsets decode to an ordered pair");
        ConsecutivePair::new(i, j)
    }

    pub fn segment_count(&self) -> usize {
        self.list.segment_count()
    }

    /// Logical size: rank keys at the width of the largest rank, payloads
    /// at the width of the tenure count, packed offsets as stored.
    pub fn stored_bits(&self) -> u64 {
        let key_bits = PackedIntVec::width_for(self.list.max_key() as usize + 1);
        let payload_bits = PackedIntVec::width_for(self.list.segment_count().max(1));
        self.list.logical_bits(key_bits, payload_bits) + self.offsets.bit_len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Routing {
    Spine { spine: u32, depth: u32 },
    Terminal,
}

#[derive(Debug, Clone)]
struct Spine {
    level: u32,
    top: NodeId,
    len: u32,
    /// Parallel to the index's mode list.
    structures: Vec<SpineStructure>,
}

/// How a query was answered; checked by tests against the cost model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Read off a spine list, no enumeration.
    List { level: u32 },
    /// Spine hit with `k` over the level cap: bounded enumeration.
    Fallback { level: u32, enumeration_cap: usize },
    /// Locus outside every spine: bounded enumeration.
    Terminal { enumeration_cap: usize },
    /// Pattern absent.
    NoLocus,
}

/// Instrumentation for one query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trace {
    pub stats: QueryStats,
    pub route: Route,
}

impl Default for Trace {
    fn default() -> Self {
        Trace { stats: QueryStats::default(), route: Route::NoLocus }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct LevelMeta {
    trees: u64,
    tree_nodes: u64,
    clusters: u64,
}

/// Space-lean variant: spine stores capped at the level schedule, bounded
/// enumeration everywhere else.
#[derive(Debug, Clone)]
pub struct RecursiveIndex {
    pub(crate) index: TextIndex,
    epsilon: (u32, u32),
    pub(crate) modes: Vec<Mode>,
    taus: Vec<usize>,
    spines: Vec<Spine>,
    routing: Vec<Routing>,
    terminal_bound: usize,
    level_meta: Vec<LevelMeta>,
}

struct Skeleton {
    taus: Vec<usize>,
    /// (level, spine nodes top to bottom), in assignment order.
    spines: Vec<(u32, Vec<NodeId>)>,
    routing: Vec<Routing>,
    terminal_bound: usize,
    level_meta: Vec<LevelMeta>,
}

fn build_skeleton(index: &TextIndex, epsilon: (u32, u32)) -> Result<Skeleton, Error> {
    let taus = tau_schedule(index.n(), epsilon)?;
    let node_count = index.node_count();
    let mut scratch = PartitionScratch::new(node_count);
    let mut routing = vec![Routing::Terminal; node_count];
    let mut assigned = vec![false; node_count];
    let mut spines: Vec<(u32, Vec<NodeId>)> = Vec::new();
    let mut level_meta = Vec::with_capacity(taus.len());

    let mut trees: Vec<NodeId> = vec![ROOT];
    for (li, &tau) in taus.iter().enumerate() {
        let level = li as u32 + 1;
        let mut meta = LevelMeta { trees: trees.len() as u64, ..LevelMeta::default() };
        let mut next_trees = Vec::new();
        for &tree_root in &trees {
            let part = partition_subtree_with(index, tree_root, tau, &mut scratch);
            meta.tree_nodes += part.tree_nodes as u64;
            meta.clusters += part.clusters.len() as u64;
            for cluster in &part.clusters {
                let spine = cluster.spine(index);
                let sid = spines.len() as u32;
                for (d, &v) in spine.iter().enumerate() {
                    if !assigned[v as usize] {
                        assigned[v as usize] = true;
                        routing[v as usize] =
                            Routing::Spine { spine: sid, depth: d as u32 + 1 };
                    }
                    scratch.marked[v as usize] = true;
                }
                // Subtrees hanging off the spine recurse one level down.
                let mut roots: Vec<NodeId> = cluster
                    .edges
                    .iter()
                    .copied()
                    .filter(|&c| {
                        scratch.marked[index.node(c).parent as usize]
                            && !scratch.marked[c as usize]
                    })
                    .collect();
                roots.sort_unstable();
                next_trees.extend_from_slice(&roots);
                for &v in &spine {
                    scratch.marked[v as usize] = false;
                }
                spines.push((level, spine));
            }
        }
        level_meta.push(meta);
        trees = next_trees;
        if trees.is_empty() {
            break;
        }
    }

    Ok(Skeleton {
        terminal_bound: taus.last().copied().unwrap_or(index.n()),
        taus,
        spines,
        routing,
        level_meta,
    })
}

/// Per-level size report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStats {
    pub level: u32,
    pub tau: usize,
    pub trees: u64,
    pub tree_nodes: u64,
    pub clusters: u64,
    pub spine_nodes: u64,
    pub segments: u64,
    pub cells: u64,
    pub stored_bits: u64,
    pub max_spine_segments: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursiveIndexStats {
    pub n: usize,
    pub node_count: usize,
    pub epsilon: (u32, u32),
    pub terminal_bound: usize,
    pub levels: Vec<LevelStats>,
}

/// Everything a [`RecursiveIndex`] needs on disk; the partition skeleton is
/// recomputed deterministically from the text.
#[derive(Debug, Clone)]
pub struct RecursiveIndexParts {
    pub text: Vec<u8>,
    pub sa: Vec<u32>,
    pub epsilon: (u32, u32),
    pub modes: Vec<Mode>,
    /// Spine-major, then mode order.
    pub lists: Vec<ListRaw>,
    /// Parallel to `lists`: width, value count, blocks.
    pub offsets: Vec<(u32, u64, Vec<u64>)>,
}

impl RecursiveIndex {
    pub fn build(text: Text, epsilon: (u32, u32), modes: &[Mode]) -> Result<Self, Error> {
        if modes.is_empty() {
            return Err(Error::ModeUnavailable("at least one pair order"));
        }
        let index = TextIndex::build(text);
        let skeleton = build_skeleton(&index, epsilon)?;
        let spines = skeleton
            .spines
            .iter()
            .map(|(level, nodes)| Spine {
                level: *level,
                top: nodes[0],
                len: nodes.len() as u32,
                structures: modes
                    .iter()
                    .map(|&m| {
                        SpineStructure::build(
                            &index,
                            nodes,
                            m,
                            skeleton.taus[*level as usize - 1],
                        )
                    })
                    .collect(),
            })
            .collect();
        Ok(RecursiveIndex {
            index,
            epsilon,
            modes: modes.to_vec(),
            taus: skeleton.taus,
            spines,
            routing: skeleton.routing,
            terminal_bound: skeleton.terminal_bound,
            level_meta: skeleton.level_meta,
        })
    }

    pub fn text_index(&self) -> &TextIndex {
        &self.index
    }

    pub fn epsilon(&self) -> (u32, u32) {
        self.epsilon
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn taus(&self) -> &[usize] {
        &self.taus
    }

    pub fn terminal_bound(&self) -> usize {
        self.terminal_bound
    }

    /// The `k` closest pairs of `pattern`, closest first, ties leftmost.
    pub fn query_topk(&self, pattern: &[u8], k: usize) -> Result<Vec<ConsecutivePair>, Error> {
        self.query_topk_traced(pattern, k).map(|(pairs, _)| pairs)
    }

    pub fn query_topk_traced(
        &self,
        pattern: &[u8],
        k: usize,
    ) -> Result<(Vec<ConsecutivePair>, Trace), Error> {
        let slot = self.slot_exact(Mode::Closest, "closest pair order not built")?;
        let mut trace = Trace::default();
        let pairs = self.topk_on_slot(slot, pattern, k, &mut trace);
        Ok((pairs, trace))
    }

    pub(crate) fn slot_exact(&self, mode: Mode, missing: &'static str) -> Result<usize, Error> {
        self.modes.iter().position(|&m| m == mode).ok_or(Error::ModeUnavailable(missing))
    }

    pub(crate) fn slot_where(
        &self,
        pred: impl Fn(Mode) -> bool,
        missing: &'static str,
    ) -> Result<usize, Error> {
        self.modes.iter().position(|&m| pred(m)).ok_or(Error::ModeUnavailable(missing))
    }

    fn level_cap(&self, level: u32) -> usize {
        match level {
            1 => self.index.n(),
            l => self.taus[l as usize - 2],
        }
    }

    fn enumerate_pairs(
        &self,
        locus: &LocusResult,
        stats: &mut QueryStats,
    ) -> Vec<ConsecutivePair> {
        let occ =
            self.index.occurrences_in_text_order(locus.sa_start, locus.sa_end, usize::MAX);
        stats.occurrences_enumerated += occ.len();
        debug_assert!(occ.iter().all(|&p| p < self.index.n()), "loci never cover the sentinel");
        occ.windows(2).map(|w| ConsecutivePair::new(w[0], w[1])).collect()
    }

    fn order_of(mode: Mode) -> PairOrder {
        if mode.far() {
            PairOrder::FarFirst
        } else {
            PairOrder::CloseFirst
        }
    }

    /// Top-`k` under the slot's order; the slot must be an uncapped family
    /// (`Closest` or `Farthest`).
    pub(crate) fn topk_on_slot(
        &self,
        slot: usize,
        pattern: &[u8],
        k: usize,
        trace: &mut Trace,
    ) -> Vec<ConsecutivePair> {
        let mode = self.modes[slot];
        debug_assert!(mode.eligible(1) && mode.eligible(u64::MAX >> 1));
        let Some(locus) = self.index.locus(pattern) else {
            trace.route = Route::NoLocus;
            return Vec::new();
        };
        match self.routing[locus.node as usize] {
            Routing::Terminal => {
                trace.route = Route::Terminal { enumeration_cap: self.terminal_bound };
                let pairs = self.enumerate_pairs(&locus, &mut trace.stats);
                select_topk(pairs, k, Self::order_of(mode))
            }
            Routing::Spine { spine, depth } => {
                let sp = &self.spines[spine as usize];
                let tau = self.taus[sp.level as usize - 1];
                if k <= tau {
                    trace.route = Route::List { level: sp.level };
                    let st = &sp.structures[slot];
                    let top_start = self.index.node(sp.top).sa_start as usize;
                    st.list
                        .first_segments(depth as usize, k, &mut trace.stats)
                        .expect("routing depth is on the spine")
                        .into_iter()
                        .map(|(_, id)| st.decode(&self.index, top_start, id))
                        .collect()
                } else {
                    trace.route = Route::Fallback {
                        level: sp.level,
                        enumeration_cap: self.level_cap(sp.level),
                    };
                    let pairs = self.enumerate_pairs(&locus, &mut trace.stats);
                    select_topk(pairs, k, Self::order_of(mode))
                }
            }
        }
    }

    /// All pairs with distance in `[lo, hi]`, in the slot's order. The slot
    /// must be a band family whose built-in bound matches the band side it
    /// guarantees (`lo` for min-gap, `hi` for max-gap).
    pub(crate) fn band_on_slot(
        &self,
        slot: usize,
        pattern: &[u8],
        lo: u64,
        hi: u64,
        trace: &mut Trace,
    ) -> Vec<ConsecutivePair> {
        let mode = self.modes[slot];
        let Some(locus) = self.index.locus(pattern) else {
            trace.route = Route::NoLocus;
            return Vec::new();
        };
        let in_band =
            |p: &ConsecutivePair| (lo..=hi).contains(&(p.distance() as u64));
        let enumerate = |trace: &mut Trace| {
            let mut pairs = self.enumerate_pairs(&locus, &mut trace.stats);
            pairs.retain(in_band);
            let order = Self::order_of(mode);
            pairs.sort_unstable_by(|a, b| order.cmp(a, b));
            pairs
        };
        match self.routing[locus.node as usize] {
            Routing::Terminal => {
                trace.route = Route::Terminal { enumeration_cap: self.terminal_bound };
                enumerate(trace)
            }
            Routing::Spine { spine, depth } => {
                let sp = &self.spines[spine as usize];
                let tau = self.taus[sp.level as usize - 1];
                let st = &sp.structures[slot];
                let top_start = self.index.node(sp.top).sa_start as usize;
                let mut kept = Vec::new();
                let (entries, stopped) = st
                    .list
                    .scan_segments(depth as usize, tau, &mut trace.stats, |_, id| {
                        let pair = st.decode(&self.index, top_start, id);
                        let d = pair.distance() as u64;
                        let keep = match mode {
                            Mode::ClosestMinGap(_) => d <= hi,
                            Mode::FarthestMaxGap(_) => d >= lo,
                            Mode::Closest | Mode::Farthest => in_band(&pair),
                        };
                        if keep {
                            kept.push(pair);
                        }
                        keep
                    })
                    .expect("routing depth is on the spine");
                debug_assert_eq!(entries.len(), kept.len());
                if stopped || entries.len() < tau {
                    trace.route = Route::List { level: sp.level };
                    debug_assert!(kept.iter().all(in_band));
                    kept
                } else {
                    // The whole capped window qualified: deeper entries may
                    // exist beyond the cap.
                    trace.route = Route::Fallback {
                        level: sp.level,
                        enumeration_cap: self.level_cap(sp.level),
                    };
                    enumerate(trace)
                }
            }
        }
    }

    pub fn stats(&self) -> RecursiveIndexStats {
        let mut levels: Vec<LevelStats> = self
            .level_meta
            .iter()
            .enumerate()
            .map(|(li, meta)| LevelStats {
                level: li as u32 + 1,
                tau: self.taus[li],
                trees: meta.trees,
                tree_nodes: meta.tree_nodes,
                clusters: meta.clusters,
                spine_nodes: 0,
                segments: 0,
                cells: 0,
                stored_bits: 0,
                max_spine_segments: 0,
            })
            .collect();
        for sp in &self.spines {
            let lv = &mut levels[sp.level as usize - 1];
            lv.spine_nodes += sp.len as u64;
            for st in &sp.structures {
                lv.segments += st.list.segment_count() as u64;
                lv.cells += st.list.cell_count() as u64;
                lv.stored_bits += st.stored_bits();
                lv.max_spine_segments =
                    lv.max_spine_segments.max(st.list.segment_count() as u64);
            }
        }
        RecursiveIndexStats {
            n: self.index.n(),
            node_count: self.index.node_count(),
            epsilon: self.epsilon,
            terminal_bound: self.terminal_bound,
            levels,
        }
    }

    pub fn to_parts(&self) -> RecursiveIndexParts {
        let mut lists = Vec::with_capacity(self.spines.len() * self.modes.len());
        let mut offsets = Vec::with_capacity(lists.capacity());
        for sp in &self.spines {
            for st in &sp.structures {
                lists.push(st.list.to_raw());
                offsets.push((
                    st.offsets.width(),
                    st.offsets.len() as u64,
                    st.offsets.blocks().to_vec(),
                ));
            }
        }
        RecursiveIndexParts {
            text: self.index.text().as_bytes().to_vec(),
            sa: self.index.sa().to_vec(),
            epsilon: self.epsilon,
            modes: self.modes.clone(),
            lists,
            offsets,
        }
    }

    /// Rebuilds from stored parts; `None` when they are inconsistent with
    /// the deterministic skeleton of the text.
    pub fn from_parts(parts: RecursiveIndexParts) -> Option<Self> {
        if parts.modes.is_empty() {
            return None;
        }
        let text = Text::new(parts.text).ok()?;
        let index = TextIndex::from_parts(text, parts.sa)?;
        let skeleton = build_skeleton(&index, parts.epsilon).ok()?;
        let expected = skeleton.spines.len() * parts.modes.len();
        if parts.lists.len() != expected || parts.offsets.len() != expected {
            return None;
        }
        let mut lists = parts.lists.into_iter();
        let mut offs = parts.offsets.into_iter();
        let mut spines = Vec::with_capacity(skeleton.spines.len());
        for (level, nodes) in &skeleton.spines {
            let top = nodes[0];
            let leaf_count = index.node(top).leaf_count();
            let mut structures = Vec::with_capacity(parts.modes.len());
            for &mode in &parts.modes {
                let list = VersionedOrderedList::from_raw(lists.next()?)?;
                let (width, len, blocks) = offs.next()?;
                let offsets = PackedIntVec::from_raw(width, len as usize, blocks)?;
                let dir = if mode.far() { ListOrder::Descending } else { ListOrder::Ascending };
                let seg = list.segment_count();
                if list.order() != dir
                    || list.max_version() != nodes.len()
                    || width != PackedIntVec::width_for(leaf_count)
                    || offsets.len() != 2 * seg
                {
                    return None;
                }
                // Offsets index the suffix array and payloads index the
                // offsets; both must be in range before any query runs.
                if (0..offsets.len()).any(|o| offsets.get(o) as usize >= leaf_count) {
                    return None;
                }
                if list.to_raw().payloads.iter().any(|&p| p as usize >= seg) {
                    return None;
                }
                structures.push(SpineStructure { list, offsets });
            }
            spines.push(Spine {
                level: *level,
                top,
                len: nodes.len() as u32,
                structures,
            });
        }
        Some(RecursiveIndex {
            index,
            epsilon: parts.epsilon,
            modes: parts.modes,
            taus: skeleton.taus,
            spines,
            routing: skeleton.routing,
            terminal_bound: skeleton.terminal_bound,
            level_meta: skeleton.level_meta,
        })
    }
}
