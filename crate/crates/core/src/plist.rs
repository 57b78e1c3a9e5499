//! Partially persistent sorted doubly linked list.
//!
//! The list stores *life segments*: entries that exist over a contiguous
//! range of versions `[start, end]` and carry a sort key `x` plus an opaque
//! payload. After a single bottom-up build, the list can be read at any
//! version: `heads[v]` enters the list as it looked at version `v`, and
//! following `next` pointers yields the alive entries in key order.
//!
//! Persistence uses node copying: each cell has two timestamped spare slots
//! per pointer direction. A pointer update first tries a spare slot; when
//! both are taken the cell is copied, and the copy's neighbours are updated
//! in turn, which may cascade. Reads at version `v` take the latest slot
//! with timestamp `<= v`, so a cell stays valid for every version before
//! its copy. An ordered search structure (a balanced tree) positions the
//! inserts during the build and is dropped afterwards; queries never touch
//! it.

use crate::error::Error;

const NIL: u32 = u32::MAX;
const SLOTS: usize = 2;
const NEXT: usize = 0;
const PREV: usize = 1;

/// An entry alive on versions `start..=end` (1-based, inclusive).
///
/// `x` is the sort key and must be >= 1. Entries alive at the same version
/// must have distinct `(x, payload)`; ties on `x` order by ascending
/// payload, so payload encodings must make that order meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LifeSegment {
    pub x: u64,
    pub start: u32,
    pub end: u32,
    pub payload: u64,
}

/// Direction of the key order. Payload ties are ascending in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListOrder {
    Ascending,
    Descending,
}

/// Per-query instrumentation, owned by the caller.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub cells_visited: usize,
    pub occurrences_enumerated: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PtrField {
    base: u32,
    // (version, target) pairs in strictly increasing version order;
    // version 0 marks an empty slot.
    mods: [[u32; 2]; SLOTS],
}

impl PtrField {
    fn new(base: u32) -> Self {
        PtrField { base, mods: [[0, 0]; SLOTS] }
    }

    fn value_at(&self, version: u32) -> u32 {
        let mut val = self.base;
        for m in &self.mods {
            if m[0] != 0 && m[0] <= version {
                val = m[1];
            }
        }
        val
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Cell {
    x: u64,
    payload: u64,
    ptrs: [PtrField; 2],
}

/// The built list: immutable, readable at any version in `1..=max_version`.
#[derive(Debug, Clone, PartialEq)]
pub struct VersionedOrderedList {
    order: ListOrder,
    max_version: u32,
    segment_count: u32,
    heads: Vec<u32>,
    cells: Vec<Cell>,
}

/// Serialization view: plain vectors, no invariants beyond what
/// `from_raw` checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListRaw {
    pub descending: bool,
    pub max_version: u32,
    pub segment_count: u32,
    pub heads: Vec<u32>,
    pub xs: Vec<u64>,
    pub payloads: Vec<u64>,
    /// Per cell: next base, prev base.
    pub bases: Vec<u32>,
    /// Per cell: 8 words, (ver, tgt) x 2 slots x {next, prev}.
    pub mods: Vec<u32>,
}

impl VersionedOrderedList {
    /// Builds the list from segments over versions `1..=max_version`.
    pub fn build(
        segments: &[LifeSegment],
        max_version: usize,
        order: ListOrder,
    ) -> Result<Self, Error> {
        for seg in segments {
            if seg.start < 1 || seg.start > seg.end || seg.end as usize > max_version {
                return Err(Error::SegmentOutOfRange {
                    start: seg.start as usize,
                    end: seg.end as usize,
                    max: max_version,
                });
            }
            debug_assert!(seg.x >= 1, "segment keys start at 1");
        }
        let mut builder = Builder::new(order, segments.len());

        // Event sweep: deletions scheduled at end+1, applied before the
        // inserts of the same version. Sorting by key afterwards makes cell
        // allocation order deterministic.
        const DELETE: u8 = 0;
        const INSERT: u8 = 1;
        let key = |seg: &LifeSegment| (builder_ord(order, seg.x), seg.payload);
        let mut events: Vec<(u32, u8, u32)> = Vec::with_capacity(segments.len() * 2);
        for (i, seg) in segments.iter().enumerate() {
            events.push((seg.start, INSERT, i as u32));
            if (seg.end as usize) < max_version {
                events.push((seg.end + 1, DELETE, i as u32));
            }
        }
        events.sort_unstable_by_key(|&(v, kind, i)| (v, kind, key(&segments[i as usize])));

        let mut heads = vec![NIL; max_version + 1];
        let mut ev = 0usize;
        for version in 1..=max_version as u32 {
            while ev < events.len() && events[ev].0 == version {
                let (_, kind, i) = events[ev];
                let seg = &segments[i as usize];
                if kind == INSERT {
                    builder.insert(seg.x, seg.payload, version);
                } else {
                    builder.delete(seg.x, seg.payload, version);
                }
                ev += 1;
            }
            heads[version as usize] = builder.head;
        }
        debug_assert_eq!(ev, events.len());

        Ok(VersionedOrderedList {
            order,
            max_version: max_version as u32,
            segment_count: segments.len() as u32,
            heads,
            cells: builder.cells,
        })
    }

    pub fn order(&self) -> ListOrder {
        self.order
    }

    pub fn max_version(&self) -> usize {
        self.max_version as usize
    }

    pub fn segment_count(&self) -> usize {
        self.segment_count as usize
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Bit count of the list under width-aware packing: callers say how
    /// wide keys and payloads are, pointers take `log(cells + 1)` bits and
    /// timestamps `log(versions + 1)` bits. This is the accounting used to
    /// compare space between index layouts; the in-memory layout is wider.
    pub fn logical_bits(&self, key_bits: u32, payload_bits: u32) -> u64 {
        let pointer = u64::from(crate::packed::PackedIntVec::width_for(self.cells.len() + 1));
        let version =
            u64::from(crate::packed::PackedIntVec::width_for(self.max_version as usize + 2));
        let per_cell = u64::from(key_bits) + u64::from(payload_bits)
            + 2 * pointer
            + 2 * SLOTS as u64 * (version + pointer);
        self.cells.len() as u64 * per_cell + self.heads.len() as u64 * pointer
    }

    /// First `k` entries alive at `version`, in list order. Each visited
    /// cell bumps `stats.cells_visited`; at most `k` cells are touched.
    pub fn first_segments(
        &self,
        version: usize,
        k: usize,
        stats: &mut QueryStats,
    ) -> Result<Vec<(u64, u64)>, Error> {
        if version < 1 || version > self.max_version as usize {
            return Err(Error::VersionOutOfRange { version, max: self.max_version as usize });
        }
        let mut out = Vec::new();
        let mut id = self.heads[version];
        while id != NIL && out.len() < k {
            stats.cells_visited += 1;
            let cell = &self.cells[id as usize];
            out.push((cell.x, cell.payload));
            id = cell.ptrs[NEXT].value_at(version as u32);
        }
        Ok(out)
    }

    /// Walks up to `max` alive entries in list order, keeping entries while
    /// `keep` approves them. Returns the kept prefix and whether the walk
    /// stopped at a rejected entry (as opposed to running out of entries or
    /// hitting `max`).
    pub fn scan_segments(
        &self,
        version: usize,
        max: usize,
        stats: &mut QueryStats,
        mut keep: impl FnMut(u64, u64) -> bool,
    ) -> Result<(Vec<(u64, u64)>, bool), Error> {
        if version < 1 || version > self.max_version as usize {
            return Err(Error::VersionOutOfRange { version, max: self.max_version as usize });
        }
        let mut out = Vec::new();
        let mut id = self.heads[version];
        let mut stopped = false;
        while id != NIL && out.len() < max {
            stats.cells_visited += 1;
            let cell = &self.cells[id as usize];
            if !keep(cell.x, cell.payload) {
                stopped = true;
                break;
            }
            out.push((cell.x, cell.payload));
            id = cell.ptrs[NEXT].value_at(version as u32);
        }
        Ok((out, stopped))
    }

    /// Largest key appearing in any cell, 0 for an empty list.
    pub fn max_key(&self) -> u64 {
        self.cells.iter().map(|c| c.x).max().unwrap_or(0)
    }

    /// `k` smallest keys alive at `version`; the list must be ascending.
    pub fn smallest_segments(
        &self,
        version: usize,
        k: usize,
        stats: &mut QueryStats,
    ) -> Result<Vec<(u64, u64)>, Error> {
        assert!(matches!(self.order, ListOrder::Ascending), "smallest_segments needs an ascending list");
        self.first_segments(version, k, stats)
    }

    /// `k` largest keys alive at `version`; the list must be descending.
    pub fn largest_segments(
        &self,
        version: usize,
        k: usize,
        stats: &mut QueryStats,
    ) -> Result<Vec<(u64, u64)>, Error> {
        assert!(matches!(self.order, ListOrder::Descending), "largest_segments needs a descending list");
        self.first_segments(version, k, stats)
    }

    /// Every entry alive at `version`, in list order.
    pub fn alive_at(&self, version: usize) -> Result<Vec<(u64, u64)>, Error> {
        let mut stats = QueryStats::default();
        self.first_segments(version, self.segment_count as usize, &mut stats)
    }

    pub fn to_raw(&self) -> ListRaw {
        let mut raw = ListRaw {
            descending: matches!(self.order, ListOrder::Descending),
            max_version: self.max_version,
            segment_count: self.segment_count,
            heads: self.heads.clone(),
            xs: Vec::with_capacity(self.cells.len()),
            payloads: Vec::with_capacity(self.cells.len()),
            bases: Vec::with_capacity(self.cells.len() * 2),
            mods: Vec::with_capacity(self.cells.len() * 8),
        };
        for cell in &self.cells {
            raw.xs.push(cell.x);
            raw.payloads.push(cell.payload);
            for dir in [NEXT, PREV] {
                raw.bases.push(cell.ptrs[dir].base);
            }
            for dir in [NEXT, PREV] {
                for m in &cell.ptrs[dir].mods {
                    raw.mods.push(m[0]);
                    raw.mods.push(m[1]);
                }
            }
        }
        raw
    }

    pub fn from_raw(raw: ListRaw) -> Option<Self> {
        let cell_count = raw.xs.len();
        if raw.payloads.len() != cell_count
            || raw.bases.len() != cell_count * 2
            || raw.mods.len() != cell_count * 8
            || raw.heads.len() != raw.max_version as usize + 1
        {
            return None;
        }
        let valid = |id: u32| id == NIL || (id as usize) < cell_count;
        if !raw.heads.iter().all(|&h| valid(h)) || raw.heads[0] != NIL {
            return None;
        }
        let mut cells = Vec::with_capacity(cell_count);
        for i in 0..cell_count {
            let mut ptrs = [PtrField::new(NIL), PtrField::new(NIL)];
            for dir in [NEXT, PREV] {
                let base = raw.bases[i * 2 + dir];
                if !valid(base) {
                    return None;
                }
                let mut mods = [[0u32; 2]; SLOTS];
                for s in 0..SLOTS {
                    let at = i * 8 + dir * 4 + s * 2;
                    let (ver, tgt) = (raw.mods[at], raw.mods[at + 1]);
                    if ver != 0 && (ver > raw.max_version || !valid(tgt)) {
                        return None;
                    }
                    mods[s] = [ver, tgt];
                }
                ptrs[dir] = PtrField { base, mods };
            }
            cells.push(Cell { x: raw.xs[i], payload: raw.payloads[i], ptrs });
        }
        Some(VersionedOrderedList {
            order: if raw.descending { ListOrder::Descending } else { ListOrder::Ascending },
            max_version: raw.max_version,
            segment_count: raw.segment_count,
            heads: raw.heads,
            cells,
        })
    }
}

#[inline]
fn builder_ord(order: ListOrder, x: u64) -> u64 {
    match order {
        ListOrder::Ascending => x,
        ListOrder::Descending => !x,
    }
}

struct Builder {
    order: ListOrder,
    cells: Vec<Cell>,
    // Forward pointer set when a cell is superseded by its copy.
    copied_to: Vec<u32>,
    head: u32,
    // (order-adjusted x, payload) -> cell id; ids may be stale and must be
    // chased through copied_to.
    map: std::collections::BTreeMap<(u64, u64), u32>,
}

impl Builder {
    fn new(order: ListOrder, capacity: usize) -> Self {
        Builder {
            order,
            cells: Vec::with_capacity(capacity),
            copied_to: Vec::with_capacity(capacity),
            head: NIL,
            map: std::collections::BTreeMap::new(),
        }
    }

    fn live(&self, mut id: u32) -> u32 {
        if id == NIL {
            return NIL;
        }
        while self.copied_to[id as usize] != NIL {
            id = self.copied_to[id as usize];
        }
        id
    }

    fn alloc(&mut self, x: u64, payload: u64, next: u32, prev: u32) -> u32 {
        let id = self.cells.len() as u32;
        self.cells.push(Cell {
            x,
            payload,
            ptrs: [PtrField::new(next), PtrField::new(prev)],
        });
        self.copied_to.push(NIL);
        id
    }

    fn insert(&mut self, x: u64, payload: u64, version: u32) {
        let key = (builder_ord(self.order, x), payload);
        let succ = self.map.range(key..).next().map(|(_, &id)| self.live(id));
        let pred = self.map.range(..key).next_back().map(|(_, &id)| self.live(id));
        let id = self.alloc(x, payload, succ.unwrap_or(NIL), pred.unwrap_or(NIL));
        match pred {
            Some(p) => self.set_ptr(p, NEXT, id, version),
            None => self.head = id,
        }
        if let Some(s) = succ {
            self.set_ptr(s, PREV, id, version);
        }
        let overwritten = self.map.insert(key, id);
        debug_assert!(overwritten.is_none(), "duplicate (x, payload) alive at version {version}");
    }

    fn delete(&mut self, x: u64, payload: u64, version: u32) {
        let key = (builder_ord(self.order, x), payload);
        let mapped = self.map.remove(&key).expect("delete of unknown segment");
        let id = self.live(mapped);
        let p = self.cells[id as usize].ptrs[PREV].value_at(version);
        let s = self.cells[id as usize].ptrs[NEXT].value_at(version);
        match p {
            NIL => self.head = s,
            _ => self.set_ptr(p, NEXT, s, version),
        }
        if s != NIL {
            self.set_ptr(s, PREV, p, version);
        }
    }

    /// Semantic update `cell.dir := value` at `version`, with node copying
    /// on slot overflow. Iterative: copies push the neighbour fixes that
    /// keep every current-version pointer aimed at a live cell.
    fn set_ptr(&mut self, cell: u32, dir: usize, value: u32, version: u32) {
        let mut work = vec![(cell, dir, value)];
        while let Some((id, dir, value)) = work.pop() {
            let id = self.live(id);
            let value = self.live(value);
            let field = &self.cells[id as usize].ptrs[dir];
            if field.value_at(version) == value {
                continue;
            }
            // Overwrite a same-version slot in place.
            if let Some(slot) =
                (0..SLOTS).find(|&s| self.cells[id as usize].ptrs[dir].mods[s][0] == version)
            {
                self.cells[id as usize].ptrs[dir].mods[slot][1] = value;
                continue;
            }
            if let Some(slot) =
                (0..SLOTS).find(|&s| self.cells[id as usize].ptrs[dir].mods[s][0] == 0)
            {
                self.cells[id as usize].ptrs[dir].mods[slot] = [version, value];
                continue;
            }
            // Both slots taken: copy the cell with current pointer values
            // (the pending update applied), then redirect the neighbours.
            let cur = &self.cells[id as usize];
            let next =
                if dir == NEXT { value } else { cur.ptrs[NEXT].value_at(version) };
            let prev =
                if dir == PREV { value } else { cur.ptrs[PREV].value_at(version) };
            let (x, payload) = (cur.x, cur.payload);
            let copy = self.alloc(x, payload, next, prev);
            self.copied_to[id as usize] = copy;
            match prev {
                NIL => self.head = copy,
                _ => work.push((prev, NEXT, copy)),
            }
            if next != NIL {
                work.push((next, PREV, copy));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(x: u64, start: u32, end: u32, payload: u64) -> LifeSegment {
        LifeSegment { x, start, end, payload }
    }

    /// Filter-sort-truncate reference, including tie order.
    fn oracle_first(
        segments: &[LifeSegment],
        version: usize,
        k: usize,
        order: ListOrder,
    ) -> Vec<(u64, u64)> {
        let mut alive: Vec<(u64, u64)> = segments
            .iter()
            .filter(|s| (s.start as usize..=s.end as usize).contains(&version))
            .map(|s| (s.x, s.payload))
            .collect();
        alive.sort_unstable_by_key(|&(x, p)| (builder_ord(order, x), p));
        alive.truncate(k);
        alive
    }

    #[test]
    fn version_zero_is_always_empty() {
        let list =
            VersionedOrderedList::build(&[seg(5, 1, 3, 7)], 3, ListOrder::Ascending).unwrap();
        assert!(list.first_segments(0, 5, &mut QueryStats::default()).is_err());
        assert_eq!(list.to_raw().heads[0], NIL);
    }

    #[test]
    fn single_segment_spanning_all_versions() {
        let list =
            VersionedOrderedList::build(&[seg(9, 1, 8, 1)], 8, ListOrder::Ascending).unwrap();
        for v in 1..=8 {
            assert_eq!(list.alive_at(v).unwrap(), vec![(9, 1)]);
        }
    }

    #[test]
    fn point_segment_alive_exactly_once() {
        let list =
            VersionedOrderedList::build(&[seg(4, 3, 3, 2)], 6, ListOrder::Ascending).unwrap();
        for v in 1..=6 {
            let want = if v == 3 { vec![(4, 2)] } else { vec![] };
            assert_eq!(list.alive_at(v).unwrap(), want, "version {v}");
        }
    }

    #[test]
    fn empty_build_answers_empty() {
        let list = VersionedOrderedList::build(&[], 4, ListOrder::Ascending).unwrap();
        for v in 1..=4 {
            assert!(list.alive_at(v).unwrap().is_empty());
        }
        assert_eq!(list.cell_count(), 0);
    }

    #[test]
    fn segment_bounds_are_validated() {
        for bad in [seg(1, 0, 2, 0), seg(1, 3, 2, 0), seg(1, 1, 9, 0)] {
            let err = VersionedOrderedList::build(&[bad], 8, ListOrder::Ascending).unwrap_err();
            assert!(matches!(err, Error::SegmentOutOfRange { .. }), "{bad:?}");
        }
    }

    #[test]
    fn version_bounds_are_validated() {
        let list = VersionedOrderedList::build(&[seg(1, 1, 2, 0)], 2, ListOrder::Ascending).unwrap();
        let mut stats = QueryStats::default();
        assert!(list.smallest_segments(0, 1, &mut stats).is_err());
        assert!(list.smallest_segments(3, 1, &mut stats).is_err());
    }

    #[test]
    fn truncation_and_visit_accounting() {
        let segments: Vec<LifeSegment> = (0..10).map(|i| seg(10 - i, 1, 4, i)).collect();
        let list = VersionedOrderedList::build(&segments, 4, ListOrder::Ascending).unwrap();
        for k in 0..12 {
            let mut stats = QueryStats::default();
            let got = list.smallest_segments(2, k, &mut stats).unwrap();
            assert_eq!(got.len(), k.min(10));
            assert!(
                stats.cells_visited <= k + 1,
                "k={k} visited {} cells",
                stats.cells_visited
            );
            assert_eq!(got, oracle_first(&segments, 2, k, ListOrder::Ascending));
        }
    }

    #[test]
    fn oracle_equivalence_randomized() {
        // 1000 random segment sets per direction, exact comparison at every
        // version for several k, including tie order.
        let mut state = 0xDEAD_BEEF_CAFE_F00Du64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for case in 0..1000 {
            let max_version = 1 + (rng() % 64) as usize;
            let count = (rng() % 257) as usize;
            let segments: Vec<LifeSegment> = (0..count)
                .map(|i| {
                    let a = 1 + (rng() % max_version as u64) as u32;
                    let b = 1 + (rng() % max_version as u64) as u32;
                    // Key collisions are frequent on purpose; payload i keeps
                    // alive entries distinct.
                    seg(1 + rng() % 8, a.min(b), a.max(b), i as u64)
                })
                .collect();
            let order =
                if case % 2 == 0 { ListOrder::Ascending } else { ListOrder::Descending };
            let list = VersionedOrderedList::build(&segments, max_version, order).unwrap();
            assert!(
                list.cell_count() <= 6 * segments.len().max(1),
                "case {case}: {} cells for {} segments",
                list.cell_count(),
                segments.len()
            );
            for version in 1..=max_version {
                for k in [0usize, 1, 2, 5, count, count + 3] {
                    let mut stats = QueryStats::default();
                    let got = list.first_segments(version, k, &mut stats).unwrap();
                    assert_eq!(
                        got,
                        oracle_first(&segments, version, k, order),
                        "case {case} version {version} k {k}"
                    );
                    assert!(stats.cells_visited <= k + 1);
                }
            }
        }
    }

    #[test]
    fn heavy_churn_stays_within_cell_budget() {
        // Staircase of nested and shifted intervals exercises the copy
        // cascade: every version moves several neighbours.
        let mut segments = Vec::new();
        let n = 128u32;
        for i in 0..n {
            segments.push(seg(1 + (i % 16) as u64, 1 + i / 2, (n).min(2 + i), i as u64));
        }
        let list = VersionedOrderedList::build(&segments, n as usize, ListOrder::Ascending).unwrap();
        assert!(
            list.cell_count() <= 6 * segments.len(),
            "{} cells for {} segments",
            list.cell_count(),
            segments.len()
        );
        for version in 1..=n as usize {
            assert_eq!(
                list.alive_at(version).unwrap(),
                oracle_first(&segments, version, segments.len(), ListOrder::Ascending)
            );
        }
    }

    #[test]
    fn raw_roundtrip_preserves_everything() {
        let segments: Vec<LifeSegment> =
            (0..40).map(|i| seg(1 + (i * 7 % 11), 1 + (i % 5) as u32, 5 + (i % 9) as u32, i)).collect();
        let list = VersionedOrderedList::build(&segments, 16, ListOrder::Descending).unwrap();
        let raw = list.to_raw();
        let back = VersionedOrderedList::from_raw(raw.clone()).expect("valid raw parts");
        assert_eq!(back, list);
        assert_eq!(back.to_raw(), raw);
        // Builds are deterministic: same input, same cells.
        let again = VersionedOrderedList::build(&segments, 16, ListOrder::Descending).unwrap();
        assert_eq!(again.to_raw(), raw);
    }

    #[test]
    fn from_raw_rejects_corrupt_parts() {
        let list =
            VersionedOrderedList::build(&[seg(3, 1, 4, 0), seg(2, 2, 3, 1)], 4, ListOrder::Ascending)
                .unwrap();
        let good = list.to_raw();
        let mut bad = good.clone();
        bad.heads[0] = 0;
        assert!(VersionedOrderedList::from_raw(bad).is_none());
        let mut bad = good.clone();
        bad.bases[0] = 99;
        assert!(VersionedOrderedList::from_raw(bad).is_none());
        let mut bad = good.clone();
        bad.heads.pop();
        assert!(VersionedOrderedList::from_raw(bad).is_none());
        let mut bad = good;
        bad.mods[0] = 77;
        assert!(VersionedOrderedList::from_raw(bad).is_none());
    }
}
