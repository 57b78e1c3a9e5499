//! Acceptance gate. Eight checks, one test each: golden answers, brute-force
//! agreement for every query family, store size bounds, cluster partition
//! invariants, per-level size decay, query routing costs, and serialization
//! round-trips. Each test ends by printing its own pass line.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use cooc::cluster::{partition_subtree, tau_schedule, ClusterPartition};
use cooc::oracle::{
    oracle_consecutive, oracle_gap, oracle_nonoverlap, oracle_occurrences, oracle_topk,
    oracle_topk_far,
};
use cooc::text::{NodeId, ROOT};
use cooc::{ConsecutivePair, FullIndex, Mode, Route, Text, TextIndex};
use cooc::RecursiveIndex;
use cooc_cli::format::{deserialize, serialize_full, serialize_recursive, LoadedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SONG: &[u8] = b"BATMAN AND ANNA SING NANANANA AND EAT BANANAS";

fn random_text(rng: &mut ChaCha8Rng, n: usize, sigma: u8) -> Vec<u8> {
    (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect()
}

fn fibonacci_word(n: usize) -> Vec<u8> {
    let (mut prev, mut cur) = (vec![b'a'], b"ab".to_vec());
    while cur.len() < n {
        let next = [cur.clone(), prev].concat();
        prev = cur;
        cur = next;
    }
    cur.truncate(n);
    cur
}

fn substring_pattern(rng: &mut ChaCha8Rng, text: &[u8], max_len: usize) -> Vec<u8> {
    let a = rng.gen_range(0..text.len());
    let b = (a + 1 + rng.gen_range(0..max_len)).min(text.len());
    text[a..b].to_vec()
}

fn positions(pairs: &[ConsecutivePair]) -> Vec<(usize, usize)> {
    pairs.iter().map(|p| (p.left, p.right)).collect()
}

fn as_set(pairs: &[ConsecutivePair]) -> BTreeSet<(usize, usize)> {
    pairs.iter().map(|p| (p.left, p.right)).collect()
}

#[test]
fn criterion_1_golden_top5_on_both_structures() {
    let t0 = Instant::now();
    let check = |pairs: Vec<ConsecutivePair>, label: &str| {
        let d: Vec<usize> = pairs.iter().map(|p| p.distance()).collect();
        assert_eq!(d, [2, 2, 2, 3, 4], "{label}: distance ranking for AN");
        let head: BTreeSet<(usize, usize)> = positions(&pairs[..3]).into_iter().collect();
        let want: BTreeSet<(usize, usize)> = [(22, 24), (24, 26), (39, 41)].into();
        assert_eq!(head, want, "{label}: the distance-2 pairs");
        assert_eq!((pairs[3].left, pairs[3].right), (4, 7), "{label}: the distance-3 pair");
        let fifth = (pairs[4].left, pairs[4].right);
        assert!(
            fifth == (7, 11) || fifth == (26, 30),
            "{label}: fifth answer must be a distance-4 pair, got {fifth:?}"
        );
    };
    let full = FullIndex::build(Text::new(SONG.to_vec()).unwrap(), false);
    check(full.query_topk(b"AN", 5), "full");
    for eps in [(1, 1), (1, 2)] {
        let rec =
            RecursiveIndex::build(Text::new(SONG.to_vec()).unwrap(), eps, &[Mode::Closest])
                .unwrap();
        check(rec.query_topk(b"AN", 5).unwrap(), &format!("recursive eps {}/{}", eps.0, eps.1));
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "golden checks took {elapsed:?}");
    println!("acceptance 1: top-5 close pairs of AN agree on every structure ({elapsed:?}): pass");
}

#[test]
fn criterion_2_distance_multiset_of_a() {
    let want: Vec<usize> = vec![2, 2, 2, 2, 2, 2, 3, 3, 3, 4, 4, 5, 8];
    let mut by_oracle: Vec<usize> =
        oracle_consecutive(SONG, b"A").iter().map(|p| p.distance()).collect();
    by_oracle.sort_unstable();
    assert_eq!(by_oracle, want, "brute-force distance multiset of A");

    let full = FullIndex::build(Text::new(SONG.to_vec()).unwrap(), false);
    let mut by_index: Vec<usize> =
        full.query_topk(b"A", usize::MAX).iter().map(|p| p.distance()).collect();
    by_index.sort_unstable();
    assert_eq!(by_index, want, "distance multiset of A read off the full store");
    println!("acceptance 2: distance multiset of A is {{2x6, 3x3, 4x2, 5, 8}} both ways: pass");
}

#[test]
fn criterion_3_every_family_agrees_with_brute_force() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ACC_0003);
    // cases per family: topk, far, gap with fixed alpha, gap with fixed
    // beta, non-overlapping
    let mut cases = [0u64; 5];
    for ti in 0..48usize {
        let sigma = [2u8, 4, 26][ti % 3];
        let n = match ti % 4 {
            0 => 1 + rng.gen_range(0..64),
            1 => 65 + rng.gen_range(0..448),
            _ => 512 + rng.gen_range(0..1537),
        };
        let text = if ti % 8 == 5 {
            let mut t = b"ab".repeat(n / 2 + 1);
            t.truncate(n.max(2));
            t
        } else {
            random_text(&mut rng, n, sigma)
        };
        let n = text.len() as u64;
        let alpha = 1 + rng.gen_range(0..4u64);
        let beta = alpha + rng.gen_range(0..8u64);
        let eps = if ti % 5 == 0 { (1, 2) } else { (1, 1) };
        let full = FullIndex::build(Text::new(text.clone()).unwrap(), true);
        let rec = RecursiveIndex::build(
            Text::new(text.clone()).unwrap(),
            eps,
            &[
                Mode::Closest,
                Mode::Farthest,
                Mode::ClosestMinGap(alpha),
                Mode::FarthestMaxGap(beta),
                Mode::FarthestMaxGap(n),
            ],
        )
        .unwrap();
        for _ in 0..22 {
            let pattern = if rng.gen_bool(0.1) {
                vec![b'z'; 1 + rng.gen_range(0..3)]
            } else {
                substring_pattern(&mut rng, &text, 8)
            };
            let occ = oracle_occurrences(&text, &pattern).len();
            let valid: HashSet<(usize, usize)> = oracle_consecutive(&text, &pattern)
                .iter()
                .map(|p| (p.left, p.right))
                .collect();
            let assert_valid = |pairs: &[ConsecutivePair], family: &str| {
                for p in pairs {
                    assert!(
                        valid.contains(&(p.left, p.right)),
                        "{family} reported ({}, {}), not a consecutive occurrence pair \
                         of {:?} in text {ti}",
                        p.left,
                        p.right,
                        String::from_utf8_lossy(&pattern)
                    );
                }
            };
            for k in [0, 1, 2, 5, occ.saturating_sub(1), occ + 3] {
                let want = oracle_topk(&text, &pattern, k);
                assert_valid(&want, "oracle-topk");
                assert_eq!(full.query_topk(&pattern, k), want, "full topk, text {ti} k {k}");
                assert_eq!(
                    rec.query_topk(&pattern, k).unwrap(),
                    want,
                    "recursive topk, text {ti} k {k}"
                );
                cases[0] += 1;

                let want = oracle_topk_far(&text, &pattern, k);
                assert_valid(&want, "oracle-far");
                assert_eq!(
                    full.query_topk_far(&pattern, k).unwrap(),
                    want,
                    "full far, text {ti} k {k}"
                );
                assert_eq!(
                    rec.query_topk_far(&pattern, k).unwrap(),
                    want,
                    "recursive far, text {ti} k {k}"
                );
                cases[1] += 1;

                let qb = alpha + rng.gen_range(0..9u64);
                let got = rec.query_gap_with_beta(&pattern, qb).unwrap();
                assert_valid(&got, "gap fixed-alpha");
                assert_eq!(
                    as_set(&got),
                    as_set(&oracle_gap(&text, &pattern, alpha as usize, qb as usize)),
                    "band [{alpha}, {qb}], text {ti}"
                );
                cases[2] += 1;

                let qa = 1 + rng.gen_range(0..beta);
                let got = rec.query_gap_with_alpha(&pattern, qa).unwrap();
                assert_valid(&got, "gap fixed-beta");
                assert_eq!(
                    as_set(&got),
                    as_set(&oracle_gap(&text, &pattern, qa as usize, beta as usize)),
                    "band [{qa}, {beta}], text {ti}"
                );
                cases[3] += 1;
            }
            let got = rec.query_nonoverlapping(&pattern).unwrap();
            assert_valid(&got, "nonoverlap");
            assert_eq!(
                got,
                oracle_nonoverlap(&text, &pattern),
                "non-overlapping pairs, text {ti}"
            );
            cases[4] += 1;
        }
    }
    for (family, count) in cases.iter().enumerate() {
        assert!(*count >= 1000, "family {family} covered only {count} cases");
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 300, "fuzz took {elapsed:?}");
    println!(
        "acceptance 3: {} brute-force comparisons across five families ({elapsed:?}): pass",
        cases.iter().sum::<u64>()
    );
}

#[test]
fn criterion_4_full_store_stays_within_the_tenure_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ACC_0004);
    let mut report = String::new();
    for n in [4096usize, 65536] {
        let classes: [(&str, Vec<u8>); 3] = [
            ("random", random_text(&mut rng, n, 26)),
            ("periodic", {
                let mut t = b"AB".repeat(n / 2 + 1);
                t.truncate(n);
                t
            }),
            ("fibonacci", fibonacci_word(n)),
        ];
        for (label, text) in classes {
            let full = FullIndex::build(Text::new(text).unwrap(), false);
            let bound = 3 * n as u64 * (n.ilog2() as u64 + 1);
            let got = full.segment_count();
            assert!(got <= bound, "{label} n={n}: {got} tenures exceed the bound {bound}");
            report.push_str(&format!(" {label}/{n}={got}"));
        }
    }
    println!("acceptance 4: full-store tenures within 3n(log n + 1):{report}: pass");
}

/// Structural checks for one partitioned subtree: ownership, size,
/// boundaries, spine shape, and the cluster count bound.
fn validate_partition(
    index: &TextIndex,
    root: NodeId,
    tau: usize,
    part: &ClusterPartition,
) -> Vec<Vec<NodeId>> {
    let mut subtree = Vec::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        subtree.push(v);
        stack.extend_from_slice(&index.node(v).children);
    }
    assert_eq!(subtree.len(), part.tree_nodes, "reported node count of subtree {root}");

    let mut owner: std::collections::HashMap<NodeId, usize> = std::collections::HashMap::new();
    for (ci, cluster) in part.clusters.iter().enumerate() {
        assert!(
            cluster.edges.len() <= tau.saturating_sub(1).max(1),
            "cluster {ci} holds {} edges at tau {tau}",
            cluster.edges.len()
        );
        let members: HashSet<NodeId> = cluster.edges.iter().copied().collect();
        for &e in &cluster.edges {
            assert!(owner.insert(e, ci).is_none(), "edge into {e} owned twice");
        }
        // Connectivity plus the boundary rule: walking up from any member
        // stays inside the cluster until the top, and only the top and the
        // declared bottom may touch edges outside the cluster.
        for &e in &cluster.edges {
            let mut v = e;
            while v != cluster.top {
                assert!(members.contains(&v), "cluster {ci} is not connected at {v}");
                v = index.node(v).parent;
            }
        }
        for &v in members.iter().chain([cluster.top].iter()) {
            if v == cluster.top || Some(v) == cluster.bottom {
                continue;
            }
            for &c in &index.node(v).children {
                assert!(
                    members.contains(&c),
                    "interior node {v} of cluster {ci} has the outside child {c}"
                );
            }
        }
        let spine = cluster.spine(index);
        assert_eq!(spine[0], cluster.top, "spine starts at the cluster top");
        assert_eq!(
            *spine.last().unwrap(),
            cluster.bottom.unwrap_or(cluster.top),
            "spine ends at the cluster bottom"
        );
        for w in spine.windows(2) {
            assert_eq!(index.node(w[1]).parent, w[0], "spine is a downward path");
        }
    }
    for &v in &subtree {
        if v != root {
            assert!(owner.contains_key(&v), "edge into {v} belongs to no cluster");
        }
    }
    let limit = 8 * part.tree_nodes.div_ceil(tau);
    assert!(
        part.clusters.len() <= limit,
        "{} clusters for {} nodes at tau {tau}",
        part.clusters.len(),
        part.tree_nodes
    );
    part.clusters.iter().map(|c| c.spine(index)).collect()
}

#[test]
fn criterion_5_cluster_invariants_hold_on_every_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ACC_0005);
    let mut total_clusters = 0usize;
    let mut deepest = 0usize;
    for ti in 0..24usize {
        let sigma = [2u8, 4, 26][ti % 3];
        let n = match ti % 3 {
            0 => 100 + rng.gen_range(0..400),
            1 => 500 + rng.gen_range(0..1100),
            _ => 1600 + rng.gen_range(0..2500),
        };
        let text = if ti % 7 == 3 {
            let mut t = b"abc".repeat(n / 3 + 1);
            t.truncate(n);
            t
        } else {
            random_text(&mut rng, n, sigma)
        };
        let eps = if ti % 2 == 0 { (1, 1) } else { (1, 2) };
        let index = TextIndex::build(Text::new(text.clone()).unwrap());
        let taus = tau_schedule(index.n(), eps).unwrap();
        deepest = deepest.max(taus.len());

        // Walk the same recursion the index builds: partition each tree,
        // then recurse into the subtrees hanging off each spine.
        let mut trees: Vec<NodeId> = vec![ROOT];
        let mut per_level: Vec<(u64, u64, u64)> = Vec::new();
        for &tau in &taus {
            let mut next = Vec::new();
            let (mut clusters, mut spine_nodes) = (0u64, 0u64);
            for &tree_root in &trees {
                let part = partition_subtree(&index, tree_root, tau);
                let spines = validate_partition(&index, tree_root, tau, &part);
                clusters += part.clusters.len() as u64;
                total_clusters += part.clusters.len();
                for (cluster, spine) in part.clusters.iter().zip(&spines) {
                    spine_nodes += spine.len() as u64;
                    let on_spine: HashSet<NodeId> = spine.iter().copied().collect();
                    let mut roots: Vec<NodeId> = cluster
                        .edges
                        .iter()
                        .copied()
                        .filter(|&c| {
                            on_spine.contains(&index.node(c).parent) && !on_spine.contains(&c)
                        })
                        .collect();
                    roots.sort_unstable();
                    next.extend_from_slice(&roots);
                }
            }
            per_level.push((trees.len() as u64, clusters, spine_nodes));
            trees = next;
            if trees.is_empty() {
                break;
            }
        }

        // The shipped structure must have walked the identical recursion,
        // and no spine may store more than 8 tau tenures.
        let rec =
            RecursiveIndex::build(Text::new(text).unwrap(), eps, &[Mode::Closest]).unwrap();
        let stats = rec.stats();
        assert_eq!(stats.levels.len(), per_level.len(), "level count, text {ti}");
        for (lv, &(trees, clusters, spine_nodes)) in stats.levels.iter().zip(&per_level) {
            assert_eq!(lv.trees, trees, "trees at level {}, text {ti}", lv.level);
            assert_eq!(lv.clusters, clusters, "clusters at level {}, text {ti}", lv.level);
            assert_eq!(
                lv.spine_nodes, spine_nodes,
                "spine nodes at level {}, text {ti}",
                lv.level
            );
            assert!(
                lv.max_spine_segments <= 8 * lv.tau as u64,
                "a level-{} spine stores {} tenures at tau {}",
                lv.level,
                lv.max_spine_segments,
                lv.tau
            );
        }
    }
    assert!(total_clusters > 500, "corpus too small: {total_clusters} clusters");
    assert!(deepest >= 2, "corpus never produced a multi-level recursion");
    println!(
        "acceptance 5: partition invariants on {total_clusters} clusters, \
         recursion depth up to {deepest}: pass"
    );
}

#[test]
fn criterion_6_stored_bits_decay_across_levels() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ACC_0006);
    let text = random_text(&mut rng, 1 << 16, 26);
    let rec = RecursiveIndex::build(Text::new(text).unwrap(), (1, 1), &[Mode::Closest]).unwrap();
    assert_eq!(rec.taus(), &[256, 16], "level caps for n = 2^16 at eps 1");
    let bits: Vec<u64> = rec.stats().levels.iter().map(|l| l.stored_bits).collect();
    assert_eq!(bits.len(), 2);
    for w in bits.windows(2) {
        assert!(
            w[0] as f64 >= 1.5 * w[1] as f64,
            "stored bits {} -> {} shrink by less than 1.5x",
            w[0],
            w[1]
        );
    }
    println!("acceptance 6: per-level stored bits {bits:?} decay by at least 1.5x: pass");
}

#[test]
fn criterion_7_routes_respect_the_cost_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ACC_0007);
    let (mut lists, mut fallbacks, mut terminals, mut no_locus) = (0u64, 0u64, 0u64, 0u64);
    for ti in 0..16usize {
        let sigma = [2u8, 3, 26][ti % 3];
        let n = 150 + rng.gen_range(0..1200);
        let text = random_text(&mut rng, n, sigma);
        let eps = if ti % 2 == 0 { (1, 1) } else { (1, 2) };
        let rec = RecursiveIndex::build(
            Text::new(text.clone()).unwrap(),
            eps,
            &[Mode::Closest, Mode::Farthest],
        )
        .unwrap();
        let taus = rec.taus().to_vec();
        for _ in 0..40 {
            let pattern = if rng.gen_bool(0.1) {
                vec![b'z'; 2]
            } else {
                substring_pattern(&mut rng, &text, 5)
            };
            let k = [0, 1, 2, 5, 20, 60, 300][rng.gen_range(0..7)];
            for far in [false, true] {
                let (pairs, trace) = if far {
                    rec.query_topk_far_traced(&pattern, k).unwrap()
                } else {
                    rec.query_topk_traced(&pattern, k).unwrap()
                };
                match trace.route {
                    Route::List { .. } => {
                        assert_eq!(
                            trace.stats.occurrences_enumerated, 0,
                            "list answers never enumerate occurrences"
                        );
                        assert!(
                            trace.stats.cells_visited <= k + 1,
                            "k={k} visited {} cells",
                            trace.stats.cells_visited
                        );
                        lists += 1;
                    }
                    Route::Fallback { level, enumeration_cap } => {
                        let expect =
                            if level == 1 { n } else { taus[level as usize - 2] };
                        assert_eq!(enumeration_cap, expect, "fallback cap one level up");
                        assert!(
                            trace.stats.occurrences_enumerated <= enumeration_cap,
                            "enumerated {} over the cap {enumeration_cap}",
                            trace.stats.occurrences_enumerated
                        );
                        fallbacks += 1;
                    }
                    Route::Terminal { enumeration_cap } => {
                        assert_eq!(enumeration_cap, rec.terminal_bound());
                        assert!(
                            trace.stats.occurrences_enumerated <= enumeration_cap,
                            "enumerated {} over the terminal cap {enumeration_cap}",
                            trace.stats.occurrences_enumerated
                        );
                        terminals += 1;
                    }
                    Route::NoLocus => {
                        assert!(pairs.is_empty());
                        no_locus += 1;
                    }
                }
            }
        }
    }
    assert!(lists > 0, "no query was answered straight off a list");
    assert!(fallbacks > 0, "no query exercised the fallback");
    assert!(terminals > 0, "no query hit a terminal locus");
    assert!(no_locus > 0, "no query missed the text");
    println!(
        "acceptance 7: routing bounds held on {lists} list, {fallbacks} fallback, \
         {terminals} terminal, {no_locus} absent queries: pass"
    );
}

#[test]
fn criterion_8_serialized_indexes_roundtrip_bit_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ACC_0008);
    for case in 0..100usize {
        let n = 2 + rng.gen_range(0..400);
        let sigma = [2u8, 4, 26][case % 3];
        let text = random_text(&mut rng, n, sigma);
        let pattern = substring_pattern(&mut rng, &text, 6);
        if case % 2 == 0 {
            let built = FullIndex::build(Text::new(text.clone()).unwrap(), true);
            let again = FullIndex::build(Text::new(text.clone()).unwrap(), true);
            let bytes = serialize_full(&built);
            assert_eq!(bytes, serialize_full(&again), "case {case}: rebuild changed the file");
            let LoadedIndex::Full(back) = deserialize(&bytes).unwrap() else {
                panic!("case {case}: full index loaded as another kind");
            };
            for k in [0, 3, 17] {
                assert_eq!(built.query_topk(&pattern, k), back.query_topk(&pattern, k));
                assert_eq!(
                    built.query_topk_far(&pattern, k).unwrap(),
                    back.query_topk_far(&pattern, k).unwrap()
                );
            }
            assert_eq!(serialize_full(&back), bytes, "case {case}: reserialization drifted");
        } else {
            let alpha = 1 + rng.gen_range(0..3u64);
            let beta = alpha + rng.gen_range(0..5u64);
            let modes = [
                Mode::Closest,
                Mode::Farthest,
                Mode::ClosestMinGap(alpha),
                Mode::FarthestMaxGap(beta),
                Mode::FarthestMaxGap(n as u64),
            ];
            let built =
                RecursiveIndex::build(Text::new(text.clone()).unwrap(), (1, 1), &modes).unwrap();
            let again =
                RecursiveIndex::build(Text::new(text.clone()).unwrap(), (1, 1), &modes).unwrap();
            let bytes = serialize_recursive(&built);
            assert_eq!(
                bytes,
                serialize_recursive(&again),
                "case {case}: rebuild changed the file"
            );
            let LoadedIndex::Recursive(back) = deserialize(&bytes).unwrap() else {
                panic!("case {case}: recursive index loaded as another kind");
            };
            for k in [0, 3, 17] {
                assert_eq!(
                    built.query_topk(&pattern, k).unwrap(),
                    back.query_topk(&pattern, k).unwrap()
                );
                assert_eq!(
                    built.query_topk_far(&pattern, k).unwrap(),
                    back.query_topk_far(&pattern, k).unwrap()
                );
            }
            assert_eq!(
                built.query_gap_with_beta(&pattern, alpha + 2).unwrap(),
                back.query_gap_with_beta(&pattern, alpha + 2).unwrap()
            );
            assert_eq!(
                built.query_gap_with_alpha(&pattern, 1).unwrap(),
                back.query_gap_with_alpha(&pattern, 1).unwrap()
            );
            assert_eq!(
                built.query_nonoverlapping(&pattern).unwrap(),
                back.query_nonoverlapping(&pattern).unwrap()
            );
            assert_eq!(
                serialize_recursive(&back),
                bytes,
                "case {case}: reserialization drifted"
            );
        }
    }
    println!("acceptance 8: 100 index files round-trip bit-exact with identical answers: pass");
}
