//! End-to-end equivalence of both index families against brute force, over
//! generated texts and patterns, including patterns absent from the text.

use cooc::oracle::{oracle_gap, oracle_nonoverlap, oracle_occurrences, oracle_topk, oracle_topk_far};
use cooc::{ConsecutivePair, FullIndex, Mode, PairOrder, RecursiveIndex, Text};
use proptest::prelude::*;

fn text_strategy() -> impl Strategy<Value = Vec<u8>> {
    let alphabet = prop_oneof![Just(2u8), Just(3), Just(26)];
    (alphabet, 1usize..260).prop_flat_map(|(sigma, len)| {
        proptest::collection::vec(0..sigma, len)
            .prop_map(|v| v.into_iter().map(|b| b + b'a').collect())
    })
}

/// Mix of substrings of the text and unrelated patterns.
fn pattern_for(text: &[u8], pick: (usize, usize, bool)) -> Vec<u8> {
    let (start, len, foreign) = pick;
    if foreign {
        return vec![b'z'; 1 + len % 4];
    }
    let a = start % text.len();
    let b = (a + 1 + len % 7).min(text.len());
    text[a..b].to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn full_index_reports_exactly_the_oracle_ranking(
        text in text_strategy(),
        picks in proptest::collection::vec((0usize..1000, 0usize..1000, proptest::bool::weighted(0.15)), 1..12),
        k in 0usize..40,
    ) {
        let index = FullIndex::build(Text::new(text.clone()).unwrap(), true);
        for pick in picks {
            let pattern = pattern_for(&text, pick);
            prop_assert_eq!(index.query_topk(&pattern, k), oracle_topk(&text, &pattern, k));
            prop_assert_eq!(
                index.query_topk_far(&pattern, k).unwrap(),
                oracle_topk_far(&text, &pattern, k)
            );
        }
    }

    #[test]
    fn recursive_index_reports_exactly_the_oracle_ranking(
        text in text_strategy(),
        picks in proptest::collection::vec((0usize..1000, 0usize..1000, proptest::bool::weighted(0.15)), 1..10),
        k in 0usize..40,
        alpha in 1u64..6,
        extra in 0u64..8,
        eps_half in proptest::bool::ANY,
    ) {
        let beta = alpha + extra;
        let n = text.len() as u64;
        let eps = if eps_half { (1, 2) } else { (1, 1) };
        let index = RecursiveIndex::build(
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
        for pick in picks {
            let pattern = pattern_for(&text, pick);
            prop_assert_eq!(index.query_topk(&pattern, k).unwrap(), oracle_topk(&text, &pattern, k));
            prop_assert_eq!(
                index.query_topk_far(&pattern, k).unwrap(),
                oracle_topk_far(&text, &pattern, k)
            );
            let qb = alpha + extra / 2;
            prop_assert_eq!(
                index.query_gap_with_beta(&pattern, qb).unwrap(),
                oracle_gap(&text, &pattern, alpha as usize, qb as usize)
            );
            let qa = 1 + alpha / 2;
            let mut far_band = oracle_gap(&text, &pattern, qa as usize, beta as usize);
            far_band.sort_unstable_by(|x, y| PairOrder::FarFirst.cmp(x, y));
            prop_assert_eq!(index.query_gap_with_alpha(&pattern, qa).unwrap(), far_band);
            prop_assert_eq!(
                index.query_nonoverlapping(&pattern).unwrap(),
                oracle_nonoverlap(&text, &pattern)
            );
        }
    }

    #[test]
    fn serialized_forms_answer_like_their_builders(
        text in text_strategy(),
        start in 0usize..1000,
        len in 0usize..1000,
    ) {
        let pattern = pattern_for(&text, (start, len, false));
        let full = FullIndex::build(Text::new(text.clone()).unwrap(), false);
        let full_back = FullIndex::from_parts(full.to_parts()).expect("own parts load");
        prop_assert_eq!(full.query_topk(&pattern, 10), full_back.query_topk(&pattern, 10));

        let rec =
            RecursiveIndex::build(Text::new(text.clone()).unwrap(), (1, 1), &[Mode::Closest])
                .unwrap();
        let rec_back = RecursiveIndex::from_parts(rec.to_parts()).expect("own parts load");
        prop_assert_eq!(
            rec.query_topk(&pattern, 10).unwrap(),
            rec_back.query_topk(&pattern, 10).unwrap()
        );
    }
}

/// Answers never depend on which trade-off produced them.
#[test]
fn families_agree_with_each_other_everywhere() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x90AB_CDEF);
    for _ in 0..20 {
        let len = rng.gen_range(30..500);
        let sigma = *[2, 4, 26].get(rng.gen_range(0..3)).unwrap();
        let text: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..sigma)).collect();
        let full = FullIndex::build(Text::new(text.clone()).unwrap(), true);
        let rec = RecursiveIndex::build(
            Text::new(text.clone()).unwrap(),
            (1, 1),
            &[Mode::Closest, Mode::Farthest],
        )
        .unwrap();
        for _ in 0..30 {
            let a = rng.gen_range(0..len);
            let b = (a + 1 + rng.gen_range(0..6)).min(len);
            let pattern = &text[a..b];
            let occ = oracle_occurrences(&text, pattern).len();
            for k in [0, 1, 2, occ.saturating_sub(1), occ + 1] {
                let close: Vec<ConsecutivePair> = full.query_topk(pattern, k);
                assert_eq!(close, rec.query_topk(pattern, k).unwrap());
                assert_eq!(
                    full.query_topk_far(pattern, k).unwrap(),
                    rec.query_topk_far(pattern, k).unwrap()
                );
            }
        }
    }
}
