use proptest::prelude::*;

use srq_core::bitseq::{BitSeq, StorageMode};
use srq_core::cheap_query::HeapEncoding;
use srq_core::combined::{CombinedEncoding, Variant};
use srq_core::dfuds::DfudsTree;
use srq_core::heap_build::{build_colors, build_dfuds};
use srq_core::io::{parse_array, parse_array_text, write_array_binary, write_array_text};
use srq_core::oracle::{oracle_answer, oracle_tree};
use srq_core::query::{QueryKind, QuerySpec, Side};

fn arrays(max_len: usize, alphabet: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0..alphabet, 1..max_len)
}

fn variant() -> impl Strategy<Value = Variant> {
    prop::sample::select(Variant::ALL.to_vec())
}

fn query_for(n: usize) -> impl Strategy<Value = QuerySpec> {
    let kinds = vec![
        QueryKind::RMinQ,
        QueryKind::RLMinQ,
        QueryKind::RRMinQ,
        QueryKind::RkMinQ,
        QueryKind::RMaxQ,
        QueryKind::RLMaxQ,
        QueryKind::RRMaxQ,
        QueryKind::RkMaxQ,
        QueryKind::Psv,
        QueryKind::Nsv,
        QueryKind::Plv,
        QueryKind::Nlv,
    ];
    (prop::sample::select(kinds), 1..=n, 1..=n, 1usize..5).prop_map(|(kind, x, y, k)| {
        let (i, j) = (x.min(y), x.max(y));
        if kind.is_kth() {
            QuerySpec::kth(kind, i, j, k)
        } else if kind.is_range() {
            QuerySpec::range(kind, i, j)
        } else {
            QuerySpec::point(kind, x)
        }
    })
}

fn array_and_queries() -> impl Strategy<Value = (Vec<i64>, Vec<QuerySpec>)> {
    arrays(120, 6).prop_flat_map(|a| {
        let n = a.len();
        (Just(a), prop::collection::vec(query_for(n), 1..40))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rank_select_agree_with_naive(bits in prop::collection::vec(any::<bool>(), 0..3000), compressed in any::<bool>()) {
        let mode = if compressed { StorageMode::Compressed } else { StorageMode::Plain };
        let s = BitSeq::build(&bits, mode);
        prop_assert_eq!(s.len(), bits.len());
        let mut ones = 0;
        for (i, &b) in bits.iter().enumerate() {
            prop_assert_eq!(s.get(i + 1), b);
            if b {
                ones += 1;
                prop_assert_eq!(s.select1(ones), Some(i + 1));
            } else {
                prop_assert_eq!(s.select0(i + 1 - ones), Some(i + 1));
            }
            prop_assert_eq!(s.rank1(i + 1), ones);
        }
        prop_assert_eq!(s.select1(ones + 1), None);
        prop_assert_eq!(BitSeq::from_bytes(&s.to_bytes()).unwrap(), s);
    }

    #[test]
    fn dfuds_tree_matches_explicit_heap(a in arrays(80, 5), max_side in any::<bool>()) {
        let side = if max_side { Side::Max } else { Side::Min };
        let t = DfudsTree::new(build_dfuds(&a, side)).unwrap();
        let o = oracle_tree(&a, side);
        prop_assert_eq!(t.bits().to_paren_string(), o.dfuds_string());
        prop_assert_eq!(build_colors(&a, side).to_bit_string(), o.color_string());
        for x in 0..=a.len() {
            let p = t.parent(x).unwrap();
            prop_assert_eq!(p, if x == 0 { None } else { Some(o.parent[x]) });
            prop_assert_eq!(t.degree(x).unwrap(), o.children[x].len());
            for (i, &c) in o.children[x].iter().enumerate() {
                prop_assert_eq!(t.child(x, i + 1).unwrap(), c);
                prop_assert_eq!(t.child_rank(c).unwrap(), i);
            }
            prop_assert_eq!(t.pre_rank(t.pre_select(x).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn variants_answer_like_the_oracle((a, qs) in array_and_queries(), v in variant()) {
        let e = CombinedEncoding::encode(&a, v).unwrap();
        for q in &qs {
            let want = oracle_answer(&a, q).unwrap();
            if e.supports(q) {
                prop_assert_eq!(e.query(q).unwrap(), want, "{}", q);
            } else {
                prop_assert!(e.query(q).is_err());
            }
        }
    }

    #[test]
    fn heap_encoding_answers_like_the_oracle((a, qs) in array_and_queries()) {
        let min = HeapEncoding::build(&a, Side::Min, true);
        let max = HeapEncoding::build(&a, Side::Max, true);
        for q in &qs {
            let h = if q.kind.side() == Side::Min { &min } else { &max };
            prop_assert_eq!(h.answer(q).unwrap(), oracle_answer(&a, q).unwrap(), "{}", q);
        }
    }

    #[test]
    fn encodings_round_trip(a in arrays(300, 4), v in variant()) {
        let e = CombinedEncoding::encode(&a, v).unwrap();
        let bytes = e.to_bytes();
        let back = CombinedEncoding::from_bytes(&bytes).unwrap();
        prop_assert_eq!(back.to_bytes(), bytes);
        let q = QuerySpec::range(QueryKind::RMaxQ, 1, a.len());
        prop_assert_eq!(back.query(&q).unwrap(), oracle_answer(&a, &q).unwrap());
    }

    #[test]
    fn block_decoding_covers_both_heaps(a in arrays(400, 8)) {
        let e = CombinedEncoding::encode(&a, Variant::D).unwrap();
        let w = e.block_width();
        for side in [Side::Min, Side::Max] {
            let d = build_dfuds(&a, side);
            for i in 1..=e.block_count() {
                let s = (i - 1) * w;
                prop_assert_eq!(e.decode_block(side, i).unwrap(), d.bits_at(s, w.min(d.len() - s)));
            }
        }
    }

    #[test]
    fn arrays_round_trip_through_files(a in prop::collection::vec(any::<i64>(), 0..200)) {
        prop_assert_eq!(parse_array_text(&write_array_text(&a)).unwrap(), a.clone());
        prop_assert_eq!(parse_array(&write_array_binary(&a)).unwrap(), a);
    }
}
