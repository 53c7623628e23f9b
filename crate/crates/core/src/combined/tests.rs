use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::*;
use crate::heap_build::{build_dfuds, build_dprime};
use crate::oracle::oracle_answer;
use crate::query::QueryKind;

const SAMPLE_ARRAY: [i64; 12] = [2, 5, 3, 4, 4, 4, 2, 1, 1, 2, 4, 3];

fn random_array(rng: &mut StdRng, n: usize, dup: f64) -> Vec<i64> {
    let mut a = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 && rng.gen_bool(dup) {
            a.push(a[i - 1]);
        } else {
            a.push(rng.gen_range(0..1_000_000));
        }
    }
    a
}

fn blocks_of(d: &BitSeq, w: usize) -> Vec<u64> {
    (0..d.len().div_ceil(w)).map(|b| d.bits_at(b * w, w.min(d.len() - b * w))).collect()
}

fn check_blocks(a: &[i64], e: &CombinedEncoding) {
    let w = e.block_width();
    for side in [Side::Min, Side::Max] {
        let want = blocks_of(&build_dfuds(a, side), w);
        assert_eq!(want.len(), e.block_count());
        for (i, &b) in want.iter().enumerate() {
            assert_eq!(e.decode_block(side, i + 1).unwrap(), b, "{a:?} {side:?} block {}", i + 1);
        }
    }
}

#[test]
fn sample_array_blocks() {
    for v in [Variant::B, Variant::D] {
        let e = CombinedEncoding::encode(&SAMPLE_ARRAY, v).unwrap();
        check_blocks(&SAMPLE_ARRAY, &e);
        assert!(matches!(e.decode_min_block(0), Err(Error::BlockIndex { .. })));
        assert!(matches!(e.decode_min_block(e.block_count() + 1), Err(Error::BlockIndex { .. })));
    }
}

#[test]
fn random_block_decoding() {
    let mut rng = StdRng::seed_from_u64(11);
    for round in 0..300 {
        let n = rng.gen_range(1..300);
        let dup = [0.0, 0.3, 0.7, 0.95][round % 4];
        let a = random_array(&mut rng, n, dup);
        let e = CombinedEncoding::encode(&a, Variant::B).unwrap();
        check_blocks(&a, &e);
    }
}

#[test]
fn small_alphabet_block_decoding() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..300 {
        let n = rng.gen_range(1..200);
        let a: Vec<i64> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        check_blocks(&a, &CombinedEncoding::encode(&a, Variant::D).unwrap());
    }
}

#[test]
fn duplicate_free_uses_exact_positions() {
    let mut rng = StdRng::seed_from_u64(2);
    let a = random_array(&mut rng, 1000, 0.0);
    let e = CombinedEncoding::encode(&a, Variant::B).unwrap();
    let aux = e.decode_aux().unwrap();
    for side in [Side::Min, Side::Max] {
        let (p, q, r) = aux.pqr_ones(side);
        assert_eq!((p, q, r), (e.block_count(), 0, 0));
        // D' equals D when nothing is duplicated
        assert_eq!(build_dprime(&a, side), build_dfuds(&a, side));
    }
}

#[test]
fn caps_on_pqr_and_offsets() {
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..50 {
        let n = rng.gen_range(2..2000);
        let a = random_array(&mut rng, n, 0.5);
        let e = CombinedEncoding::encode(&a, Variant::D).unwrap();
        let aux = e.decode_aux().unwrap();
        let cap = (2 * (n + 1)).div_ceil(e.block_width());
        for side in [Side::Min, Side::Max] {
            let (p, q, r) = aux.pqr_ones(side);
            assert!(p <= cap && q <= cap && r <= cap);
            assert!(aux.ki_values(side).iter().all(|&k| k >= 1 && (k as usize) < e.block_width()));
        }
    }
}

#[test]
fn shifted_blocks_start_with_extra_closes() {
    // Long runs force blocks that begin inside a run of extra closes.
    let mut a: Vec<i64> = Vec::new();
    for v in 0..40i64 {
        a.extend(std::iter::repeat_n((v * 7919) % 101, 1 + (v % 30) as usize));
    }
    let e = CombinedEncoding::encode(&a, Variant::B).unwrap();
    let aux = e.decode_aux().unwrap();
    let w = e.block_width();
    let mut shifted = 0;
    for side in [Side::Min, Side::Max] {
        let ks = aux.ki_values(side);
        shifted += ks.len();
        let d = build_dfuds(&a, side);
        for i in 1..=e.block_count() {
            let block = e.decode_block(side, i).unwrap();
            let start = (i - 1) * w;
            assert_eq!(block, d.bits_at(start, w.min(d.len() - start)));
        }
    }
    assert!(shifted > 0, "no block exercised the shifted case");
    assert!(aux.pqr_ones(Side::Min).2 + aux.pqr_ones(Side::Max).2 > 0, "no all-close block");
}

#[test]
fn bad_superblocks_are_stored_and_decoded() {
    // A large value followed by a long increasing run below it has thousands
    // of children in the 2d-Max heap: a huge group in T' that the 2d-Min side
    // sees as a single close.
    let mut a: Vec<i64> = vec![5, 10_000];
    a.extend(0..6000);
    let e = CombinedEncoding::encode(&a, Variant::D).unwrap();
    assert!(e.decode_aux().unwrap().sizes().bad_blocks > 0);
    check_blocks(&a, &e);
}

#[test]
fn windows_match_direct_bits() {
    let mut rng = StdRng::seed_from_u64(4);
    let a = random_array(&mut rng, 500, 0.4);
    let e = CombinedEncoding::encode(&a, Variant::D).unwrap();
    let d = build_dfuds(&a, Side::Max);
    for _ in 0..500 {
        let len = rng.gen_range(0..=64);
        let start = rng.gen_range(1..=d.len() + 1 - len);
        assert_eq!(e.dfuds_window(Side::Max, start, len).unwrap(), d.bits_at(start - 1, len));
    }
    assert!(e.dfuds_window(Side::Max, d.len(), 2).is_err());
    let ea = CombinedEncoding::encode(&a, Variant::A).unwrap();
    assert!(matches!(ea.dfuds_window(Side::Max, 1, 4), Err(Error::WrongVariant { .. })));
}

#[test]
fn reconstruction_matches_direct_build() {
    let a = [3, 1, 1, 2];
    let r = CombinedEncoding::encode(&a, Variant::A).unwrap().reconstruct_full().unwrap();
    assert_eq!(r.d_min, build_dfuds(&a, Side::Min));
    assert!(r.v_min.is_none());
    let mut rng = StdRng::seed_from_u64(6);
    for round in 0..300 {
        let n = rng.gen_range(1..300);
        let a = random_array(&mut rng, n, [0.0, 0.3, 0.8][round % 3]);
        let r = CombinedEncoding::encode(&a, Variant::C).unwrap().reconstruct_full().unwrap();
        assert_eq!(r.d_min, build_dfuds(&a, Side::Min));
        assert_eq!(r.d_max, build_dfuds(&a, Side::Max));
        assert_eq!(r.v_min.unwrap(), build_colors(&a, Side::Min));
        assert_eq!(r.v_max.unwrap(), build_colors(&a, Side::Max));
    }
    let eb = CombinedEncoding::encode(&a, Variant::B).unwrap();
    assert!(matches!(eb.reconstruct_full(), Err(Error::WrongVariant { .. })));
}

#[test]
fn all_variants_agree_with_oracle() {
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..60 {
        let n = rng.gen_range(1..40);
        let a: Vec<i64> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let encs: Vec<_> = Variant::ALL.iter().map(|&v| CombinedEncoding::encode(&a, v).unwrap()).collect();
        for q in QuerySpec::enumerate(n, 3) {
            let want = oracle_answer(&a, &q).unwrap();
            for e in &encs {
                if e.supports(&q) {
                    assert_eq!(e.query(&q).unwrap(), want, "{} {a:?} {q}", e.variant());
                } else {
                    assert!(matches!(e.query(&q), Err(Error::Unsupported { .. })));
                }
            }
        }
    }
}

#[test]
fn unsupported_and_invalid_queries() {
    let e = CombinedEncoding::encode(&[2, 1, 1, 2], Variant::A).unwrap();
    assert!(matches!(
        e.query(&QuerySpec::kth(QueryKind::RkMinQ, 1, 4, 1)),
        Err(Error::Unsupported { variant: 'a', .. })
    ));
    assert_eq!(e.query(&QuerySpec::point(QueryKind::Psv, 4)).unwrap(), Some(3));
    let b = CombinedEncoding::encode(&[2, 1, 1, 2], Variant::B).unwrap();
    assert_eq!(b.query(&QuerySpec::point(QueryKind::Psv, 3)).unwrap(), Some(0));
    assert_eq!(b.query(&QuerySpec::point(QueryKind::Plv, 3)).unwrap(), Some(1));
    assert!(b.query(&QuerySpec::range(QueryKind::RMinQ, 3, 5)).is_err());
    assert!(CombinedEncoding::encode(&[], Variant::B).is_err());
}

#[test]
fn serialization_round_trip() {
    let mut rng = StdRng::seed_from_u64(10);
    for v in Variant::ALL {
        for n in [1, 2, 3, 50, 700] {
            let a = random_array(&mut rng, n, 0.3);
            let e = CombinedEncoding::encode(&a, v).unwrap();
            let bytes = e.to_bytes();
            let back = CombinedEncoding::from_bytes(&bytes).unwrap();
            assert_eq!(back.to_bytes(), bytes);
            assert_eq!(back.variant(), v);
            assert_eq!((back.n(), back.k()), (e.n(), e.k()));
            let mut extra = bytes.clone();
            extra.push(0);
            assert!(CombinedEncoding::from_bytes(&extra).is_err());
            assert!(CombinedEncoding::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        }
    }
}

#[test]
fn corrupted_bytes_never_panic() {
    let mut rng = StdRng::seed_from_u64(12);
    let a = random_array(&mut rng, 200, 0.3);
    for v in Variant::ALL {
        let bytes = CombinedEncoding::encode(&a, v).unwrap().to_bytes();
        for _ in 0..400 {
            let mut b = bytes.clone();
            let i = rng.gen_range(0..b.len());
            b[i] ^= 1 << rng.gen_range(0..8);
            if let Ok(e) = CombinedEncoding::from_bytes(&b) {
                for q in [QuerySpec::range(QueryKind::RMinQ, 1, e.n()), QuerySpec::point(QueryKind::Plv, e.n())] {
                    let _ = e.query(&q);
                }
            }
        }
    }
}

#[test]
fn order_isomorphic_inputs_encode_identically() {
    let a = [5, 3, 3, 9, 1, 1, 1, 4];
    let b: Vec<i64> = a.iter().map(|x| x * 100 - 7).collect();
    for v in Variant::ALL {
        let ea = CombinedEncoding::encode(&a, v).unwrap().to_bytes();
        let eb = CombinedEncoding::encode(&b, v).unwrap().to_bytes();
        assert_eq!(ea, eb);
    }
}

#[test]
fn space_report_duplicate_free() {
    let mut rng = StdRng::seed_from_u64(13);
    let a = random_array(&mut rng, 5000, 0.0);
    let n = a.len() as u64;
    let b = CombinedEncoding::encode(&a, Variant::B).unwrap().space_report();
    assert!(b.payload_bits <= 3 * n, "{}", b.payload_bits);
    assert!(b.pass);
    let d = CombinedEncoding::encode(&a, Variant::D).unwrap();
    let rd = d.space_report();
    assert!(rd.payload_bits <= 4 * n + 130);
    assert_eq!(rd.cache_bits, 0);
    d.heaps();
    assert!(d.space_report().cache_bits > 0);
}
