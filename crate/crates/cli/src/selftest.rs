use std::time::Instant;

use anyhow::Result;
use clap::ValueEnum;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use srq_core::bitseq::BitSeq;
use srq_core::combined::{CombinedEncoding, Variant};
use srq_core::heap_build::build_dfuds;
use srq_core::oracle::oracle_answer;
use srq_core::query::{QueryKind, QuerySpec, Side};

use crate::random_array;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Depth {
    /// Arrays up to length 5 over {1,2,3} plus 300 random arrays.
    Quick,
    /// Arrays up to length 7 over {1,2,3} plus 2000 random arrays.
    Exhaustive,
}

#[derive(Debug, Serialize)]
struct Counterexample {
    array: Vec<i64>,
    variant: String,
    query: Option<String>,
    expected: Option<String>,
    got: String,
}

fn answer_text(a: Option<usize>) -> String {
    a.map_or_else(|| "NONE".to_string(), |p| p.to_string())
}

fn corpus(depth: Depth, seed: u64) -> Vec<Vec<i64>> {
    let (max_len, random) = match depth {
        Depth::Quick => (5, 300),
        Depth::Exhaustive => (7, 2000),
    };
    let mut out = Vec::new();
    let mut layer: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|a| {
                (1..=3).map(move |v| {
                    let mut b = a.clone();
                    b.push(v);
                    b
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    let mut rng = StdRng::seed_from_u64(seed);
    for r in 0..random {
        let n = rng.gen_range(2..400);
        let dup = [0.0, 0.3, 0.6, 0.9][r % 4];
        out.push(random_array(&mut rng, n, dup).iter().map(|x| x % 64).collect());
    }
    out
}

fn queries(n: usize, rng: &mut StdRng) -> Vec<QuerySpec> {
    if n <= 12 {
        return QuerySpec::enumerate(n, 3);
    }
    (0..400)
        .map(|t| {
            let kind = QueryKind::ALL[t % 12];
            let i = rng.gen_range(1..=n);
            let j = rng.gen_range(i..=n);
            if kind.is_kth() {
                QuerySpec::kth(kind, i, j, rng.gen_range(1..=3))
            } else if kind.is_range() {
                QuerySpec::range(kind, i, j)
            } else {
                QuerySpec::point(kind, i)
            }
        })
        .collect()
}

/// Flips one seeded bit of the direction bits (or of T when they are empty)
/// and reassembles the encoding.
fn corrupt(e: &CombinedEncoding, rng: &mut StdRng) -> srq_core::Result<CombinedEncoding> {
    let flip = |s: &BitSeq, rng: &mut StdRng| {
        let mut bits = s.to_bools();
        let i = rng.gen_range(0..bits.len());
        bits[i] = !bits[i];
        BitSeq::build(&bits, s.mode())
    };
    let (t, u) = if e.u_store().is_empty() {
        (flip(e.t_store(), rng), e.u_store().clone())
    } else {
        (e.t_store().clone(), flip(e.u_store(), rng))
    };
    CombinedEncoding::from_parts(e.variant(), t, u, e.c_store().clone(), e.v_store().cloned(), e.v_min_len())
}

fn check(a: &[i64], v: Variant, seed: u64, corrupted: bool) -> Option<Counterexample> {
    let mut rng = StdRng::seed_from_u64(seed);
    let fail = |query: Option<&QuerySpec>, expected: Option<String>, got: String| Counterexample {
        array: a.to_vec(),
        variant: v.to_string(),
        query: query.map(|q| q.to_string()),
        expected,
        got,
    };
    let built = CombinedEncoding::encode(a, v).and_then(|e| CombinedEncoding::from_bytes(&e.to_bytes()));
    let e = match built {
        Ok(e) if corrupted => corrupt(&e, &mut rng),
        other => other,
    };
    let e = match e {
        Ok(e) => e,
        Err(err) => return Some(fail(None, None, format!("encoding rejected: {err}"))),
    };
    if v.block_decoded() {
        let w = e.block_width();
        for side in [Side::Min, Side::Max] {
            let d = build_dfuds(a, side);
            for i in 1..=e.block_count() {
                let s = (i - 1) * w;
                let want = d.bits_at(s, w.min(d.len() - s));
                match e.decode_block(side, i) {
                    Ok(got) if got == want => {}
                    got => {
                        return Some(fail(
                            None,
                            Some(format!("{side:?} block {i} = {want:0w$b}")),
                            format!("{got:?}"),
                        ))
                    }
                }
            }
        }
    }
    for q in queries(a.len(), &mut rng) {
        if !e.supports(&q) {
            continue;
        }
        let want = oracle_answer(a, &q).expect("valid query");
        match e.query(&q) {
            Ok(got) if got == want => {}
            Ok(got) => return Some(fail(Some(&q), Some(answer_text(want)), answer_text(got))),
            Err(err) => return Some(fail(Some(&q), Some(answer_text(want)), format!("error: {err}"))),
        }
    }
    None
}

/// Prints a summary line; returns whether every check passed.
pub fn run(depth: Depth, seed: u64, corrupted: bool) -> Result<bool> {
    let start = Instant::now();
    let arrays = corpus(depth, seed);
    let jobs: Vec<(usize, Variant)> =
        (0..arrays.len()).flat_map(|i| Variant::ALL.into_iter().map(move |v| (i, v))).collect();
    let first = jobs
        .par_iter()
        .find_map_first(|&(i, v)| check(&arrays[i], v, seed ^ (i as u64) << 2 ^ v as u64, corrupted));
    let pass = first.is_none();
    let report = json!({
        "command": "selftest",
        "depth": format!("{depth:?}").to_lowercase(),
        "corrupt": corrupted,
        "arrays": arrays.len(),
        "variants": Variant::ALL.len(),
        "elapsed_ms": start.elapsed().as_secs_f64() * 1e3,
        "pass": pass,
        "counterexample": first,
    });
    println!("{report}");
    if let Some(c) = &first {
        eprintln!(
            "counterexample: array {:?}, variant {}, query {}, expected {}, got {}",
            c.array,
            c.variant,
            c.query.as_deref().unwrap_or("-"),
            c.expected.as_deref().unwrap_or("-"),
            c.got
        );
    }
    Ok(pass)
}
