use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{bail, Result};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use srq_core::combined::{CombinedEncoding, Variant};
use srq_core::query::{QueryKind, QuerySpec};

use crate::random_array;

#[derive(Serialize)]
struct Cell {
    command: &'static str,
    n: usize,
    variant: String,
    dup_rate: f64,
    k: usize,
    build_ms: f64,
    /// Time of the first query, which materializes the query structures.
    warmup_ms: f64,
    payload_bits: u64,
    aux_bits: u64,
    bits_per_element: f64,
    aux_bits_per_element: f64,
    bound_bits: u64,
    pass: bool,
    queries_per_kind: usize,
    latency_ns: BTreeMap<String, f64>,
    mean_latency_ns: f64,
}

fn random_query(rng: &mut StdRng, kind: QueryKind, n: usize) -> QuerySpec {
    let i = rng.gen_range(1..=n);
    if !kind.is_range() {
        return QuerySpec::point(kind, i);
    }
    let j = rng.gen_range(i..=n);
    if kind.is_kth() {
        QuerySpec::kth(kind, i, j, rng.gen_range(1..=4))
    } else {
        QuerySpec::range(kind, i, j)
    }
}

fn cell(n: usize, variant: Variant, dup_rate: f64, seed: u64, queries: usize) -> Result<Cell> {
    let mut rng = StdRng::seed_from_u64(seed ^ n as u64);
    let a = random_array(&mut rng, n, dup_rate);
    let start = Instant::now();
    let e = CombinedEncoding::encode(&a, variant)?;
    let build_ms = start.elapsed().as_secs_f64() * 1e3;
    let start = Instant::now();
    e.heaps();
    let warmup_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut latency_ns = BTreeMap::new();
    for kind in QueryKind::ALL {
        let qs: Vec<QuerySpec> = (0..queries).map(|_| random_query(&mut rng, kind, n)).collect();
        if !e.supports(&qs[0]) {
            continue;
        }
        let mut sink = 0usize;
        let start = Instant::now();
        for q in &qs {
            sink = sink.wrapping_add(e.query(q)?.unwrap_or(0));
        }
        std::hint::black_box(sink);
        latency_ns.insert(kind.name().to_string(), start.elapsed().as_nanos() as f64 / queries as f64);
    }
    let mean_latency_ns = latency_ns.values().sum::<f64>() / latency_ns.len() as f64;
    let r = e.space_report();
    Ok(Cell {
        command: "bench",
        n,
        variant: variant.to_string(),
        dup_rate,
        k: e.k(),
        build_ms,
        warmup_ms,
        payload_bits: r.payload_bits,
        aux_bits: r.aux_bits,
        bits_per_element: r.bits_per_element,
        aux_bits_per_element: r.aux_bits_per_element,
        bound_bits: r.bound_bits,
        pass: r.pass,
        queries_per_kind: queries,
        latency_ns,
        mean_latency_ns,
    })
}

/// Runs every `(n, variant)` cell, in parallel, and prints one line per cell
/// in input order.
pub fn run(sizes: &[usize], variants: &[Variant], dup_rate: f64, seed: u64, queries: usize) -> Result<()> {
    if let Some(&n) = sizes.iter().find(|&&n| n < 2 || !n.is_power_of_two()) {
        bail!("size {n} is not a power of two of at least 2");
    }
    if !(0.0..=1.0).contains(&dup_rate) {
        bail!("--dup-rate must be within [0, 1]");
    }
    if queries == 0 {
        bail!("--queries must be positive");
    }
    let cells: Vec<(usize, Variant)> = sizes.iter().flat_map(|&n| variants.iter().map(move |&v| (n, v))).collect();
    let results: Vec<Result<Cell>> =
        cells.par_iter().map(|&(n, v)| cell(n, v, dup_rate, seed, queries)).collect();
    for r in results {
        println!("{}", serde_json::to_string(&r?)?);
    }
    Ok(())
}
