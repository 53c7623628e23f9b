//! `srq`: build encodings from array files, run query scripts, benchmark and
//! self-test. Reports are JSON objects, one per line, on standard output.

mod bench;
mod selftest;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::json;

use srq_core::combined::{CombinedEncoding, Variant};
use srq_core::io::{parse_array, parse_array_binary, parse_array_text, parse_query_script, write_array_binary, write_array_text};

pub const DEFAULT_SEED: u64 = 0x5251_0001;

#[derive(Parser)]
#[command(name = "srq", version, about = "Succinct range-min/max and nearest smaller/larger value encodings")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ArrayFormat {
    Auto,
    Text,
    Binary,
}

#[derive(Subcommand)]
enum Command {
    /// Encode an array file and print its space report.
    Build {
        array: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value = "d", value_parser = parse_variant)]
        variant: Variant,
        /// Input format; `auto` detects the binary magic.
        #[arg(long, value_enum, default_value = "auto")]
        format: ArrayFormat,
    },
    /// Answer a query script against an encoding, one answer per line.
    Query { encoding: PathBuf, script: PathBuf },
    /// Write a random array.
    Gen {
        #[arg(short, long)]
        n: usize,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Probability that an element repeats its left neighbour.
        #[arg(long, default_value_t = 0.0)]
        dup_rate: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: ArrayFormat,
    },
    /// Build time, bits per element and query latency per (n, variant).
    Bench {
        /// Comma-separated powers of two.
        #[arg(long, value_delimiter = ',', default_value = "1024,65536,1048576")]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "a,b,c,d", value_parser = parse_variant)]
        variants: Vec<Variant>,
        #[arg(long, default_value_t = 0.0)]
        dup_rate: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Random queries timed per query kind.
        #[arg(long, default_value_t = 100_000)]
        queries: usize,
    },
    /// Check every variant against the brute-force oracle.
    Selftest {
        #[arg(long, value_enum, default_value = "quick")]
        depth: selftest::Depth,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Flip one seeded payload bit of each encoding before checking.
        #[arg(long)]
        corrupt: bool,
    },
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    s.parse::<Variant>().map_err(|e| e.to_string())
}

pub fn random_array(rng: &mut StdRng, n: usize, dup_rate: f64) -> Vec<i64> {
    let mut a = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 && rng.gen_bool(dup_rate) {
            a.push(a[i - 1]);
        } else {
            a.push(rng.gen_range(0..1_000_000_000));
        }
    }
    a
}

fn read_array(path: &Path, format: ArrayFormat) -> Result<Vec<i64>> {
    let data = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let a = match format {
        ArrayFormat::Auto => parse_array(&data),
        ArrayFormat::Binary => parse_array_binary(&data),
        ArrayFormat::Text => {
            let text = std::str::from_utf8(&data).context("array text is not UTF-8")?;
            parse_array_text(text)
        }
    };
    a.with_context(|| format!("parsing {}", path.display()))
}

fn build(array: &Path, out: &Path, variant: Variant, format: ArrayFormat) -> Result<()> {
    let a = read_array(array, format)?;
    if a.len() < 2 {
        bail!("array has {} elements; at least 2 are required", a.len());
    }
    let e = CombinedEncoding::encode(&a, variant)?;
    let bytes = e.to_bytes();
    fs::write(out, &bytes).with_context(|| format!("writing {}", out.display()))?;
    let report = json!({
        "command": "build",
        "input": array.display().to_string(),
        "output": out.display().to_string(),
        "file_bytes": bytes.len(),
        "report": e.space_report(),
    });
    println!("{report}");
    Ok(())
}

/// Prints one line per query; returns how many lines were errors.
fn query(encoding: &Path, script: &Path) -> Result<usize> {
    let data = fs::read(encoding).with_context(|| format!("reading {}", encoding.display()))?;
    let e = CombinedEncoding::from_bytes(&data).with_context(|| format!("loading {}", encoding.display()))?;
    let text = fs::read_to_string(script).with_context(|| format!("reading {}", script.display()))?;
    let queries = parse_query_script(&text).with_context(|| format!("parsing {}", script.display()))?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut errors = 0;
    for (line, q) in queries {
        match e.query(&q) {
            Ok(Some(p)) => writeln!(out, "{p}")?,
            Ok(None) => writeln!(out, "NONE")?,
            Err(err) => {
                errors += 1;
                writeln!(out, "ERROR line {line}: {err}")?;
                eprintln!("line {line}: {q}: {err}");
            }
        }
    }
    out.flush()?;
    Ok(errors)
}

fn gen(n: usize, out: &Path, seed: u64, dup_rate: f64, format: ArrayFormat) -> Result<()> {
    if !(0.0..=1.0).contains(&dup_rate) {
        bail!("--dup-rate must be within [0, 1]");
    }
    let a = random_array(&mut StdRng::seed_from_u64(seed), n, dup_rate);
    let bytes = match format {
        ArrayFormat::Binary => write_array_binary(&a),
        _ => write_array_text(&a).into_bytes(),
    };
    fs::write(out, bytes).with_context(|| format!("writing {}", out.display()))
}

/// Applies `SRQ_THREADS` to the global worker pool.
fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SRQ_THREADS") {
        let n: usize = v.parse().with_context(|| format!("SRQ_THREADS={v:?} is not a number"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    init_threads()?;
    match cli.cmd {
        Command::Build { array, out, variant, format } => build(&array, &out, variant, format)?,
        Command::Query { encoding, script } => {
            let errors = query(&encoding, &script)?;
            if errors > 0 {
                eprintln!("{errors} queries failed");
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Gen { n, out, seed, dup_rate, format } => gen(n, &out, seed, dup_rate, format)?,
        Command::Bench { sizes, variants, dup_rate, seed, queries } => {
            bench::run(&sizes, &variants, dup_rate, seed, queries)?
        }
        Command::Selftest { depth, seed, corrupt } => {
            if !selftest::run(depth, seed, corrupt)? {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
