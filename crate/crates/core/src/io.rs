//! Array files and query scripts.
//!
//! Arrays are either UTF-8 text holding whitespace-separated signed decimal
//! integers, or binary: the magic `SRQA`, a 64-bit little-endian count, then
//! that many 64-bit little-endian signed values.
//!
//! Query scripts hold one query per line in the form `KIND i [j] [k]`.
//! Blank lines and lines starting with `#` are skipped.

use crate::error::{Error, Result};
use crate::query::QuerySpec;
use crate::wire::{Reader, Writer};

const ARRAY_MAGIC: &[u8; 4] = b"SRQA";

/// Parses a text array; errors name the offending line.
pub fn parse_array_text(text: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        for tok in line.split_whitespace() {
            let v = tok.parse::<i64>().map_err(|e| Error::Parse { line: ln + 1, msg: format!("{tok:?}: {e}") })?;
            out.push(v);
        }
    }
    Ok(out)
}

/// Parses a binary `SRQA` array, rejecting short or trailing data.
pub fn parse_array_binary(data: &[u8]) -> Result<Vec<i64>> {
    let mut r = Reader::new(data);
    r.expect_magic(ARRAY_MAGIC)?;
    let count = r.u64()?;
    if count > (r.remaining() / 8) as u64 {
        return Err(Error::Format(format!("count {count} exceeds the {} values present", r.remaining() / 8)));
    }
    let out = (0..count).map(|_| r.u64().map(|v| v as i64)).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Ok(out)
}

/// Binary when the data starts with `SRQA`, text otherwise.
pub fn parse_array(data: &[u8]) -> Result<Vec<i64>> {
    if data.starts_with(ARRAY_MAGIC) {
        return parse_array_binary(data);
    }
    let text = std::str::from_utf8(data).map_err(|e| Error::Format(format!("array text is not UTF-8: {e}")))?;
    parse_array_text(text)
}

pub fn write_array_text(a: &[i64]) -> String {
    let mut s = String::with_capacity(a.len() * 8);
    for (i, v) in a.iter().enumerate() {
        s.push_str(&v.to_string());
        s.push(if (i + 1) % 16 == 0 || i + 1 == a.len() { '\n' } else { ' ' });
    }
    s
}

pub fn write_array_binary(a: &[i64]) -> Vec<u8> {
    let mut w = Writer::default();
    w.bytes(ARRAY_MAGIC);
    w.u64(a.len() as u64);
    for &v in a {
        w.u64(v as u64);
    }
    w.buf
}

/// Parses a query script into `(line number, query)` pairs.
pub fn parse_query_script(text: &str) -> Result<Vec<(usize, QuerySpec)>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let q = line.parse::<QuerySpec>().map_err(|e| Error::Parse { line: ln + 1, msg: e.to_string() })?;
        out.push((ln + 1, q));
    }
    Ok(out)
}
