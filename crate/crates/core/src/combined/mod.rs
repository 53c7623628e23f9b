//! Encodings of both heaps at once.
//!
//! Variants `b` and `d` store `T'`, `U'` (the shared pop stream of the full
//! array, one group per run) and the run bitmap `C`; both DFUDS sequences
//! are recovered block by block. Variants `a` and `c` store `T` and `U` of
//! the deduplicated array `A'` plus `C`, and rebuild both sequences in one
//! linear pass. `c` and `d` add the color strings `V = V_max · V_min` and
//! answer all twelve queries; `a` and `b` answer the six that need no
//! colors.
//!
//! ```
//! use srq_core::combined::{CombinedEncoding, Variant};
//! use srq_core::query::{QueryKind, QuerySpec};
//!
//! let a = [2, 5, 3, 4, 4, 4, 2, 1, 1, 2, 4, 3];
//! let e = CombinedEncoding::encode(&a, Variant::D).unwrap();
//! let q = QuerySpec::kth(QueryKind::RkMinQ, 1, 12, 2);
//! assert_eq!(e.query(&q).unwrap(), Some(9));
//! let back = CombinedEncoding::from_bytes(&e.to_bytes()).unwrap();
//! assert_eq!(back.to_bytes(), e.to_bytes());
//! ```

pub mod decode;
pub mod expand;
mod format;
pub mod reconstruct;
pub mod space;

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::bitseq::{BitBuf, BitSeq, Pattern, StorageMode};
use crate::cheap_query::HeapEncoding;
use crate::error::{format_err, Error, Result};
use crate::heap_build::{build_colors, build_tpup, build_tu, dedup};
use crate::query::{QuerySpec, Side};

use decode::{derive_roots, DecodeAux, Payload};
use expand::shared_tables;
use reconstruct::{reconstruct, Reconstruction};
use space::{ComponentBits, SpaceReport};

/// The four encodings: `A`/`C` store the heaps of the deduplicated array and
/// rebuild on first query; `B`/`D` decode fixed-width blocks. `C`/`D` carry
/// node colors and support all twelve queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    A,
    B,
    C,
    D,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::A, Variant::B, Variant::C, Variant::D];

    pub fn letter(self) -> char {
        match self {
            Variant::A => 'a',
            Variant::B => 'b',
            Variant::C => 'c',
            Variant::D => 'd',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Variant::ALL.into_iter().find(|v| v.letter() == c.to_ascii_lowercase())
    }

    pub fn has_colors(self) -> bool {
        matches!(self, Variant::C | Variant::D)
    }

    /// Block-decoded (`b`, `d`) rather than rebuilt in full (`a`, `c`).
    pub fn block_decoded(self) -> bool {
        matches!(self, Variant::B | Variant::D)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Variant::from_letter(c),
            _ => None,
        }
        .ok_or_else(|| Error::InvalidQuery(format!("unknown variant {s:?}")))
    }
}

/// Both heaps, ready for queries.
#[derive(Clone, Debug)]
pub struct Heaps {
    pub min: HeapEncoding,
    pub max: HeapEncoding,
}

impl Heaps {
    pub fn side(&self, side: Side) -> &HeapEncoding {
        match side {
            Side::Min => &self.min,
            Side::Max => &self.max,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CombinedEncoding {
    variant: Variant,
    n: usize,
    k: usize,
    t_store: BitSeq,
    u_store: BitSeq,
    c_store: BitSeq,
    v_store: Option<BitSeq>,
    v_min_len: usize,
    root_min: usize,
    root_max: usize,
    aux: Option<DecodeAux>,
    cache: OnceLock<Arc<Heaps>>,
}

/// `V_max · V_min` and the length of `V_min`.
fn concat_colors(v_max: &BitSeq, v_min: &BitSeq) -> (BitSeq, usize) {
    let mut b = BitBuf::with_capacity(v_max.len() + v_min.len());
    for bit in v_max.iter().chain(v_min.iter()) {
        b.push(bit);
    }
    (b.finish(StorageMode::Plain), v_min.len())
}

/// `len` bits of `s` from 0-based `start`.
fn slice_bits(s: &BitSeq, start: usize, len: usize) -> BitSeq {
    let mut b = BitBuf::with_capacity(len);
    let mut pos = start;
    while pos < start + len {
        let take = (start + len - pos).min(64);
        b.push_bits(s.bits_at(pos, take), take);
        pos += take;
    }
    b.finish(StorageMode::Plain)
}

fn opens_pairs(d: &BitSeq) -> usize {
    d.clone().with_pattern(Pattern::OPEN_OPEN).rank_pattern(d.len(), Pattern::OPEN_OPEN)
}

impl CombinedEncoding {
    /// Encodes `a` (length at least 1). Only the relative order of the values
    /// matters.
    pub fn encode(a: &[i64], variant: Variant) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::TooShort(0));
        }
        let (t, u, c, v) = if variant.block_decoded() {
            let tp = build_tpup(a);
            let v = variant
                .has_colors()
                .then(|| concat_colors(&build_colors(a, Side::Max), &build_colors(a, Side::Min)));
            (tp.t_prime, tp.u_prime, tp.dedup.c_bits, v)
        } else {
            let d = dedup(a);
            let tu = build_tu(&d.a_prime)?;
            let v = variant.has_colors().then(|| {
                concat_colors(&build_colors(&d.a_prime, Side::Max), &build_colors(&d.a_prime, Side::Min))
            });
            (tu.t_bits, tu.u_bits, d.c_bits, v)
        };
        let (v, v_min_len) = match v {
            Some((v, len)) => (Some(v), len),
            None => (None, 0),
        };
        Self::from_parts(variant, t, u, c, v, v_min_len)
    }

    /// Assembles an encoding from stored sequences, checking that they
    /// describe a pair of heaps and building the decoding structures. `v` is
    /// `V_max` followed by `V_min`, whose length is `v_min_len`.
    pub fn from_parts(
        variant: Variant,
        t: BitSeq,
        u: BitSeq,
        c: BitSeq,
        v: Option<BitSeq>,
        v_min_len: usize,
    ) -> Result<Self> {
        let n = c.len();
        if n == 0 {
            return Err(Error::TooShort(0));
        }
        if c.get(1) {
            return Err(format_err("C[1] must be 0"));
        }
        let k = c.count_ones();
        let runs = n - k;
        if u.len() != runs - 1 {
            return Err(format_err(format!("U has {} bits, want {}", u.len(), runs - 1)));
        }
        if t.count_zeros() != runs || t.is_empty() || t.get(t.len()) {
            return Err(format_err(format!("T must hold {runs} groups and end with a close")));
        }
        if v.is_some() != variant.has_colors() {
            return Err(format_err(format!("variant {variant} color string presence mismatch")));
        }
        if v.as_ref().is_some_and(|v| v_min_len > v.len()) {
            return Err(format_err("V_min longer than V"));
        }
        let t = plain(t);
        let u = plain(u);
        let c = compressed(c);
        let nodes = if variant.block_decoded() { n } else { runs };
        let (root_min, root_max) = derive_roots(&t, &u, nodes)?;
        let mut e = CombinedEncoding {
            variant,
            n,
            k,
            t_store: t,
            u_store: u,
            c_store: c,
            v_store: v,
            v_min_len,
            root_min,
            root_max,
            aux: None,
            cache: OnceLock::new(),
        };
        if variant.block_decoded() {
            let built = DecodeAux::build(e.payload(), root_min, root_max)?;
            if let Some(v) = &e.v_store {
                let (want_min, want_max) = (opens_pairs(&built.d_min), opens_pairs(&built.d_max));
                if v_min_len != want_min || v.len() - v_min_len != want_max {
                    return Err(format_err("color string lengths do not match the heaps"));
                }
            }
            e.aux = Some(built.aux);
        } else {
            e.rebuild()?;
        }
        Ok(e)
    }

    fn payload(&self) -> Payload<'_> {
        Payload { t: &self.t_store, u: &self.u_store, c: &self.c_store, n: self.n }
    }

    fn split_colors(&self) -> Option<(BitSeq, BitSeq)> {
        self.v_store.as_ref().map(|v| {
            let max_len = v.len() - self.v_min_len;
            (slice_bits(v, max_len, self.v_min_len), slice_bits(v, 0, max_len))
        })
    }

    fn rebuild(&self) -> Result<Reconstruction> {
        let colors = self.split_colors();
        reconstruct(
            &self.t_store,
            &self.u_store,
            &self.c_store,
            (self.root_min, self.root_max),
            colors.as_ref().map(|(a, b)| (a, b)),
        )
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Elements equal to their left neighbour.
    pub fn k(&self) -> usize {
        self.k
    }

    /// `T'` for `b`/`d`, `T` of `A'` for `a`/`c`.
    pub fn t_store(&self) -> &BitSeq {
        &self.t_store
    }

    pub fn u_store(&self) -> &BitSeq {
        &self.u_store
    }

    pub fn c_store(&self) -> &BitSeq {
        &self.c_store
    }

    /// `V_max · V_min` (`c`, `d` only).
    pub fn v_store(&self) -> Option<&BitSeq> {
        self.v_store.as_ref()
    }

    pub fn v_min_len(&self) -> usize {
        self.v_min_len
    }

    /// Root degrees of the stored heaps (of `A` for `b`/`d`, of `A'` for
    /// `a`/`c`); derived from the payload.
    pub fn root_counts(&self) -> (usize, usize) {
        (self.root_min, self.root_max)
    }

    pub fn decode_aux(&self) -> Option<&DecodeAux> {
        self.aux.as_ref()
    }

    fn block_aux(&self) -> Result<&DecodeAux> {
        self.aux
            .as_ref()
            .ok_or(Error::WrongVariant { expected: "b or d", actual: self.variant.letter() })
    }

    pub fn block_width(&self) -> usize {
        decode::block_width(self.n)
    }

    pub fn block_count(&self) -> usize {
        (2 * self.n + 2).div_ceil(self.block_width())
    }

    /// Block `i` (1-based) of the 2d-Min heap's DFUDS, first bit lowest.
    pub fn decode_min_block(&self, i: usize) -> Result<u64> {
        self.decode_block(Side::Min, i)
    }

    /// Block `i` (1-based) of the 2d-Max heap's DFUDS, first bit lowest.
    pub fn decode_max_block(&self, i: usize) -> Result<u64> {
        self.decode_block(Side::Max, i)
    }

    pub fn decode_block(&self, side: Side, i: usize) -> Result<u64> {
        self.block_aux()?.decode_block(self.payload(), side, i)
    }

    /// Up to 64 bits of a DFUDS sequence from 1-based `start`, read through
    /// block decoding.
    pub fn dfuds_window(&self, side: Side, start: usize, len: usize) -> Result<u64> {
        let aux = self.block_aux()?;
        let total = 2 * self.n + 2;
        if len > 64 || start == 0 || start + len > total + 1 {
            return Err(Error::BadWindow { start, len, total });
        }
        let w = aux.block_width();
        let mut out = 0u64;
        let mut got = 0;
        while got < len {
            let pos0 = start - 1 + got;
            let block = aux.decode_block(self.payload(), side, pos0 / w + 1)?;
            let off = pos0 % w;
            let take = (w - off).min(len - got);
            out |= (block >> off & low_mask(take)) << got;
            got += take;
        }
        Ok(out)
    }

    /// Both DFUDS sequences (and colors for `c`) rebuilt in full (`a`, `c`).
    pub fn reconstruct_full(&self) -> Result<Reconstruction> {
        if self.variant.block_decoded() {
            return Err(Error::WrongVariant { expected: "a or c", actual: self.variant.letter() });
        }
        self.rebuild()
    }

    fn materialize(&self) -> Heaps {
        let (d_min, d_max, v_min, v_max) = if self.variant.block_decoded() {
            let aux = self.aux.as_ref().expect("block variants keep their aux");
            let w = aux.block_width();
            let total = 2 * self.n + 2;
            let mut ds = [Side::Min, Side::Max].map(|side| {
                let mut b = BitBuf::with_capacity(total);
                for i in 1..=aux.block_count() {
                    let bits = aux.decode_block(self.payload(), side, i).expect("block in range");
                    b.push_bits(bits, w.min(total - (i - 1) * w));
                }
                Some(b.finish(StorageMode::Plain))
            });
            let (v_min, v_max) = match self.split_colors() {
                Some((a, b)) => (Some(a), Some(b)),
                None => (None, None),
            };
            (ds[0].take().unwrap(), ds[1].take().unwrap(), v_min, v_max)
        } else {
            let r = self.rebuild().expect("validated when built");
            (r.d_min, r.d_max, r.v_min, r.v_max)
        };
        let min = HeapEncoding::from_parts(d_min, v_min, Side::Min).expect("validated heap");
        let max = HeapEncoding::from_parts(d_max, v_max, Side::Max).expect("validated heap");
        Heaps { min, max }
    }

    /// The query-ready heaps, built on first use and cached.
    pub fn heaps(&self) -> &Heaps {
        self.cache.get_or_init(|| Arc::new(self.materialize()))
    }

    /// Answers `q`; `None` only for a missing k-th occurrence.
    pub fn query(&self, q: &QuerySpec) -> Result<Option<usize>> {
        q.validate(self.n)?;
        if q.kind.needs_colors() && !self.variant.has_colors() {
            return Err(Error::Unsupported { kind: q.kind.name().to_string(), variant: self.variant.letter() });
        }
        self.heaps().side(q.kind.side()).answer(q)
    }

    pub fn supports(&self, q: &QuerySpec) -> bool {
        self.variant.has_colors() || !q.kind.needs_colors()
    }

    /// Per-component payload and auxiliary bits and the check against the
    /// variant's bound.
    pub fn space_report(&self) -> SpaceReport {
        let comp = |name: &str, payload: usize, aux: usize| ComponentBits {
            name: name.to_string(),
            payload_bits: payload as u64,
            aux_bits: aux as u64,
        };
        let t_name = if self.variant.block_decoded() { "T'" } else { "T" };
        let u_name = if self.variant.block_decoded() { "U'" } else { "U" };
        let mut components = vec![
            comp(t_name, self.t_store.len(), self.t_store.aux_bits()),
            comp(u_name, self.u_store.len(), self.u_store.aux_bits()),
            comp("C", self.c_store.payload_bits(), self.c_store.aux_bits()),
            comp("root counts", 0, 0),
        ];
        if let Some(v) = &self.v_store {
            components.push(comp("V", v.len(), v.aux_bits()));
        }
        let mut shared = 0;
        if let Some(aux) = &self.aux {
            let s = aux.sizes();
            components.push(comp("P/Q/R", 0, s.pqr_bits as usize));
            components.push(comp("k_i", 0, s.ki_bits as usize));
            components.push(comp("B' marks", 0, s.mark_bits as usize));
            components.push(comp("bad blocks", 0, s.bad_block_bits as usize));
            shared = shared_tables().size_bits();
        }
        let mut r = SpaceReport::new(self.variant, self.n as u64, self.k as u64, components, shared);
        r.cache_bits = self
            .cache
            .get()
            .map_or(0, |h| (h.min.size_bits() + h.max.size_bits()) as u64);
        r
    }
}

fn plain(s: BitSeq) -> BitSeq {
    if s.mode() == StorageMode::Plain {
        s
    } else {
        BitSeq::from_words(s.to_words(), s.len(), StorageMode::Plain)
    }
}

fn compressed(s: BitSeq) -> BitSeq {
    if s.mode() == StorageMode::Compressed {
        s
    } else {
        BitSeq::from_words(s.to_words(), s.len(), StorageMode::Compressed)
    }
}

#[inline]
fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[cfg(test)]
mod tests;
