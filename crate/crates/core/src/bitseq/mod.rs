//! Immutable bit sequences with rank, select and short-pattern queries.
//!
//! Positions are 1-based: a sequence of length `n` holds `S[1..=n]`.
//! Two storage modes are available:
//!
//! - [`StorageMode::Plain`] keeps the raw words plus a two-level rank
//!   directory (4096-bit superblocks, 512-bit blocks).
//! - [`StorageMode::Compressed`] splits the bits into 63-bit blocks and keeps
//!   a 6-bit class (popcount) and an enumerative offset per block, so the
//!   payload is close to `lg C(n, m)` bits for `m` ones.
//!
//! Patterns of up to 8 symbols can be counted and located. An occurrence is
//! counted by `rank(i, p)` when it *ends* at or before `i`; `select(j, p)`
//! returns the *start* of the `j`-th occurrence.
//!
//! ```
//! use srq_core::bitseq::{BitSeq, Pattern, StorageMode};
//!
//! let s = BitSeq::parse("11010110", StorageMode::Plain).unwrap();
//! assert_eq!(s.rank(8, Pattern::ONE).unwrap(), 5);
//! assert_eq!(s.select(2, Pattern::ZERO).unwrap(), 5);
//! ```

mod enumerative;
mod packed;
mod sparse;

use std::fmt;
use std::str::FromStr;

pub use packed::PackedInts;
pub use sparse::SparseSet;

use crate::error::{format_err, Error, Result};
use crate::wire::{Reader, Writer};
use enumerative::BLOCK_BITS;

const SB_WORDS: usize = 64;
const BLK_WORDS: usize = 8;
const RRR_SB_BLOCKS: usize = 64;
const MAGIC: &[u8; 4] = b"SRQ1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StorageMode {
    Plain,
    Compressed,
}

/// A bit pattern of 1 to 8 symbols; symbol `t` is the `t`-th from the left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    bits: u8,
    len: u8,
}

impl Pattern {
    pub const ONE: Pattern = Pattern { bits: 1, len: 1 };
    pub const ZERO: Pattern = Pattern { bits: 0, len: 1 };
    /// `"(("`, the pattern that marks non-leftmost children in DFUDS.
    pub const OPEN_OPEN: Pattern = Pattern { bits: 0b11, len: 2 };

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyPattern);
        }
        if bits.len() > 8 {
            return Err(Error::PatternTooLong);
        }
        let mut b = 0u8;
        for (t, &x) in bits.iter().enumerate() {
            b |= (x as u8) << t;
        }
        Ok(Pattern { bits: b, len: bits.len() as u8 })
    }

    /// Parses `'1'`/`'('` as one and `'0'`/`')'` as zero.
    pub fn parse(s: &str) -> Result<Self> {
        let bits = s.chars().map(symbol).collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn bit(&self, t: usize) -> bool {
        (self.bits >> t) & 1 == 1
    }

    fn is_uniform(&self, b: bool) -> bool {
        (0..self.len()).all(|t| self.bit(t) == b)
    }
}

impl FromStr for Pattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Pattern::parse(s)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in 0..self.len() {
            f.write_str(if self.bit(t) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn symbol(c: char) -> Result<bool> {
    match c {
        '1' | '(' => Ok(true),
        '0' | ')' => Ok(false),
        other => Err(Error::PatternSymbol(other)),
    }
}

/// Bitmap of pattern occurrences ending in the word `cur`, given the 64 bits
/// preceding it in `prev`.
#[inline]
fn match_mask(prev: u64, cur: u64, p: Pattern) -> u64 {
    let combined = ((cur as u128) << 64) | prev as u128;
    let l = p.len() as u32;
    let mut m = u64::MAX;
    for t in 0..l {
        let d = l - 1 - t;
        let x = (combined >> (64 - d)) as u64;
        m &= if p.bit(t as usize) { x } else { !x };
    }
    m
}

#[inline]
fn select_in_word(mut w: u64, mut r: u32) -> u32 {
    let mut base = 0u32;
    loop {
        let c = (w & 0xff).count_ones();
        if r < c {
            break;
        }
        r -= c;
        w >>= 8;
        base += 8;
    }
    for _ in 0..r {
        w &= w - 1;
    }
    base + w.trailing_zeros()
}

/// Two-level cumulative counts of "hits" per 64-bit word.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct RankDir {
    sb: Vec<u64>,
    blk: Vec<u16>,
    total: u64,
}

impl RankDir {
    fn build(nwords: usize, hits: impl Fn(usize) -> u64) -> Self {
        let mut sb = Vec::with_capacity(nwords.div_ceil(SB_WORDS));
        let mut blk = Vec::with_capacity(nwords.div_ceil(BLK_WORDS));
        let mut total = 0u64;
        let mut in_sb = 0u64;
        for wi in 0..nwords {
            if wi % SB_WORDS == 0 {
                sb.push(total);
                in_sb = 0;
            }
            if wi % BLK_WORDS == 0 {
                blk.push(in_sb as u16);
            }
            let c = hits(wi).count_ones() as u64;
            total += c;
            in_sb += c;
        }
        RankDir { sb, blk, total }
    }

    fn size_bits(&self) -> usize {
        self.sb.len() * 64 + self.blk.len() * 16
    }

    #[inline]
    fn sb_count(&self, s: usize, inv: bool) -> u64 {
        if inv {
            (s * SB_WORDS * 64) as u64 - self.sb[s]
        } else {
            self.sb[s]
        }
    }

    #[inline]
    fn blk_count(&self, b: usize, inv: bool) -> u64 {
        if inv {
            ((b % (SB_WORDS / BLK_WORDS)) * BLK_WORDS * 64) as u64 - self.blk[b] as u64
        } else {
            self.blk[b] as u64
        }
    }

    /// Hits in bits `[0, i0)`; `hits(wi)` must already respect `inv`.
    #[inline]
    fn rank(&self, i0: usize, nwords: usize, inv: bool, hits: impl Fn(usize) -> u64) -> usize {
        let wi = i0 / 64;
        if wi >= nwords {
            return self.total_for(nwords, inv, &hits);
        }
        let b = wi / BLK_WORDS;
        let mut r = self.sb_count(wi / SB_WORDS, inv) + self.blk_count(b, inv);
        for w in b * BLK_WORDS..wi {
            r += hits(w).count_ones() as u64;
        }
        let off = i0 % 64;
        if off > 0 {
            r += (hits(wi) & ((1u64 << off) - 1)).count_ones() as u64;
        }
        r as usize
    }

    fn total_for(&self, nwords: usize, inv: bool, hits: &impl Fn(usize) -> u64) -> usize {
        if !inv {
            return self.total as usize;
        }
        if nwords == 0 {
            return 0;
        }
        let last = nwords - 1;
        let b = last / BLK_WORDS;
        let mut r = self.sb_count(last / SB_WORDS, inv) + self.blk_count(b, inv);
        for w in b * BLK_WORDS..=last {
            r += hits(w).count_ones() as u64;
        }
        r as usize
    }

    /// 0-based position of the `j`-th hit (1-based `j`).
    fn select(&self, j: usize, nwords: usize, inv: bool, hits: impl Fn(usize) -> u64) -> Option<usize> {
        if j == 0 || nwords == 0 {
            return None;
        }
        let j = j as u64;
        let nsb = self.sb.len();
        let s = partition_point(0, nsb, |s| self.sb_count(s, inv) < j);
        if s == 0 {
            return None;
        }
        let s = s - 1;
        let base = self.sb_count(s, inv);
        let b_lo = s * (SB_WORDS / BLK_WORDS);
        let b_hi = ((s + 1) * (SB_WORDS / BLK_WORDS)).min(self.blk.len());
        let b = partition_point(b_lo, b_hi, |b| base + self.blk_count(b, inv) < j) - 1;
        let mut acc = base + self.blk_count(b, inv);
        for wi in b * BLK_WORDS..nwords {
            let h = hits(wi);
            let c = h.count_ones() as u64;
            if acc + c >= j {
                return Some(wi * 64 + select_in_word(h, (j - acc - 1) as u32) as usize);
            }
            acc += c;
        }
        None
    }
}

/// First index in `lo..hi` where `pred` turns false (pred must be monotone).
#[inline]
fn partition_point(mut lo: usize, mut hi: usize, pred: impl Fn(usize) -> bool) -> usize {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Rrr {
    classes: PackedInts,
    offsets: Vec<u64>,
    offset_bits: usize,
    sb_rank: Vec<u64>,
    sb_ptr: Vec<u64>,
}

impl Rrr {
    fn build(len: usize, word: impl Fn(usize) -> u64) -> Self {
        let nblocks = len.div_ceil(BLOCK_BITS);
        let mut classes = PackedInts::with_capacity(6, nblocks);
        let mut offsets = Vec::new();
        let mut offset_bits = 0usize;
        let mut sb_rank = Vec::new();
        let mut sb_ptr = Vec::new();
        let mut rank = 0u64;
        for b in 0..nblocks {
            if b % RRR_SB_BLOCKS == 0 {
                sb_rank.push(rank);
                sb_ptr.push(offset_bits as u64);
            }
            let start = b * BLOCK_BITS;
            let block = extract_block(&word, start, len);
            let (c, o) = enumerative::encode(block);
            classes.push(c as u64);
            let w = enumerative::offset_width(c) as usize;
            if w > 0 {
                let need = (offset_bits + w).div_ceil(64);
                if offsets.len() < need {
                    offsets.resize(need, 0);
                }
                packed::write_bits(&mut offsets, offset_bits, w, o);
                offset_bits += w;
            }
            rank += c as u64;
        }
        Rrr { classes, offsets, offset_bits, sb_rank, sb_ptr }
    }

    fn nblocks(&self) -> usize {
        self.classes.len()
    }

    /// (ones before block b, offset pointer of block b)
    #[inline]
    fn locate(&self, b: usize) -> (u64, usize) {
        let s = b / RRR_SB_BLOCKS;
        let mut r = self.sb_rank[s];
        let mut ptr = self.sb_ptr[s] as usize;
        for x in s * RRR_SB_BLOCKS..b {
            let c = self.classes.get(x) as u32;
            r += c as u64;
            ptr += enumerative::offset_width(c) as usize;
        }
        (r, ptr)
    }

    #[inline]
    fn decode_at(&self, b: usize, ptr: usize) -> u64 {
        let c = self.classes.get(b) as u32;
        let w = enumerative::offset_width(c) as usize;
        let o = packed::read_bits(&self.offsets, ptr, w);
        enumerative::decode(c, o)
    }

    fn block(&self, b: usize) -> u64 {
        if b >= self.nblocks() {
            return 0;
        }
        let (_, ptr) = self.locate(b);
        self.decode_at(b, ptr)
    }

    fn rank1(&self, i0: usize) -> usize {
        let b = i0 / BLOCK_BITS;
        if b >= self.nblocks() {
            return self.total() as usize;
        }
        let (r, ptr) = self.locate(b);
        let off = i0 % BLOCK_BITS;
        let extra = if off == 0 {
            0
        } else {
            (self.decode_at(b, ptr) & ((1u64 << off) - 1)).count_ones() as u64
        };
        (r + extra) as usize
    }

    fn total(&self) -> u64 {
        let n = self.nblocks();
        if n == 0 {
            return 0;
        }
        let s = (n - 1) / RRR_SB_BLOCKS;
        let mut r = self.sb_rank[s];
        for x in s * RRR_SB_BLOCKS..n {
            r += self.classes.get(x);
        }
        r
    }

    /// 0-based position of the j-th one (`ones == true`) or zero.
    fn select(&self, j: usize, ones: bool, len: usize) -> Option<usize> {
        let j = j as u64;
        let count = |s: usize| -> u64 {
            if ones {
                self.sb_rank[s]
            } else {
                (s * RRR_SB_BLOCKS * BLOCK_BITS) as u64 - self.sb_rank[s]
            }
        };
        let s = partition_point(0, self.sb_rank.len(), |s| count(s) < j);
        if s == 0 {
            return None;
        }
        let s = s - 1;
        let mut acc = count(s);
        let mut ptr = self.sb_ptr[s] as usize;
        for b in s * RRR_SB_BLOCKS..self.nblocks() {
            let c = self.classes.get(b) as u32;
            let valid = (len - b * BLOCK_BITS).min(BLOCK_BITS) as u64;
            let here = if ones { c as u64 } else { valid - c as u64 };
            if acc + here >= j {
                let block = self.decode_at(b, ptr);
                let h = if ones { block } else { !block & ((1u64 << valid) - 1) };
                return Some(b * BLOCK_BITS + select_in_word(h, (j - acc - 1) as u32) as usize);
            }
            acc += here;
            ptr += enumerative::offset_width(c) as usize;
        }
        None
    }

    fn aux_bits(&self) -> usize {
        self.classes.size_bits() + (self.sb_rank.len() + self.sb_ptr.len()) * 64
    }
}

fn extract_block(word: &impl Fn(usize) -> u64, start: usize, len: usize) -> u64 {
    let wi = start / 64;
    let off = start % 64;
    let mut v = word(wi) >> off;
    if off + BLOCK_BITS > 64 {
        v |= word(wi + 1) << (64 - off);
    }
    let valid = (len - start).min(BLOCK_BITS);
    v & ((1u64 << valid) - 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Store {
    Plain { words: Vec<u64>, dir: RankDir },
    Const(bool),
    Rrr(Rrr),
}

/// An immutable bit sequence. See the [module documentation](self).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSeq {
    len: usize,
    ones: usize,
    store: Store,
    patterns: Vec<(Pattern, RankDir)>,
}

impl Default for BitSeq {
    fn default() -> Self {
        BitSeq::from_words(Vec::new(), 0, StorageMode::Plain)
    }
}

impl BitSeq {
    pub fn build(bits: &[bool], mode: StorageMode) -> Self {
        Self::from_iter_bits(bits.iter().copied(), mode)
    }

    pub fn from_iter_bits(bits: impl IntoIterator<Item = bool>, mode: StorageMode) -> Self {
        let mut b = BitBuf::new();
        for x in bits {
            b.push(x);
        }
        b.finish(mode)
    }

    /// Parses `0`/`1` or `)`/`(`; whitespace is ignored.
    pub fn parse(s: &str, mode: StorageMode) -> Result<Self> {
        let mut b = BitBuf::new();
        for c in s.chars().filter(|c| !c.is_whitespace()) {
            b.push(symbol(c)?);
        }
        Ok(b.finish(mode))
    }

    /// Builds from LSB-first words; bits past `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize, mode: StorageMode) -> Self {
        words.resize(len.div_ceil(64), 0);
        if !len.is_multiple_of(64) {
            let last = words.len() - 1;
            words[last] &= (1u64 << (len % 64)) - 1;
        }
        let ones = words.iter().map(|w| w.count_ones() as usize).sum::<usize>();
        let store = match mode {
            StorageMode::Plain => {
                let dir = RankDir::build(words.len(), |wi| words[wi]);
                Store::Plain { words, dir }
            }
            StorageMode::Compressed if ones == 0 || ones == len => Store::Const(ones > 0),
            StorageMode::Compressed => {
                Store::Rrr(Rrr::build(len, |wi| words.get(wi).copied().unwrap_or(0)))
            }
        };
        BitSeq { len, ones, store, patterns: Vec::new() }
    }

    /// Adds a rank/select directory for `p` so pattern queries avoid scanning.
    pub fn with_pattern(mut self, p: Pattern) -> Self {
        if p.len() > 1 && !self.patterns.iter().any(|(q, _)| *q == p) {
            // constant sequences answer in closed form; their length is not
            // bounded by any stored data
            let dir = match self.store {
                Store::Const(_) => RankDir { sb: Vec::new(), blk: Vec::new(), total: 0 },
                _ => RankDir::build(self.nwords(), |wi| self.pattern_hits(wi, p)),
            };
            self.patterns.push((p, dir));
        }
        self
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn mode(&self) -> StorageMode {
        match self.store {
            Store::Plain { .. } => StorageMode::Plain,
            _ => StorageMode::Compressed,
        }
    }

    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.ones
    }

    /// Bits of raw payload: the words in plain mode, the offsets in
    /// compressed mode (nothing for an all-equal sequence).
    pub fn payload_bits(&self) -> usize {
        match &self.store {
            Store::Plain { .. } => self.len,
            Store::Const(_) => 0,
            Store::Rrr(r) => r.offset_bits,
        }
    }

    /// Bits of directories and block classes.
    pub fn aux_bits(&self) -> usize {
        let base = match &self.store {
            Store::Plain { dir, .. } => dir.size_bits(),
            Store::Const(_) => 0,
            Store::Rrr(r) => r.aux_bits(),
        };
        base + self.patterns.iter().map(|(_, d)| d.size_bits()).sum::<usize>()
    }

    fn nwords(&self) -> usize {
        self.len.div_ceil(64)
    }

    /// Bits `[64 wi, 64 wi + 64)` (0-based), zero past the end.
    #[inline]
    pub fn word(&self, wi: usize) -> u64 {
        match &self.store {
            Store::Plain { words, .. } => words.get(wi).copied().unwrap_or(0),
            Store::Const(false) => 0,
            Store::Const(true) => {
                let start = wi * 64;
                if start >= self.len {
                    0
                } else if self.len - start >= 64 {
                    u64::MAX
                } else {
                    (1u64 << (self.len - start)) - 1
                }
            }
            Store::Rrr(r) => {
                let start = wi * 64;
                if start >= self.len {
                    return 0;
                }
                let b = start / BLOCK_BITS;
                let off = start % BLOCK_BITS;
                let v = r.block(b) >> off;
                v | r.block(b + 1) << (BLOCK_BITS - off)
            }
        }
    }

    /// Up to 64 bits starting at 0-based offset `pos0`, LSB first.
    #[inline]
    pub fn bits_at(&self, pos0: usize, len: usize) -> u64 {
        debug_assert!(len <= 64);
        if len == 0 {
            return 0;
        }
        let wi = pos0 / 64;
        let off = pos0 % 64;
        let mut v = self.word(wi) >> off;
        if off + len > 64 {
            v |= self.word(wi + 1) << (64 - off);
        }
        if len < 64 {
            v &= (1u64 << len) - 1;
        }
        v
    }

    /// Bit at 1-based position `i`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i >= 1 && i <= self.len, "position {i} outside 1..={}", self.len);
        match &self.store {
            Store::Plain { words, .. } => (words[(i - 1) / 64] >> ((i - 1) % 64)) & 1 == 1,
            _ => self.bits_at(i - 1, 1) == 1,
        }
    }

    /// Ones in `S[1..=i]`.
    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        match &self.store {
            Store::Plain { words, dir } => dir.rank(i, words.len(), false, |wi| words[wi]),
            Store::Const(b) => {
                if *b {
                    i
                } else {
                    0
                }
            }
            Store::Rrr(r) => r.rank1(i),
        }
    }

    /// Zeros in `S[1..=i]`.
    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    /// 1-based position of the `j`-th one.
    #[inline]
    pub fn select1(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.ones {
            return None;
        }
        let p0 = match &self.store {
            Store::Plain { words, dir } => dir.select(j, words.len(), false, |wi| words[wi]),
            Store::Const(_) => Some(j - 1),
            Store::Rrr(r) => r.select(j, true, self.len),
        };
        p0.map(|p| p + 1)
    }

    /// 1-based position of the `j`-th zero.
    #[inline]
    pub fn select0(&self, j: usize) -> Option<usize> {
        if j == 0 || j > self.len - self.ones {
            return None;
        }
        let p0 = match &self.store {
            Store::Plain { words, dir } => {
                let len = self.len;
                dir.select(j, words.len(), true, |wi| !words[wi] & valid_mask(wi, len))
            }
            Store::Const(_) => Some(j - 1),
            Store::Rrr(r) => r.select(j, false, self.len),
        };
        p0.map(|p| p + 1)
    }

    /// Occurrences of `p` ending in word `wi`, as a bitmap over end positions.
    #[inline]
    fn pattern_hits(&self, wi: usize, p: Pattern) -> u64 {
        let prev = if wi == 0 { 0 } else { self.word(wi - 1) };
        let mut m = match_mask(prev, self.word(wi), p);
        if wi == 0 {
            m &= !((1u64 << (p.len() - 1)) - 1);
        }
        m & valid_mask(wi, self.len)
    }

    fn dir_for(&self, p: Pattern) -> Option<&RankDir> {
        self.patterns.iter().find(|(q, _)| *q == p).map(|(_, d)| d)
    }

    /// Occurrences of `p` that end at or before position `i`.
    pub fn rank(&self, i: usize, p: Pattern) -> Result<usize> {
        if i > self.len {
            return Err(Error::OutOfRange { pos: i, len: self.len });
        }
        if p.is_empty() {
            return Err(Error::EmptyPattern);
        }
        Ok(self.rank_pattern(i, p))
    }

    #[inline]
    pub(crate) fn rank_pattern(&self, i: usize, p: Pattern) -> usize {
        if p == Pattern::ONE {
            return self.rank1(i);
        }
        if p == Pattern::ZERO {
            return self.rank0(i);
        }
        if let Store::Const(b) = self.store {
            return if p.is_uniform(b) { (i + 1).saturating_sub(p.len()) } else { 0 };
        }
        let hits = |wi| self.pattern_hits(wi, p);
        match self.dir_for(p) {
            Some(d) => d.rank(i, self.nwords(), false, hits),
            None => {
                let wi = i / 64;
                let mut r: usize = (0..wi).map(|w| hits(w).count_ones() as usize).sum();
                if !i.is_multiple_of(64) {
                    r += (hits(wi) & ((1u64 << (i % 64)) - 1)).count_ones() as usize;
                }
                r
            }
        }
    }

    /// Start position of the `j`-th occurrence of `p`.
    pub fn select(&self, j: usize, p: Pattern) -> Result<usize> {
        if p.is_empty() {
            return Err(Error::EmptyPattern);
        }
        self.select_pattern(j, p).ok_or_else(|| Error::NoOccurrence {
            j,
            count: self.rank_pattern(self.len, p),
        })
    }

    #[inline]
    pub(crate) fn select_pattern(&self, j: usize, p: Pattern) -> Option<usize> {
        if p == Pattern::ONE {
            return self.select1(j);
        }
        if p == Pattern::ZERO {
            return self.select0(j);
        }
        if let Store::Const(b) = self.store {
            return (p.is_uniform(b) && j >= 1 && j + p.len() - 1 <= self.len).then_some(j);
        }
        let hits = |wi| self.pattern_hits(wi, p);
        let end0 = match self.dir_for(p) {
            Some(d) => d.select(j, self.nwords(), false, hits)?,
            None => {
                if j == 0 {
                    return None;
                }
                let mut acc = 0usize;
                let mut found = None;
                for wi in 0..self.nwords() {
                    let h = hits(wi);
                    let c = h.count_ones() as usize;
                    if acc + c >= j {
                        found = Some(wi * 64 + select_in_word(h, (j - acc - 1) as u32) as usize);
                        break;
                    }
                    acc += c;
                }
                found?
            }
        };
        Some(end0 + 2 - p.len())
    }

    /// Bits `S[i..i+len)`, LSB first (bit 0 of the result is `S[i]`).
    pub fn extract(&self, i: usize, len: usize) -> Result<u64> {
        if len > 64 || i == 0 || i - 1 + len > self.len {
            return Err(Error::BadWindow { start: i, len, total: self.len });
        }
        Ok(self.bits_at(i - 1, len))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.nwords()).flat_map(move |wi| {
            let w = self.word(wi);
            let n = (self.len - wi * 64).min(64);
            (0..n).map(move |t| (w >> t) & 1 == 1)
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        self.iter().collect()
    }

    pub fn to_words(&self) -> Vec<u64> {
        (0..self.nwords()).map(|wi| self.word(wi)).collect()
    }

    /// Renders as `0`/`1` characters.
    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Renders as parentheses, one = `(`.
    pub fn to_paren_string(&self) -> String {
        self.iter().map(|b| if b { '(' } else { ')' }).collect()
    }

    /// Appends the `SRQ1` serialization to `out`.
    pub fn write_to(&self, out: &mut Vec<u8>) {
        let mut w = Writer::default();
        w.bytes(MAGIC);
        w.u64(self.len as u64);
        match &self.store {
            Store::Plain { words, dir } => {
                w.u8(0);
                w.words(words);
                w.words(&dir_words(dir));
            }
            Store::Const(b) => {
                w.u8(1);
                w.u64(if *b { self.len as u64 } else { 0 });
                w.words(&[]);
                w.u64(0);
                w.words(&[]);
                w.words(&[]);
            }
            Store::Rrr(r) => {
                w.u8(1);
                w.u64(self.ones as u64);
                w.words(r.classes.words());
                w.u64(r.offset_bits as u64);
                w.words(&r.offsets);
                let dir: Vec<u64> =
                    r.sb_rank.iter().zip(&r.sb_ptr).flat_map(|(&a, &b)| [a, b]).collect();
                w.words(&dir);
            }
        }
        w.u8(self.patterns.len() as u8);
        for (p, _) in &self.patterns {
            w.u8(p.bits);
            w.u8(p.len);
        }
        out.extend_from_slice(&w.buf);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.write_to(&mut v);
        v
    }

    /// Parses a standalone `SRQ1` bit sequence, rejecting trailing bytes.
    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let mut r = Reader::new(data);
        let s = Self::read_from(&mut r)?;
        r.finish()?;
        Ok(s)
    }

    pub(crate) fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_magic(MAGIC)?;
        let len = r.usize()?;
        let mode = r.u8()?;
        let seq = match mode {
            0 => {
                let words = r.words()?;
                if words.len() != len.div_ceil(64) {
                    return Err(format_err("plain word count does not match length"));
                }
                if len % 64 != 0 && words[words.len() - 1] >> (len % 64) != 0 {
                    return Err(format_err("bits set past the end"));
                }
                let dir = r.words()?;
                let seq = BitSeq::from_words(words, len, StorageMode::Plain);
                let Store::Plain { dir: built, .. } = &seq.store else { unreachable!() };
                if dir != dir_words(built) {
                    return Err(format_err("plain rank directory mismatch"));
                }
                seq
            }
            1 => {
                let ones = r.usize()?;
                if ones > len {
                    return Err(format_err("more ones than bits"));
                }
                let class_words = r.words()?;
                let offset_bits = r.usize()?;
                let offsets = r.words()?;
                let dir = r.words()?;
                if ones == 0 || ones == len {
                    if !class_words.is_empty() || offset_bits != 0 || !offsets.is_empty() || !dir.is_empty() {
                        return Err(format_err("constant sequence carries payload"));
                    }
                    BitSeq { len, ones, store: Store::Const(ones > 0), patterns: Vec::new() }
                } else {
                    let nblocks = len.div_ceil(BLOCK_BITS);
                    let classes = PackedInts::from_raw(6, nblocks, class_words)
                        .ok_or_else(|| format_err("class array size mismatch"))?;
                    if offsets.len() != offset_bits.div_ceil(64) {
                        return Err(format_err("offset array size mismatch"));
                    }
                    let words = decode_rrr_words(len, &classes, &offsets, offset_bits)?;
                    let seq = BitSeq::from_words(words, len, StorageMode::Compressed);
                    let Store::Rrr(built) = &seq.store else {
                        return Err(format_err("decoded bits are constant"));
                    };
                    let expect: Vec<u64> =
                        built.sb_rank.iter().zip(&built.sb_ptr).flat_map(|(&a, &b)| [a, b]).collect();
                    if seq.ones != ones || built.offsets != offsets || dir != expect {
                        return Err(format_err("compressed directory mismatch"));
                    }
                    seq
                }
            }
            m => return Err(format_err(format!("unknown storage mode {m}"))),
        };
        let np = r.u8()?;
        let mut seq = seq;
        for _ in 0..np {
            let bits = r.u8()?;
            let plen = r.u8()?;
            if !(2..=8).contains(&plen) || (plen < 8 && bits >> plen != 0) {
                return Err(format_err("invalid registered pattern"));
            }
            seq = seq.with_pattern(Pattern { bits, len: plen });
        }
        Ok(seq)
    }
}

fn dir_words(d: &RankDir) -> Vec<u64> {
    let mut v = d.sb.clone();
    for chunk in d.blk.chunks(4) {
        let mut x = 0u64;
        for (t, &b) in chunk.iter().enumerate() {
            x |= (b as u64) << (16 * t);
        }
        v.push(x);
    }
    v
}

fn decode_rrr_words(len: usize, classes: &PackedInts, offsets: &[u64], offset_bits: usize) -> Result<Vec<u64>> {
    let mut words = vec![0u64; len.div_ceil(64)];
    let mut ptr = 0usize;
    for b in 0..classes.len() {
        let c = classes.get(b) as u32;
        let valid = (len - b * BLOCK_BITS).min(BLOCK_BITS);
        if c as usize > valid {
            return Err(format_err(format!("block {b} class {c} exceeds {valid} bits")));
        }
        let w = enumerative::offset_width(c) as usize;
        if ptr + w > offset_bits {
            return Err(format_err("offset stream truncated"));
        }
        let o = packed::read_bits(offsets, ptr, w);
        if o >= enumerative::class_size(c) {
            return Err(format_err(format!("block {b} offset out of range")));
        }
        ptr += w;
        let block = enumerative::decode(c, o);
        if valid < BLOCK_BITS && block >> valid != 0 {
            return Err(format_err("bits set past the end"));
        }
        packed::write_bits(&mut words, b * BLOCK_BITS, valid, block);
    }
    if ptr != offset_bits {
        return Err(format_err("offset stream has trailing bits"));
    }
    Ok(words)
}

#[inline]
fn valid_mask(wi: usize, len: usize) -> u64 {
    let start = wi * 64;
    if start + 64 <= len {
        u64::MAX
    } else if start >= len {
        0
    } else {
        (1u64 << (len - start)) - 1
    }
}

/// Append-only bit buffer used by builders.
#[derive(Clone, Debug, Default)]
pub struct BitBuf {
    words: Vec<u64>,
    len: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitBuf { words: Vec::with_capacity(bits.div_ceil(64)), len: 0 }
    }

    #[inline]
    pub fn push(&mut self, b: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if b {
            *self.words.last_mut().expect("word") |= 1u64 << (self.len % 64);
        }
        self.len += 1;
    }

    /// Pushes `count` copies of `b`.
    pub fn push_run(&mut self, b: bool, mut count: usize) {
        while count > 0 && !self.len.is_multiple_of(64) {
            self.push(b);
            count -= 1;
        }
        while count >= 64 {
            self.words.push(if b { u64::MAX } else { 0 });
            self.len += 64;
            count -= 64;
        }
        for _ in 0..count {
            self.push(b);
        }
    }

    /// Pushes the low `n` bits of `v`, LSB first.
    pub fn push_bits(&mut self, v: u64, n: usize) {
        for t in 0..n {
            self.push((v >> t) & 1 == 1);
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i0: usize) -> bool {
        (self.words[i0 / 64] >> (i0 % 64)) & 1 == 1
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn finish(self, mode: StorageMode) -> BitSeq {
        BitSeq::from_words(self.words, self.len, mode)
    }

    pub fn into_bools(self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}
