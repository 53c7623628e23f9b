//! Balanced parentheses over a [`BitSeq`] (1 = `(`, 0 = `)`).
//!
//! Positions are 1-based and `excess(i)` counts opens minus closes in
//! `S[1..=i]`. Matching and range-minimum searches scan at most two 512-bit
//! blocks with byte tables and use a segment tree over per-block excess
//! extrema to skip everything in between.

use std::sync::OnceLock;

use crate::bitseq::{BitSeq, StorageMode};
use crate::error::{Error, Result};

const BLOCK: usize = 512;

struct ByteTables {
    exc: [i8; 256],
    /// min/max of e_1..e_8 and the first k attaining the min
    fmin: [i8; 256],
    fmax: [i8; 256],
    fmin_pos: [u8; 256],
    /// min/max of e_0..e_7
    bmin: [i8; 256],
    bmax: [i8; 256],
}

fn tables() -> &'static ByteTables {
    static T: OnceLock<ByteTables> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = ByteTables {
            exc: [0; 256],
            fmin: [0; 256],
            fmax: [0; 256],
            fmin_pos: [0; 256],
            bmin: [0; 256],
            bmax: [0; 256],
        };
        for b in 0..256usize {
            let mut e = 0i8;
            let (mut fmin, mut fmax, mut fpos) = (i8::MAX, i8::MIN, 0u8);
            let (mut bmin, mut bmax) = (0i8, 0i8);
            for k in 1..=8 {
                e += if (b >> (k - 1)) & 1 == 1 { 1 } else { -1 };
                if e < fmin {
                    fmin = e;
                    fpos = k as u8;
                }
                fmax = fmax.max(e);
                if k < 8 {
                    bmin = bmin.min(e);
                    bmax = bmax.max(e);
                }
            }
            t.exc[b] = e;
            t.fmin[b] = fmin;
            t.fmax[b] = fmax;
            t.fmin_pos[b] = fpos;
            t.bmin[b] = bmin;
            t.bmax[b] = bmax;
        }
        t
    })
}

/// A parenthesis sequence with excess search support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParenSeq {
    bits: BitSeq,
    nblocks: usize,
    size: usize,
    tmin: Vec<i32>,
    tmax: Vec<i32>,
}

impl ParenSeq {
    /// Wraps `bits`, rejecting sequences that are not balanced.
    pub fn new(bits: BitSeq) -> Result<Self> {
        let ps = Self::new_unchecked(bits);
        let min = if ps.nblocks == 0 { 0 } else { ps.tmin[1] };
        if min < 0 || ps.excess_at(ps.len()) != 0 {
            return Err(Error::Unbalanced);
        }
        Ok(ps)
    }

    /// Wraps `bits` without checking balance; searches that run off the end
    /// report `None`.
    pub fn new_unchecked(bits: BitSeq) -> Self {
        let bits = if bits.mode() == StorageMode::Plain {
            bits
        } else {
            BitSeq::from_words(bits.to_words(), bits.len(), StorageMode::Plain)
        };
        let n = bits.len();
        let nblocks = n.div_ceil(BLOCK);
        let size = nblocks.next_power_of_two().max(1);
        let mut tmin = vec![i32::MAX; 2 * size];
        let mut tmax = vec![i32::MIN; 2 * size];
        let tb = tables();
        let mut e = 0i32;
        for b in 0..nblocks {
            let (mut lo, mut hi) = (i32::MAX, i32::MIN);
            let start = b * BLOCK;
            let end = (start + BLOCK).min(n);
            let mut q = start;
            while q < end {
                if q + 8 <= end {
                    let byte = bits.bits_at(q, 8) as usize;
                    lo = lo.min(e + tb.fmin[byte] as i32);
                    hi = hi.max(e + tb.fmax[byte] as i32);
                    e += tb.exc[byte] as i32;
                    q += 8;
                } else {
                    e += if bits.bits_at(q, 1) == 1 { 1 } else { -1 };
                    lo = lo.min(e);
                    hi = hi.max(e);
                    q += 1;
                }
            }
            tmin[size + b] = lo;
            tmax[size + b] = hi;
        }
        for v in (1..size).rev() {
            tmin[v] = tmin[2 * v].min(tmin[2 * v + 1]);
            tmax[v] = tmax[2 * v].max(tmax[2 * v + 1]);
        }
        ParenSeq { bits, nblocks, size, tmin, tmax }
    }

    pub fn bits(&self) -> &BitSeq {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bits of the block extrema tree.
    pub fn aux_bits(&self) -> usize {
        (self.tmin.len() + self.tmax.len()) * 32
    }

    #[inline]
    pub fn is_open(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    #[inline]
    pub(crate) fn excess_at(&self, i: usize) -> i64 {
        2 * self.bits.rank1(i) as i64 - i as i64
    }

    pub fn excess(&self, i: usize) -> Result<i64> {
        if i > self.len() {
            return Err(Error::OutOfRange { pos: i, len: self.len() });
        }
        Ok(self.excess_at(i))
    }

    pub fn findclose(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.len() {
            return Err(Error::OutOfRange { pos: i, len: self.len() });
        }
        if !self.is_open(i) {
            return Err(Error::NotOpen(i));
        }
        self.fwd_search(i, -1).ok_or(Error::Unbalanced)
    }

    pub fn findopen(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.len() {
            return Err(Error::OutOfRange { pos: i, len: self.len() });
        }
        if self.is_open(i) {
            return Err(Error::NotClose(i));
        }
        self.bwd_search(i, 0).map(|j| j + 1).ok_or(Error::Unbalanced)
    }

    /// Matching close of the open at `i`, unchecked.
    #[inline]
    pub(crate) fn close_of(&self, i: usize) -> usize {
        self.fwd_search(i, -1).expect("balanced sequence")
    }

    /// Matching open of the close at `i`, unchecked.
    #[inline]
    pub(crate) fn open_of(&self, i: usize) -> usize {
        self.bwd_search(i, 0).expect("balanced sequence") + 1
    }

    /// Smallest `j > i` with `excess(j) = excess(i) + d`.
    pub fn fwd_search(&self, i: usize, d: i64) -> Option<usize> {
        let n = self.len();
        if i >= n {
            return None;
        }
        let t = self.excess_at(i) + d;
        let b = i / BLOCK;
        let end = ((b + 1) * BLOCK).min(n);
        if let Some(j) = self.scan_fwd(i + 1, end, t) {
            return Some(j);
        }
        let nb = self.first_block_containing(b + 1, t)?;
        self.scan_fwd(nb * BLOCK + 1, ((nb + 1) * BLOCK).min(n), t)
    }

    /// Largest `j < i` (possibly 0) with `excess(j) = excess(i) + d`.
    pub fn bwd_search(&self, i: usize, d: i64) -> Option<usize> {
        if i == 0 || i > self.len() {
            return None;
        }
        let t = self.excess_at(i) + d;
        let b = (i - 1) / BLOCK;
        if let Some(j) = self.scan_bwd(i - 1, b * BLOCK, t) {
            return Some(j);
        }
        if b > 0 {
            if let Some(pb) = self.last_block_containing(b - 1, t) {
                return self.scan_bwd((pb + 1) * BLOCK, pb * BLOCK + 1, t);
            }
        }
        (t == 0).then_some(0)
    }

    /// Leftmost position in `[i, j]` of minimum excess.
    pub fn min_excess_pos(&self, i: usize, j: usize) -> Result<usize> {
        if i == 0 || i > j {
            return Err(Error::EmptyRange { i, j });
        }
        if j > self.len() {
            return Err(Error::OutOfRange { pos: j, len: self.len() });
        }
        Ok(self.min_excess(i, j).1)
    }

    /// (minimum excess, leftmost position) over `[i, j]`.
    pub(crate) fn min_excess(&self, i: usize, j: usize) -> (i64, usize) {
        let bi = (i - 1) / BLOCK;
        let bj = (j - 1) / BLOCK;
        if bi == bj {
            return self.scan_min(i, j);
        }
        let mut best = self.scan_min(i, (bi + 1) * BLOCK);
        if bi + 1 < bj {
            let (m, mb) = self.range_min(bi + 1, bj - 1);
            if (m as i64) < best.0 {
                best = self.scan_min(mb * BLOCK + 1, (mb + 1) * BLOCK);
            }
        }
        let tail = self.scan_min(bj * BLOCK + 1, j);
        if tail.0 < best.0 {
            best = tail;
        }
        best
    }

    fn scan_fwd(&self, lo: usize, hi: usize, t: i64) -> Option<usize> {
        if lo > hi {
            return None;
        }
        let tb = tables();
        let mut e = self.excess_at(lo - 1);
        let mut q = lo - 1;
        while q < hi {
            if q.is_multiple_of(8) && q + 8 <= hi {
                let byte = self.bits.bits_at(q, 8) as usize;
                let delta = t - e;
                if delta < tb.fmin[byte] as i64 || delta > tb.fmax[byte] as i64 {
                    e += tb.exc[byte] as i64;
                    q += 8;
                    continue;
                }
                for k in 0..8 {
                    e += if (byte >> k) & 1 == 1 { 1 } else { -1 };
                    if e == t {
                        return Some(q + k + 1);
                    }
                }
                unreachable!("byte table promised a hit");
            }
            e += if self.bits.bits_at(q, 1) == 1 { 1 } else { -1 };
            q += 1;
            if e == t {
                return Some(q);
            }
        }
        None
    }

    fn scan_bwd(&self, hi: usize, lo: usize, t: i64) -> Option<usize> {
        let tb = tables();
        let mut e = self.excess_at(hi);
        let mut j = hi;
        loop {
            if e == t {
                return Some(j);
            }
            if j <= lo {
                return None;
            }
            if j.is_multiple_of(8) && j >= lo + 8 {
                let byte = self.bits.bits_at(j - 8, 8) as usize;
                let base = e - tb.exc[byte] as i64;
                let delta = t - base;
                if delta < tb.bmin[byte] as i64 || delta > tb.bmax[byte] as i64 {
                    e = base;
                    j -= 8;
                    continue;
                }
            }
            e -= if self.bits.bits_at(j - 1, 1) == 1 { 1 } else { -1 };
            j -= 1;
        }
    }

    fn scan_min(&self, lo: usize, hi: usize) -> (i64, usize) {
        let tb = tables();
        let mut e = self.excess_at(lo - 1);
        let mut best = (i64::MAX, lo);
        let mut q = lo - 1;
        while q < hi {
            if q.is_multiple_of(8) && q + 8 <= hi {
                let byte = self.bits.bits_at(q, 8) as usize;
                let m = e + tb.fmin[byte] as i64;
                if m < best.0 {
                    best = (m, q + tb.fmin_pos[byte] as usize);
                }
                e += tb.exc[byte] as i64;
                q += 8;
                continue;
            }
            e += if self.bits.bits_at(q, 1) == 1 { 1 } else { -1 };
            q += 1;
            if e < best.0 {
                best = (e, q);
            }
        }
        best
    }

    fn first_block_containing(&self, from: usize, t: i64) -> Option<usize> {
        if from >= self.nblocks {
            return None;
        }
        self.descend_first(1, 0, self.size, from, t)
    }

    fn descend_first(&self, v: usize, lo: usize, hi: usize, from: usize, t: i64) -> Option<usize> {
        if hi <= from || (self.tmin[v] as i64) > t || (self.tmax[v] as i64) < t {
            return None;
        }
        if hi - lo == 1 {
            return Some(lo);
        }
        let mid = (lo + hi) / 2;
        self.descend_first(2 * v, lo, mid, from, t)
            .or_else(|| self.descend_first(2 * v + 1, mid, hi, from, t))
    }

    fn last_block_containing(&self, to: usize, t: i64) -> Option<usize> {
        self.descend_last(1, 0, self.size, to, t)
    }

    fn descend_last(&self, v: usize, lo: usize, hi: usize, to: usize, t: i64) -> Option<usize> {
        if lo > to || (self.tmin[v] as i64) > t || (self.tmax[v] as i64) < t {
            return None;
        }
        if hi - lo == 1 {
            return Some(lo);
        }
        let mid = (lo + hi) / 2;
        self.descend_last(2 * v + 1, mid, hi, to, t)
            .or_else(|| self.descend_last(2 * v, lo, mid, to, t))
    }

    /// (minimum, leftmost block attaining it) over blocks `[a, b]`.
    fn range_min(&self, a: usize, b: usize) -> (i32, usize) {
        let mut best = (i32::MAX, usize::MAX);
        self.range_min_rec(1, 0, self.size, a, b + 1, &mut best);
        best
    }

    fn range_min_rec(&self, v: usize, lo: usize, hi: usize, a: usize, b: usize, best: &mut (i32, usize)) {
        if hi <= a || b <= lo || self.tmin[v] >= best.0 {
            return;
        }
        if a <= lo && hi <= b {
            // fully covered: descend to the leftmost leaf with this minimum
            let (mut v, mut lo, mut hi) = (v, lo, hi);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if self.tmin[2 * v] == self.tmin[v] {
                    v *= 2;
                    hi = mid;
                } else {
                    v = 2 * v + 1;
                    lo = mid;
                }
            }
            *best = (self.tmin[v], lo);
            return;
        }
        let mid = (lo + hi) / 2;
        self.range_min_rec(2 * v, lo, mid, a, b, best);
        self.range_min_rec(2 * v + 1, mid, hi, a, b, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> ParenSeq {
        ParenSeq::new(BitSeq::parse(s, StorageMode::Plain).unwrap()).unwrap()
    }

    fn stack_matches(bits: &[bool]) -> Vec<usize> {
        let mut m = vec![0; bits.len() + 1];
        let mut st = Vec::new();
        for (q, &b) in bits.iter().enumerate() {
            if b {
                st.push(q + 1);
            } else {
                let o = st.pop().unwrap();
                m[o] = q + 1;
                m[q + 1] = o;
            }
        }
        m
    }

    fn random_balanced(n_pairs: usize, seed: u64) -> Vec<bool> {
        let mut x = seed | 1;
        let mut out = Vec::with_capacity(2 * n_pairs);
        let (mut open_left, mut depth) = (n_pairs, 0usize);
        while out.len() < 2 * n_pairs {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let go_open = open_left > 0 && (depth == 0 || x % 100 < 52);
            if go_open {
                out.push(true);
                open_left -= 1;
                depth += 1;
            } else {
                out.push(false);
                depth -= 1;
            }
        }
        out
    }

    #[test]
    fn unit_pair() {
        let p = ps("()");
        assert_eq!(p.findclose(1).unwrap(), 2);
        assert_eq!(p.findopen(2).unwrap(), 1);
        assert_eq!(p.excess(0).unwrap(), 0);
        assert!(p.findclose(2).is_err());
        assert!(p.findopen(1).is_err());
    }

    #[test]
    fn heap_sequence_matching() {
        let p = ps("((((()(())((())))))()(()))");
        assert_eq!(p.findclose(7).unwrap(), 10);
        assert_eq!(p.findopen(10).unwrap(), 7);
        assert_eq!(p.excess(26).unwrap(), 0);
    }

    #[test]
    fn excess_and_min() {
        let p = ParenSeq::new_unchecked(BitSeq::parse("(()", StorageMode::Plain).unwrap());
        assert_eq!(p.excess(3).unwrap(), 1);
        let p = ps("(())");
        assert_eq!(p.min_excess_pos(1, 4).unwrap(), 4);
        let p = ps("((((()))))");
        assert_eq!(p.min_excess_pos(2, 4).unwrap(), 2);
        assert!(p.min_excess_pos(3, 2).is_err());
    }

    #[test]
    fn rejects_unbalanced() {
        assert_eq!(
            ParenSeq::new(BitSeq::parse(")(", StorageMode::Plain).unwrap()),
            Err(Error::Unbalanced)
        );
        assert!(ParenSeq::new(BitSeq::parse("((", StorageMode::Plain).unwrap()).is_err());
    }

    #[test]
    fn random_sequences_match_stack_scan() {
        for (pairs, seed) in [(2048usize, 7u64), (3000, 11), (700, 99), (50, 5)] {
            let bits = random_balanced(pairs, seed);
            let m = stack_matches(&bits);
            let p = ParenSeq::new(BitSeq::build(&bits, StorageMode::Plain)).unwrap();
            for q in 1..=bits.len() {
                if bits[q - 1] {
                    assert_eq!(p.findclose(q).unwrap(), m[q], "close of {q}");
                } else {
                    assert_eq!(p.findopen(q).unwrap(), m[q], "open of {q}");
                }
            }
            let exc: Vec<i64> = (0..=bits.len()).map(|i| p.excess_at(i)).collect();
            let mut x = seed;
            for _ in 0..2000 {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1);
                let a = 1 + (x >> 33) as usize % bits.len();
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1);
                let b = a + (x >> 33) as usize % (bits.len() - a + 1);
                let want = (a..=b).min_by_key(|&q| (exc[q], q)).unwrap();
                assert_eq!(p.min_excess_pos(a, b).unwrap(), want, "[{a},{b}]");
                for d in [-3i64, -1, 0, 1, 2] {
                    let fw = (a + 1..=bits.len()).find(|&q| exc[q] == exc[a] + d);
                    assert_eq!(p.fwd_search(a, d), fw, "fwd {a} {d}");
                    let bw = (0..a).rev().find(|&q| exc[q] == exc[a] + d);
                    assert_eq!(p.bwd_search(a, d), bw, "bwd {a} {d}");
                }
            }
        }
    }
}
