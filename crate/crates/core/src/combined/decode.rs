//! Decoding fixed-width blocks of the DFUDS sequences from `T'`, `U'` and `C`.
//!
//! `D` is `f(D', C·0)`. A position of `D` either copies a bit of `D'` or is
//! one of the extra closes a `1` of `C` inserts. Block `i` covers
//! `D[(i-1)w+1 ..= iw]`. `R[i]` marks blocks made only of extra closes.
//! Otherwise the first copied position lies `k_i` bits into the block
//! (`Q[i]` set when `k_i > 0`) and its `D'` position is the block position
//! minus a deficit, the number of extra closes before it. Deficits never
//! decrease, so they are stored in unary.
//!
//! `D'` itself is read from `T'` and `U'`: every superblock of
//! `SUPERBLOCK_BLOCKS` `w`-bit blocks of `D'` has a mark holding the `T'`
//! position of its first bit (with a flag for the one open of each group
//! that `T'` does not store), and the decoder walks forward from it.
//! Superblocks whose marks lie more than `BAD_SPAN_FACTOR` superblock
//! lengths apart in `T'` are stored verbatim.

use crate::bitseq::{BitBuf, BitSeq, PackedInts, SparseSet, StorageMode};
use crate::error::{format_err, Error, Result};
use crate::query::Side;

use super::expand::{shared_tables, ExpandTables};

pub const SUPERBLOCK_BLOCKS: usize = 16;
pub const BAD_SPAN_FACTOR: usize = 16;

/// `max(2, ceil(lg n))`.
pub fn block_width(n: usize) -> usize {
    let lg = if n <= 1 { 0 } else { (usize::BITS - (n - 1).leading_zeros()) as usize };
    lg.max(2)
}

/// The stored payload the decoder reads.
#[derive(Clone, Copy)]
pub(crate) struct Payload<'a> {
    pub t: &'a BitSeq,
    pub u: &'a BitSeq,
    pub c: &'a BitSeq,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct SideAux {
    side: Side,
    root: usize,
    dprime_len: usize,
    q: BitSeq,
    r: BitSeq,
    ki: PackedInts,
    deficits: BitSeq,
    marks: SparseSet,
    lead: BitSeq,
    bad: SparseSet,
    bad_bits: BitSeq,
}

/// Block-decoding structures of both heaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeAux {
    w: usize,
    d_len: usize,
    min: SideAux,
    max: SideAux,
}

/// Counts of each side's structures, for the space report.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AuxSizes {
    pub pqr_bits: u64,
    pub ki_bits: u64,
    pub mark_bits: u64,
    pub bad_block_bits: u64,
    pub bad_blocks: u64,
}

/// What building the auxiliary structures learns about the payload.
pub(crate) struct Built {
    pub aux: DecodeAux,
    pub d_min: BitSeq,
    pub d_max: BitSeq,
}

/// `D'` of one side, the mark of every superblock and the full `D`.
struct SideBuild {
    dprime: Vec<bool>,
    marks: Vec<u64>,
    lead: Vec<bool>,
    spans_end: u64,
}

/// Opens in `D'` of one side other than those of the root group.
fn side_opens(t: &BitSeq, u: &BitSeq, want: bool) -> usize {
    let mut total = 0;
    let mut start = 1;
    for j in 0..t.count_zeros() {
        let close = t.select0(j + 1).expect("group close");
        if j < u.len() && u.get(j + 1) == want {
            total += close - start + 1;
        }
        start = close + 1;
    }
    total
}

/// Root counts implied by `T'`/`U'` for an array of length `n`, checking
/// that each side's `D'` has exactly `n + 1` opens.
pub(crate) fn derive_roots(t: &BitSeq, u: &BitSeq, n: usize) -> Result<(usize, usize)> {
    let mut roots = [0usize; 2];
    for (slot, want) in roots.iter_mut().zip([false, true]) {
        let opens = side_opens(t, u, want);
        *slot = n
            .checked_sub(opens)
            .ok_or_else(|| format_err(format!("groups hold {opens} opens, more than n = {n}")))?;
    }
    Ok((roots[0], roots[1]))
}

fn build_side(t: &BitSeq, u: &BitSeq, root: usize, side: Side, sb_bits: usize) -> SideBuild {
    let want = side == Side::Max;
    let mut dprime = Vec::with_capacity(t.len() + root + 2);
    let mut marks = Vec::new();
    let mut lead = Vec::new();
    let mut push = |dprime: &mut Vec<bool>, bit: bool, tpos: u64, is_lead: bool| {
        if dprime.len().is_multiple_of(sb_bits) {
            marks.push(tpos);
            lead.push(is_lead);
        }
        dprime.push(bit);
    };
    for _ in 0..=root {
        push(&mut dprime, true, 0, false);
    }
    push(&mut dprime, false, 0, false);
    let mut start = 1usize;
    for j in 0..t.count_zeros() {
        let close = t.select0(j + 1).expect("group close");
        if j < u.len() && u.get(j + 1) == want {
            push(&mut dprime, true, start as u64, true);
            for tp in start..close {
                push(&mut dprime, true, tp as u64, false);
            }
        }
        push(&mut dprime, false, close as u64, false);
        start = close + 1;
    }
    SideBuild { dprime, marks, lead, spans_end: t.len() as u64 + 1 }
}

/// `f(D', C·0)` together with, for each position of `D`, the `D'` position it
/// copies (0 for extra closes).
fn expand_with_correspondence(dprime: &[bool], c: &BitSeq, n: usize) -> Result<(Vec<bool>, Vec<u32>)> {
    let mut d = Vec::with_capacity(2 * n + 2);
    let mut corr = Vec::with_capacity(2 * n + 2);
    let mut si = 0usize;
    for ci in 1..=n + 1 {
        if ci <= n && c.get(ci) {
            d.push(false);
            corr.push(0);
            continue;
        }
        loop {
            let Some(&bit) = dprime.get(si) else {
                return Err(format_err("D' has fewer groups than C has zeros"));
            };
            si += 1;
            d.push(bit);
            corr.push(si as u32);
            if !bit {
                break;
            }
        }
    }
    if si != dprime.len() {
        return Err(format_err("D' has more groups than C has zeros"));
    }
    Ok((d, corr))
}

/// Checks `bits` is a DFUDS sequence: an open, then excess positive until
/// the final close brings it to zero.
fn check_dfuds(bits: &[bool]) -> Result<()> {
    let mut e = 0i64;
    for (i, &b) in bits.iter().enumerate() {
        e += if b { 1 } else { -1 };
        if e <= 0 && i + 1 != bits.len() {
            return Err(format_err("expanded sequence is not a tree"));
        }
    }
    if bits.is_empty() || e != 0 {
        return Err(format_err("expanded sequence is unbalanced"));
    }
    Ok(())
}

impl DecodeAux {
    /// Builds both sides' structures from the payload. Fails on payloads that
    /// do not describe a pair of trees.
    pub(crate) fn build(p: Payload<'_>, root_min: usize, root_max: usize) -> Result<Built> {
        let n = p.n;
        let w = block_width(n);
        let sb_bits = w * SUPERBLOCK_BLOCKS;
        let d_len = 2 * n + 2;
        let mut sides = Vec::with_capacity(2);
        let mut ds = Vec::with_capacity(2);
        for (side, root) in [(Side::Min, root_min), (Side::Max, root_max)] {
            let sb = build_side(p.t, p.u, root, side, sb_bits);
            let (d, corr) = expand_with_correspondence(&sb.dprime, p.c, n)?;
            if d.len() != d_len {
                return Err(format_err(format!("expanded sequence has {} bits, want {d_len}", d.len())));
            }
            check_dfuds(&d)?;
            sides.push(side_aux(side, root, w, &sb, &corr)?);
            ds.push(BitSeq::build(&d, StorageMode::Plain));
        }
        let max = sides.pop().expect("two sides");
        let min = sides.pop().expect("two sides");
        let d_max = ds.pop().expect("two sides");
        let d_min = ds.pop().expect("two sides");
        Ok(Built { aux: DecodeAux { w, d_len, min, max }, d_min, d_max })
    }

    pub fn block_width(&self) -> usize {
        self.w
    }

    pub fn block_count(&self) -> usize {
        self.d_len.div_ceil(self.w)
    }

    fn side(&self, side: Side) -> &SideAux {
        match side {
            Side::Min => &self.min,
            Side::Max => &self.max,
        }
    }

    pub fn sizes(&self) -> AuxSizes {
        let mut s = AuxSizes::default();
        for a in [&self.min, &self.max] {
            for b in [&a.q, &a.r, &a.deficits] {
                s.pqr_bits += (b.payload_bits() + b.aux_bits()) as u64;
            }
            s.ki_bits += a.ki.size_bits() as u64;
            s.mark_bits += (a.marks.size_bits() + a.lead.payload_bits() + a.lead.aux_bits()) as u64;
            s.bad_block_bits += (a.bad.size_bits() + a.bad_bits.payload_bits() + a.bad_bits.aux_bits()) as u64;
            s.bad_blocks += a.bad.len() as u64;
        }
        s
    }

    /// Ones in the P (deficit), Q and R strings of `side`.
    pub fn pqr_ones(&self, side: Side) -> (usize, usize, usize) {
        let a = self.side(side);
        (a.deficits.count_zeros(), a.q.count_ones(), a.r.count_ones())
    }

    /// The stored `k_i` values of `side`.
    pub fn ki_values(&self, side: Side) -> Vec<u64> {
        self.side(side).ki.iter().collect()
    }

    /// Block `i` (1-based) of `side`'s DFUDS, first bit lowest; the last
    /// block is padded with zeros.
    pub(crate) fn decode_block(&self, p: Payload<'_>, side: Side, i: usize) -> Result<u64> {
        let blocks = self.block_count();
        if i == 0 || i > blocks {
            return Err(Error::BlockIndex { i, blocks });
        }
        Ok(self.decode_block_with(p, side, i, shared_tables()))
    }

    fn decode_block_with(&self, p: Payload<'_>, side: Side, i: usize, tables: &ExpandTables) -> u64 {
        let a = self.side(side);
        let w = self.w;
        if a.r.get(i) {
            return 0;
        }
        let t = i - a.r.rank1(i);
        let deficit = a.deficits.select0(t).expect("one deficit per block") - t;
        let k = if a.q.get(i) { a.ki.get(a.q.rank1(i) - 1) as usize } else { 0 };
        let x = (i - 1) * w + 1 + k;
        let pos = x - deficit;
        let (s, s_len, closes_before) = self.read_dprime(p, a, pos, w);
        let cidx = closes_before + deficit + 1;
        let (cw, c_len) = c_window(p, cidx, w);
        let (right, _) = tables.f_window(s, s_len, cw, c_len, (w - k) as u32);
        if k == 0 {
            return right;
        }
        let ls = pos.saturating_sub(w).max(1);
        let (sl, sl_len, _) = self.read_dprime(p, a, ls, pos - ls);
        let lc = cidx.saturating_sub(w).max(1);
        let (cl, cl_len) = c_window(p, lc, cidx - lc);
        let (left, left_len) = tables.fprime_window(sl, sl_len, cl, cl_len, k as u32);
        debug_assert_eq!(left_len as usize, k);
        left | right << k
    }

    /// `len <= 64` bits of side `a`'s `D'` from 1-based position `pos`, the
    /// number of bits available, and the number of closes before `pos`.
    fn read_dprime(&self, p: Payload<'_>, a: &SideAux, pos: usize, len: usize) -> (u64, u32, usize) {
        let sb_bits = self.w * SUPERBLOCK_BLOCKS;
        let len = len.min(a.dprime_len + 1 - pos.min(a.dprime_len + 1));
        let mut out = 0u64;
        let mut got = 0usize;
        let mut closes_before = None;
        let mut q = pos;
        while got < len {
            let sbi = (q - 1) / sb_bits;
            let sb_start = sbi * sb_bits + 1;
            let sb_end = (sb_start + sb_bits - 1).min(a.dprime_len);
            let take = (len - got).min(sb_end + 1 - q);
            let bad_rank = a.bad.rank_below(sbi as u64);
            if bad_rank < a.bad.len() && a.bad.get(bad_rank) == sbi as u64 {
                let base = bad_rank * sb_bits;
                let bits = a.bad_bits.bits_at(base + (q - sb_start), take);
                if closes_before.is_none() {
                    let head = q - sb_start;
                    let zeros = head - (a.bad_bits.rank1(base + head) - a.bad_bits.rank1(base));
                    closes_before = Some(self.walker_at(p, a, sbi).g + zeros);
                }
                out |= bits << got;
            } else {
                let mut wk = self.walker_at(p, a, sbi);
                wk.skip(p, q - sb_start);
                if closes_before.is_none() {
                    closes_before = Some(wk.g);
                }
                out |= wk.emit(p, take) << got;
            }
            got += take;
            q += take;
        }
        let closes_before = closes_before.unwrap_or_else(|| {
            // empty read: count from the superblock holding `pos`
            let sbi = (pos.clamp(1, a.dprime_len.max(1)) - 1) / sb_bits;
            let mut wk = self.walker_at(p, a, sbi);
            wk.skip(p, pos - (sbi * sb_bits + 1));
            wk.g
        });
        (out, got as u32, closes_before)
    }

    fn walker_at(&self, p: Payload<'_>, a: &SideAux, sbi: usize) -> Walker {
        let sb_bits = self.w * SUPERBLOCK_BLOCKS;
        let mark = a.marks.get(sbi) as usize;
        let want = a.side == Side::Max;
        if mark == 0 {
            let q0 = sbi * sb_bits + 1;
            return Walker { want, g: 0, opens_left: a.root + 2 - q0, close: 0 };
        }
        let j = p.t.rank0(mark - 1);
        let close = p.t.select0(j + 1).expect("mark inside a group");
        let opens_left = if a.lead.get(sbi + 1) {
            close - mark + 1
        } else {
            close - mark
        };
        Walker { want, g: j + 1, opens_left, close }
    }
}

/// Forward reader of `D'`: sits in group `g` with `opens_left` opens before
/// its close; `close` is the `T'` position of that close (0 for the root).
struct Walker {
    want: bool,
    g: usize,
    opens_left: usize,
    close: usize,
}

impl Walker {
    fn next_group(&mut self, p: Payload<'_>) -> bool {
        let j = self.g;
        if j >= p.t.count_zeros() {
            return false;
        }
        let start = self.close + 1;
        let close = p.t.select0(j + 1).expect("group close");
        self.opens_left = if j < p.u.len() && p.u.get(j + 1) == self.want { close - start + 1 } else { 0 };
        self.close = close;
        self.g = j + 1;
        true
    }

    fn skip(&mut self, p: Payload<'_>, mut n: usize) {
        while n > 0 {
            if n <= self.opens_left {
                self.opens_left -= n;
                return;
            }
            n -= self.opens_left + 1;
            if !self.next_group(p) {
                return;
            }
        }
    }

    fn emit(&mut self, p: Payload<'_>, len: usize) -> u64 {
        let mut out = 0u64;
        let mut got = 0;
        while got < len {
            if self.opens_left > 0 {
                let take = self.opens_left.min(len - got);
                out |= low_ones(take) << got;
                got += take;
                self.opens_left -= take;
                continue;
            }
            got += 1;
            if !self.next_group(p) {
                break;
            }
        }
        out
    }
}

#[inline]
fn low_ones(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Bits `cidx .. cidx + len` of `C·0` (1-based), clipped at its end.
fn c_window(p: Payload<'_>, cidx: usize, len: usize) -> (u64, u32) {
    let avail = (p.n + 2).saturating_sub(cidx).min(len);
    (p.c.bits_at(cidx - 1, avail), avail as u32)
}

fn side_aux(side: Side, root: usize, w: usize, sb: &SideBuild, corr: &[u32]) -> Result<SideAux> {
    let d_len = corr.len();
    let blocks = d_len.div_ceil(w);
    let mut q = BitBuf::with_capacity(blocks);
    let mut r = BitBuf::with_capacity(blocks);
    let mut ki = Vec::new();
    let mut deficits = BitBuf::new();
    let mut prev_def = 0usize;
    for i in 0..blocks {
        let b = i * w;
        let end = (b + w).min(d_len);
        match (b..end).find(|&x| corr[x] != 0) {
            None => {
                q.push(false);
                r.push(true);
            }
            Some(x) => {
                let k = x - b;
                q.push(k > 0);
                r.push(false);
                if k > 0 {
                    ki.push(k as u64);
                }
                let def = x + 1 - corr[x] as usize;
                if def < prev_def {
                    return Err(format_err("deficits decrease"));
                }
                deficits.push_run(true, def - prev_def);
                deficits.push(false);
                prev_def = def;
            }
        }
    }
    let sb_bits = w * SUPERBLOCK_BLOCKS;
    let mut bad = Vec::new();
    let mut bad_bits = BitBuf::new();
    for (s, &m) in sb.marks.iter().enumerate() {
        let next = sb.marks.get(s + 1).copied().unwrap_or(sb.spans_end);
        if (next - m) as usize > BAD_SPAN_FACTOR * sb_bits {
            bad.push(s as u64);
            let lo = s * sb_bits;
            let hi = (lo + sb_bits).min(sb.dprime.len());
            for &bit in &sb.dprime[lo..hi] {
                bad_bits.push(bit);
            }
            bad_bits.push_run(false, sb_bits - (hi - lo));
        }
    }
    let ki_width = PackedInts::width_for(w as u64 - 1);
    Ok(SideAux {
        side,
        root,
        dprime_len: sb.dprime.len(),
        q: q.finish(StorageMode::Compressed),
        r: r.finish(StorageMode::Compressed),
        ki: PackedInts::from_slice(ki_width, &ki),
        deficits: deficits.finish(StorageMode::Compressed),
        marks: SparseSet::from_sorted(&sb.marks, sb.spans_end + 1),
        lead: BitSeq::build(&sb.lead, StorageMode::Compressed),
        bad: SparseSet::from_sorted(&bad, sb.marks.len() as u64 + 1),
        bad_bits: bad_bits.finish(StorageMode::Plain),
    })
}
