//! Construction of the 2d-Min and 2d-Max heaps and their compact streams.
//!
//! In the min heap the parent of position `i` is `PSV(i)` and node labels
//! equal array positions; the max heap uses `PLV(i)`. Both are produced by
//! one right-to-left stack pass that pops strictly larger (min side) or
//! strictly smaller (max side) elements.
//!
//! For an array without equal neighbours exactly one stack pops when an
//! element is pushed, so the two DFUDS sequences share one stream `T` of
//! pop counts plus a direction bit per element in `U`. Equal neighbours are
//! removed first (`A'` and the bitmap `C`); `T'` then carries the pop counts
//! measured on the full array.

use crate::bitseq::{BitBuf, BitSeq, StorageMode};
use crate::error::{Error, Result};
use crate::query::Side;

#[inline]
fn pops(side: Side, top: i64, new: i64) -> bool {
    match side {
        Side::Min => top > new,
        Side::Max => top < new,
    }
}

/// Number of children of every node (index 0 is the root) on `side`.
pub fn degrees(a: &[i64], side: Side) -> Vec<u32> {
    let n = a.len();
    let mut deg = vec![0u32; n + 1];
    let mut stack: Vec<i64> = Vec::with_capacity(n);
    for i in (1..=n).rev() {
        let mut c = 0;
        while let Some(&top) = stack.last() {
            if !pops(side, top, a[i - 1]) {
                break;
            }
            stack.pop();
            c += 1;
        }
        deg[i] = c;
        stack.push(a[i - 1]);
    }
    deg[0] = stack.len() as u32;
    deg
}

fn dfuds_from_degrees(deg: &[u32]) -> BitSeq {
    let mut b = BitBuf::with_capacity(2 * deg.len());
    b.push(true);
    for &d in deg {
        b.push_run(true, d as usize);
        b.push(false);
    }
    b.finish(StorageMode::Plain)
}

/// DFUDS of the 2d-Min heap of `a` (`2(n+1)` bits).
pub fn build_min_dfuds(a: &[i64]) -> BitSeq {
    dfuds_from_degrees(&degrees(a, Side::Min))
}

/// DFUDS of the 2d-Max heap of `a`.
pub fn build_max_dfuds(a: &[i64]) -> BitSeq {
    dfuds_from_degrees(&degrees(a, Side::Max))
}

pub fn build_dfuds(a: &[i64], side: Side) -> BitSeq {
    dfuds_from_degrees(&degrees(a, side))
}

/// Color bits: a leading `1`, then for every node in preorder its children
/// other than the leftmost, right to left; `0` (red) when the child is
/// strictly beyond its left sibling (smaller on the min side).
pub fn build_colors(a: &[i64], side: Side) -> BitSeq {
    let n = a.len();
    let deg = degrees(a, side);
    // parent of each position via the same stack pass, left to right
    let mut parent = vec![0usize; n + 1];
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    for i in 1..=n {
        while let Some(&top) = stack.last() {
            // pop until top is strictly beyond a[i] in the heap order
            let strictly = match side {
                Side::Min => a[top - 1] < a[i - 1],
                Side::Max => a[top - 1] > a[i - 1],
            };
            if strictly {
                break;
            }
            stack.pop();
        }
        parent[i] = stack.last().copied().unwrap_or(0);
        stack.push(i);
    }
    let mut start = vec![0usize; n + 2];
    for p in 0..=n {
        start[p + 1] = start[p] + deg[p] as usize;
    }
    let mut fill = start.clone();
    let mut kids = vec![0usize; n];
    for i in 1..=n {
        let p = parent[i];
        kids[fill[p]] = i;
        fill[p] += 1;
    }
    let mut b = BitBuf::with_capacity(n + 1);
    b.push(true);
    for p in 0..=n {
        let ch = &kids[start[p]..start[p + 1]];
        for w in (1..ch.len()).rev() {
            let (left, x) = (a[ch[w - 1] - 1], a[ch[w] - 1]);
            let red = match side {
                Side::Min => x < left,
                Side::Max => x > left,
            };
            b.push(!red);
        }
    }
    b.finish(StorageMode::Plain)
}

/// `A'` (first element of every run of equal neighbours) and the run bitmap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dedup {
    pub a_prime: Vec<i64>,
    /// `C[1] = 0`; `C[i] = 1` iff `A[i-1] = A[i]`.
    pub c_bits: BitSeq,
    pub k: usize,
}

pub fn dedup(a: &[i64]) -> Dedup {
    let mut a_prime = Vec::with_capacity(a.len());
    let mut c = BitBuf::with_capacity(a.len());
    for (i, &x) in a.iter().enumerate() {
        let dup = i > 0 && a[i - 1] == x;
        c.push(dup);
        if !dup {
            a_prime.push(x);
        }
    }
    let k = a.len() - a_prime.len();
    Dedup { a_prime, c_bits: c.finish(StorageMode::Plain), k }
}

/// The shared pop stream of both heaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuEncoding {
    /// One group `(^(pops-1) )` per element but the last, then a final `)`.
    pub t_bits: BitSeq,
    /// `0` when the min stack popped, `1` when the max stack popped.
    pub u_bits: BitSeq,
    pub root_min_count: usize,
    pub root_max_count: usize,
}

/// Pop counts of both stacks for each pushed element of `a`, and the final
/// stack sizes.
fn stack_pops(a: &[i64]) -> (Vec<u32>, Vec<u32>, usize, usize) {
    let dmin = degrees(a, Side::Min);
    let dmax = degrees(a, Side::Max);
    let (rmin, rmax) = (dmin[0] as usize, dmax[0] as usize);
    (dmin, dmax, rmin, rmax)
}

/// `T` and `U` of an array without equal neighbours.
pub fn build_tu(a: &[i64]) -> Result<TuEncoding> {
    if let Some(i) = a.windows(2).position(|w| w[0] == w[1]) {
        return Err(Error::ConsecutiveEqual(i + 1));
    }
    let n = a.len();
    let (dmin, dmax, rmin, rmax) = stack_pops(a);
    let mut t = BitBuf::with_capacity(2 * n);
    let mut u = BitBuf::with_capacity(n);
    for i in 1..n {
        let min_side = a[i - 1] < a[i];
        let cnt = if min_side { dmin[i] } else { dmax[i] } as usize;
        debug_assert!(cnt >= 1);
        t.push_run(true, cnt - 1);
        t.push(false);
        u.push(!min_side);
    }
    if n > 0 {
        t.push(false);
    }
    Ok(TuEncoding {
        t_bits: t.finish(StorageMode::Plain),
        u_bits: u.finish(StorageMode::Plain),
        root_min_count: rmin,
        root_max_count: rmax,
    })
}

/// DFUDS of one side rebuilt from `T`, `U` and that side's root count.
pub fn dfuds_from_tu(t: &BitSeq, u: &BitSeq, root_count: usize, side: Side) -> BitSeq {
    let want = side == Side::Max;
    let mut b = BitBuf::with_capacity(t.len() + u.len() + root_count + 4);
    b.push_run(true, root_count + 1);
    b.push(false);
    let mut g = 0usize;
    let mut opens = 0usize;
    for bit in t.iter() {
        if bit {
            opens += 1;
            continue;
        }
        if g < u.len() && u.get(g + 1) == want {
            b.push_run(true, opens + 1);
        }
        b.push(false);
        opens = 0;
        g += 1;
    }
    b.finish(StorageMode::Plain)
}

/// `T'`, `U'` and the run bitmap of an array that may contain equal
/// neighbours, plus the final stack sizes of the full array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuPrime {
    pub t_prime: BitSeq,
    pub u_prime: BitSeq,
    pub dedup: Dedup,
    pub root_min_count: usize,
    pub root_max_count: usize,
}

pub fn build_tpup(a: &[i64]) -> TuPrime {
    let n = a.len();
    let d = dedup(a);
    let (dmin, dmax, rmin, rmax) = stack_pops(a);
    let mut t = BitBuf::with_capacity(2 * n);
    let mut u = BitBuf::with_capacity(n);
    // run-last positions carry the groups
    for e in 1..n {
        if a[e - 1] == a[e] {
            continue;
        }
        let min_side = a[e - 1] < a[e];
        let cnt = if min_side { dmin[e] } else { dmax[e] } as usize;
        t.push_run(true, cnt - 1);
        t.push(false);
        u.push(!min_side);
    }
    if n > 0 {
        t.push(false);
    }
    TuPrime {
        t_prime: t.finish(StorageMode::Plain),
        u_prime: u.finish(StorageMode::Plain),
        dedup: d,
        root_min_count: rmin,
        root_max_count: rmax,
    }
}

/// `D'` of one side: the root group, then one group per run of `A` taken
/// from `T'`/`U'` (bare `)` when the other side popped).
pub fn dprime_from_tpup(t_prime: &BitSeq, u_prime: &BitSeq, root_count: usize, side: Side) -> BitSeq {
    dfuds_from_tu(t_prime, u_prime, root_count, side)
}

pub fn build_dprime(a: &[i64], side: Side) -> BitSeq {
    let tp = build_tpup(a);
    let r = match side {
        Side::Min => tp.root_min_count,
        Side::Max => tp.root_max_count,
    };
    dprime_from_tpup(&tp.t_prime, &tp.u_prime, r, side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_tree;

    const SAMPLE_ARRAY: [i64; 12] = [2, 5, 3, 4, 4, 4, 2, 1, 1, 2, 4, 3];

    fn all_arrays(max_len: usize, alphabet: i64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        for len in 1..=max_len {
            let total = (alphabet as usize).pow(len as u32);
            for mut code in 0..total {
                let mut a = Vec::with_capacity(len);
                for _ in 0..len {
                    a.push(1 + (code % alphabet as usize) as i64);
                    code /= alphabet as usize;
                }
                out.push(a);
            }
        }
        out
    }

    /// Direct evaluation of the left-anchored expansion recurrence.
    fn f_naive(s: &str, c: &[bool]) -> String {
        let groups: Vec<&str> = s.split_inclusive(')').collect();
        let mut out = String::new();
        let mut g = 0;
        for &bit in c {
            if g >= groups.len() {
                return out;
            }
            if bit {
                out.push(')');
            } else {
                out.push_str(groups[g]);
                g += 1;
            }
        }
        for rest in &groups[g..] {
            out.push_str(rest);
        }
        out
    }

    #[test]
    fn small_dfuds() {
        assert_eq!(build_min_dfuds(&[1]).to_paren_string(), "(())");
        assert_eq!(build_max_dfuds(&[1]).to_paren_string(), "(())");
        assert_eq!(build_min_dfuds(&SAMPLE_ARRAY).to_paren_string(), "((((()(())((())))))()(()))");
        assert_eq!(build_colors(&SAMPLE_ARRAY, Side::Min).to_bit_string(), "11010110");
        let dec: Vec<i64> = (1..=5).rev().collect();
        let inc: Vec<i64> = (1..=5).collect();
        // a chain has no non-leftmost children
        assert_eq!(build_colors(&inc, Side::Min).to_bit_string(), "1");
        assert_eq!(build_colors(&dec, Side::Max).to_bit_string(), "1");
        // all positions hang off the root, each smaller than its left sibling
        assert_eq!(build_colors(&dec, Side::Min).to_bit_string(), "10000");
    }

    #[test]
    fn tu_examples() {
        let e = build_tu(&[1, 2]).unwrap();
        assert_eq!(e.t_bits.to_paren_string(), "))");
        assert_eq!(e.u_bits.to_bit_string(), "0");
        assert_eq!((e.root_min_count, e.root_max_count), (1, 2));
        let e = build_tu(&[2, 1]).unwrap();
        assert_eq!(e.t_bits.to_paren_string(), "))");
        assert_eq!(e.u_bits.to_bit_string(), "1");
        assert_eq!((e.root_min_count, e.root_max_count), (2, 1));
        assert_eq!(build_tu(&[1, 1]), Err(Error::ConsecutiveEqual(1)));
    }

    #[test]
    fn dedup_examples() {
        let d = dedup(&[5, 5, 5]);
        assert_eq!((d.k, d.c_bits.to_bit_string(), d.a_prime.clone()), (2, "011".to_string(), vec![5]));
        let d = dedup(&[1, 2, 3]);
        assert_eq!((d.k, d.c_bits.to_bit_string()), (0, "000".to_string()));
        let d = dedup(&[3, 1, 1, 2]);
        assert_eq!(build_dprime(&[3, 1, 1, 2], Side::Min).count_zeros(), 1 + 3);
        assert_eq!(d.k, 1);
    }

    #[test]
    fn exhaustive_against_oracle() {
        for a in all_arrays(7, 3) {
            let n = a.len();
            for side in [Side::Min, Side::Max] {
                let t = oracle_tree(&a, side);
                assert_eq!(build_dfuds(&a, side).to_paren_string(), t.dfuds_string(), "{a:?} {side:?}");
                let v = build_colors(&a, side);
                assert_eq!(v.to_bit_string(), t.color_string(), "{a:?}");
                assert_eq!(v.len(), n - t.leftmost_children() + 1);
            }
            // negation swaps the heaps
            let neg: Vec<i64> = a.iter().map(|x| -x).collect();
            assert_eq!(build_max_dfuds(&a), build_min_dfuds(&neg));
            let tp = build_tpup(&a);
            let d = &tp.dedup;
            let mut c = d.c_bits.to_bools();
            c.push(false);
            for side in [Side::Min, Side::Max] {
                let dp = build_dprime(&a, side).to_paren_string();
                assert_eq!(f_naive(&dp, &c), build_dfuds(&a, side).to_paren_string(), "{a:?} {side:?}");
            }
            // total sizes
            let r = tp.root_min_count + tp.root_max_count;
            assert_eq!(tp.t_prime.len() + 1, 2 * n - r + 2, "{a:?}");
            assert_eq!(tp.u_prime.len(), n - d.k - 1);
            let vsum = build_colors(&a, Side::Min).len() + build_colors(&a, Side::Max).len();
            assert_eq!(vsum, n + d.k + 1, "{a:?}");
            if d.k == 0 {
                let e = build_tu(&a).unwrap();
                assert_eq!(e.t_bits, tp.t_prime);
                assert_eq!(e.t_bits.count_zeros(), n);
                assert!(e.t_bits.len() <= 2 * n);
                for side in [Side::Min, Side::Max] {
                    let r = if side == Side::Min { e.root_min_count } else { e.root_max_count };
                    assert_eq!(dfuds_from_tu(&e.t_bits, &e.u_bits, r, side), build_dfuds(&a, side));
                }
            }
        }
    }
}
