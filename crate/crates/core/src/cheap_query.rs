//! Queries answered by one colored heap: a DFUDS tree plus color bits.
//!
//! Children of a node have non-increasing values from left to right (min
//! side). A non-leftmost child is *red* (`0`) when it is strictly smaller
//! than its left sibling and *blue* (`1`) when equal. Colors are indexed by
//! the `((` occurrences of the DFUDS sequence: index 0 is a sentinel `1`,
//! siblings occupy consecutive indices from right to left, and the leftmost
//! child has none.
//!
//! Everything below is written for the min side; the max side runs the
//! same code on the 2d-Max heap.

use crate::bitseq::{BitSeq, Pattern, StorageMode};
use crate::dfuds::DfudsTree;
use crate::error::{Error, Result};
use crate::heap_build::{build_colors, build_dfuds};
use crate::query::{QueryKind, QuerySpec, Side};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeapEncoding {
    tree: DfudsTree,
    v: Option<BitSeq>,
    side: Side,
}

impl HeapEncoding {
    /// Builds the heap of `a` on `side`, with colors when `colors` is set.
    pub fn build(a: &[i64], side: Side, colors: bool) -> Self {
        let d = build_dfuds(a, side);
        let v = colors.then(|| build_colors(a, side));
        Self::from_parts(d, v, side).expect("built sequences are well formed")
    }

    /// Wraps a DFUDS sequence and optional color bits.
    pub fn from_parts(dfuds: BitSeq, v: Option<BitSeq>, side: Side) -> Result<Self> {
        let dfuds = if dfuds.mode() == StorageMode::Plain {
            dfuds
        } else {
            BitSeq::from_words(dfuds.to_words(), dfuds.len(), StorageMode::Plain)
        };
        let tree = DfudsTree::new(dfuds.with_pattern(Pattern::OPEN_OPEN))?;
        if let Some(v) = &v {
            let want = tree.bits().rank_pattern(tree.bits().len(), Pattern::OPEN_OPEN);
            if v.len() != want {
                return Err(Error::Format(format!("color string has {} bits, tree needs {want}", v.len())));
            }
        }
        Ok(HeapEncoding { tree, v, side })
    }

    pub fn tree(&self) -> &DfudsTree {
        &self.tree
    }

    pub fn colors(&self) -> Option<&BitSeq> {
        self.v.as_ref()
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Array length (nodes minus the root).
    pub fn n(&self) -> usize {
        self.tree.node_count() - 1
    }

    fn check_pos(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n() {
            return Err(Error::OutOfRange { pos: i, len: self.n() });
        }
        Ok(())
    }

    fn check_range(&self, i: usize, j: usize) -> Result<()> {
        if i == 0 || i > j {
            return Err(Error::EmptyRange { i, j });
        }
        if j > self.n() {
            return Err(Error::OutOfRange { pos: j, len: self.n() });
        }
        Ok(())
    }

    fn v(&self) -> Result<&BitSeq> {
        self.v.as_ref().ok_or_else(|| Error::InvalidQuery("heap has no color bits".into()))
    }

    /// Index in V of `x`'s color; `None` for the root and leftmost children.
    pub fn node_color_index(&self, x: usize) -> Result<Option<usize>> {
        if x > self.n() {
            return Err(Error::LabelOutOfRange { x, nodes: self.tree.node_count() });
        }
        Ok(self.color_index_of(x))
    }

    /// Node whose color sits at index `v` of V.
    pub fn node_of_color_index(&self, v: usize) -> Result<usize> {
        let total = self.tree.bits().rank_pattern(self.tree.bits().len(), Pattern::OPEN_OPEN);
        if v == 0 || v >= total {
            return Err(Error::OutOfRange { pos: v, len: total.saturating_sub(1) });
        }
        Ok(self.node_of_index(v))
    }

    #[inline]
    fn color_index_of(&self, x: usize) -> Option<usize> {
        if x == 0 || self.tree.child_rank_of(x) == 0 {
            return None;
        }
        let o = self.tree.incoming_open(x);
        Some(self.tree.bits().rank_pattern(o + 1, Pattern::OPEN_OPEN) - 1)
    }

    #[inline]
    fn node_of_index(&self, v: usize) -> usize {
        let bits = self.tree.bits();
        let start = bits.select_pattern(v + 1, Pattern::OPEN_OPEN).expect("index in range");
        self.tree.pre_rank_of(self.tree.paren_seq().close_of(start) + 1)
    }

    #[inline]
    fn is_red(&self, v: &BitSeq, idx: usize) -> bool {
        !v.get(idx + 1)
    }

    /// Parent in the heap: PSV on the min side, PLV on the max side.
    pub fn psv(&self, i: usize) -> Result<usize> {
        self.check_pos(i)?;
        Ok(self.tree.parent_of(i))
    }

    /// Next strictly smaller (larger on the max side) position or `n + 1`.
    pub fn nsv(&self, i: usize) -> Result<usize> {
        self.check_pos(i)?;
        let v = self.v()?;
        Ok(self.nsv_of(v, i))
    }

    /// Rightmost position of the range minimum.
    pub fn rrminq(&self, i: usize, j: usize) -> Result<usize> {
        self.check_range(i, j)?;
        Ok(self.rr_of(i, j))
    }

    /// Leftmost position of the range minimum.
    pub fn rlminq(&self, i: usize, j: usize) -> Result<usize> {
        self.check_range(i, j)?;
        let v = self.v()?;
        Ok(self.rl_of(v, i, self.rr_of(i, j)))
    }

    /// `k`-th position (from the left) attaining the range minimum.
    pub fn rkminq(&self, i: usize, j: usize, k: usize) -> Result<Option<usize>> {
        self.check_range(i, j)?;
        if k == 0 {
            return Err(Error::InvalidQuery("k must be at least 1".into()));
        }
        let v = self.v()?;
        let r = self.rr_of(i, j);
        let l = self.rl_of(v, i, r);
        let (cl, cr) = (self.tree.child_rank_of(l), self.tree.child_rank_of(r));
        if cr - cl < k - 1 {
            return Ok(None);
        }
        if k == 1 {
            return Ok(Some(l));
        }
        Ok(Some(self.tree.child_of(self.tree.parent_of(r), cl + k)))
    }

    #[inline]
    fn rr_of(&self, i: usize, j: usize) -> usize {
        if i == j {
            return i;
        }
        let bits = self.tree.bits();
        let lo = bits.select0(i).expect("label");
        let hi = bits.select0(j).expect("label");
        bits.rank0(self.tree.paren_seq().min_excess(lo, hi).1)
    }

    fn rl_of(&self, v: &BitSeq, i: usize, r: usize) -> usize {
        let Some(idx) = self.color_index_of(r) else {
            return r;
        };
        if self.is_red(v, idx) {
            return r;
        }
        let leftmost = self.leftmost_in_range(i, r);
        // nearest red sibling left of r: the first zero above idx in V
        let zeros = v.rank0(idx + 1);
        let cr = self.tree.child_rank_of(r);
        let red_sibling = v.select0(zeros + 1).map(|p| p - 1).filter(|&z| z < idx + cr);
        match red_sibling {
            Some(z) => self.node_of_index(z).max(leftmost),
            None => leftmost,
        }
    }

    /// First sibling of `r` whose subtree reaches position `i` or later.
    fn leftmost_in_range(&self, i: usize, r: usize) -> usize {
        let dr = self.tree.depth_of(r);
        if self.tree.depth_of(i) == dr {
            return i;
        }
        let a = self.tree.level_anc_of(i, dr);
        self.tree.next_sibling_of(a).expect("r is a later sibling")
    }

    fn nsv_of(&self, v: &BitSeq, i: usize) -> usize {
        let n = self.n();
        let p = self.tree.parent_of(i);
        if let Some(s) = self.tree.next_sibling_of(i) {
            let idx = self.color_index_of(s).expect("non-leftmost sibling");
            let zeros = v.rank0(idx + 1);
            if zeros > 0 {
                let z = v.select0(zeros).expect("zero") - 1;
                let deg = self.tree.degree_of(p);
                let right_end = idx - (deg - 1 - self.tree.child_rank_of(s));
                if z >= right_end {
                    return self.node_of_index(z);
                }
            }
        }
        let last = if p == 0 && self.tree.degree_of(0) == 0 {
            i
        } else {
            self.tree.child_of(p, self.tree.degree_of(p))
        };
        (last + self.tree.subtree_size_of(last)).min(n + 1)
    }

    /// Answers a query of this heap's side.
    pub fn answer(&self, q: &QuerySpec) -> Result<Option<usize>> {
        q.validate(self.n())?;
        if q.kind.side() != self.side {
            return Err(Error::InvalidQuery(format!("{} asked of the {:?} heap", q.kind, self.side)));
        }
        Ok(match q.kind {
            QueryKind::RMinQ | QueryKind::RRMinQ | QueryKind::RMaxQ | QueryKind::RRMaxQ => {
                Some(self.rr_of(q.i, q.j))
            }
            QueryKind::RLMinQ | QueryKind::RLMaxQ => Some(self.rlminq(q.i, q.j)?),
            QueryKind::RkMinQ | QueryKind::RkMaxQ => self.rkminq(q.i, q.j, q.k)?,
            QueryKind::Psv | QueryKind::Plv => Some(self.tree.parent_of(q.i)),
            QueryKind::Nsv | QueryKind::Nlv => Some(self.nsv(q.i)?),
        })
    }

    /// Bits of the DFUDS sequence plus V.
    pub fn payload_bits(&self) -> usize {
        self.tree.bits().len() + self.v.as_ref().map_or(0, |v| v.len())
    }

    /// Everything held in memory: both sequences and all their indexes.
    pub fn size_bits(&self) -> usize {
        self.payload_bits()
            + self.tree.bits().aux_bits()
            + self.tree.aux_bits()
            + self.v.as_ref().map_or(0, |v| v.aux_bits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_answer;

    const SAMPLE_ARRAY: [i64; 12] = [2, 5, 3, 4, 4, 4, 2, 1, 1, 2, 4, 3];

    pub(crate) fn all_arrays(max_len: usize, alphabet: usize) -> impl Iterator<Item = Vec<i64>> {
        (1..=max_len).flat_map(move |len| {
            (0..alphabet.pow(len as u32)).map(move |mut code| {
                (0..len)
                    .map(|_| {
                        let d = code % alphabet;
                        code /= alphabet;
                        1 + d as i64
                    })
                    .collect()
            })
        })
    }

    #[test]
    fn sample_color_indices() {
        let h = HeapEncoding::build(&SAMPLE_ARRAY, Side::Min, true);
        assert_eq!(h.colors().unwrap().to_bit_string(), "11010110");
        assert_eq!(h.node_color_index(3).unwrap(), Some(4));
        assert_eq!(h.node_color_index(9).unwrap(), Some(1));
        assert_eq!(h.node_color_index(12).unwrap(), Some(7));
        assert_eq!(h.node_color_index(1).unwrap(), None);
        assert_eq!(h.node_color_index(0).unwrap(), None);
        let row: Vec<usize> = (1..=7).map(|v| h.node_of_color_index(v).unwrap()).collect();
        assert_eq!(row, [9, 8, 7, 3, 6, 5, 12]);
        assert!(h.node_of_color_index(8).is_err());
        assert_eq!(h.rlminq(1, 12).unwrap(), 8);
        assert_eq!(h.rrminq(1, 12).unwrap(), 9);
        assert_eq!(h.rkminq(1, 12, 2).unwrap(), Some(9));
        assert_eq!(h.rkminq(1, 12, 3).unwrap(), None);
    }

    #[test]
    fn uncolored_heap_rejects_color_queries() {
        let h = HeapEncoding::build(&[2, 1, 1, 2], Side::Min, false);
        assert!(h.rlminq(1, 4).is_err());
        assert_eq!(h.rrminq(1, 4).unwrap(), 3);
        assert_eq!(h.psv(4).unwrap(), 3);
    }

    #[test]
    fn exhaustive_against_oracle() {
        for a in all_arrays(7, 3) {
            let n = a.len();
            let heaps = [HeapEncoding::build(&a, Side::Min, true), HeapEncoding::build(&a, Side::Max, true)];
            for q in QuerySpec::enumerate(n, n + 1) {
                let h = &heaps[(q.kind.side() == Side::Max) as usize];
                let want = oracle_answer(&a, &q).unwrap();
                assert_eq!(h.answer(&q).unwrap(), want, "{a:?} {q}");
            }
        }
    }

    #[test]
    fn random_larger_arrays() {
        let mut x = 12345u64;
        for round in 0..40 {
            let n = 50 + round * 37;
            let alphabet = [2, 5, 50, 1000][round % 4];
            let a: Vec<i64> = (0..n)
                .map(|_| {
                    x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((x >> 33) % alphabet) as i64
                })
                .collect();
            let heaps = [HeapEncoding::build(&a, Side::Min, true), HeapEncoding::build(&a, Side::Max, true)];
            for _ in 0..500 {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let i = 1 + (x >> 33) as usize % n;
                let j = i + (x >> 13) as usize % (n - i + 1);
                let k = 1 + (x >> 5) as usize % 4;
                let kind = QueryKind::ALL[(x >> 50) as usize % 12];
                let q = if kind.is_kth() {
                    QuerySpec::kth(kind, i, j, k)
                } else if kind.is_range() {
                    QuerySpec::range(kind, i, j)
                } else {
                    QuerySpec::point(kind, i)
                };
                let h = &heaps[(kind.side() == Side::Max) as usize];
                assert_eq!(h.answer(&q).unwrap(), oracle_answer(&a, &q).unwrap(), "{q}");
            }
        }
    }
}
