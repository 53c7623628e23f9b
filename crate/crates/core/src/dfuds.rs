//! Ordinal trees in depth-first unary degree sequence (DFUDS) form.
//!
//! Node `x` (its preorder rank, root 0) owns the segment of the sequence that
//! starts right after the `x`-th close: `deg(x)` opens followed by one close.
//! The whole sequence carries one extra leading open, so the root's segment
//! starts at position 1 and every node is preceded by the open that its
//! parent spent on it. The `i`-th child of `x` is matched by the `i`-th open
//! of `x`'s segment counted from the right.
//!
//! Depths are sampled on every 8th level; sampled nodes keep binary-lifting
//! jumps to sampled ancestors for level-ancestor queries.

use crate::bitseq::{BitSeq, PackedInts, StorageMode};
use crate::bp::ParenSeq;
use crate::error::{Error, Result};

const SAMPLE: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DfudsTree {
    ps: ParenSeq,
    nodes: usize,
    sampled: BitSeq,
    sample_level: PackedInts,
    /// `up[j][s]`: sampled index of the sampled ancestor `2^j` sample levels up.
    up: Vec<PackedInts>,
}

impl DfudsTree {
    /// Validates that `bits` is a DFUDS sequence and indexes it.
    pub fn new(bits: BitSeq) -> Result<Self> {
        let ps = ParenSeq::new(bits)?;
        let n = ps.len();
        if n < 2 || !ps.is_open(1) {
            return Err(Error::Unbalanced);
        }
        if n > 2 && ps.min_excess(1, n - 1).0 <= 0 {
            return Err(Error::Unbalanced);
        }
        Ok(Self::index(ps))
    }

    fn index(ps: ParenSeq) -> Self {
        let nodes = ps.len() / 2;
        // Preorder walk over degrees to get depths.
        let mut depth = vec![0u32; nodes];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let bits = ps.bits();
        let mut pos = 2usize;
        let degree_of = |pos: &mut usize| {
            let mut d = 0;
            while bits.get(*pos) {
                d += 1;
                *pos += 1;
            }
            *pos += 1;
            d
        };
        let d0 = degree_of(&mut pos);
        if d0 > 0 {
            stack.push((0, d0));
        }
        for x in 1..nodes {
            let top = stack.last_mut().expect("well-formed tree");
            let p = top.0;
            top.1 -= 1;
            if top.1 == 0 {
                stack.pop();
            }
            depth[x] = depth[p] + 1;
            let d = degree_of(&mut pos);
            if d > 0 {
                stack.push((x, d));
            }
        }
        let sampled = BitSeq::from_iter_bits(
            depth.iter().map(|&d| (d as usize).is_multiple_of(SAMPLE)),
            StorageMode::Plain,
        );
        let levels: Vec<u64> =
            depth.iter().filter(|&&d| (d as usize).is_multiple_of(SAMPLE)).map(|&d| (d as usize / SAMPLE) as u64).collect();
        let max_level = levels.iter().copied().max().unwrap_or(0);
        let sample_level = PackedInts::from_slice(PackedInts::width_for(max_level), &levels);
        let mut tree = DfudsTree { ps, nodes, sampled, sample_level, up: Vec::new() };
        // up[0]: sampled ancestor one sample level above (root maps to itself).
        let count = levels.len();
        let width = PackedInts::width_for(count.saturating_sub(1) as u64);
        let mut first = Vec::with_capacity(count);
        for x in 0..nodes {
            if !(depth[x] as usize).is_multiple_of(SAMPLE) {
                continue;
            }
            let mut y = x;
            if x != 0 {
                for _ in 0..SAMPLE {
                    y = tree.parent_of(y);
                }
            }
            first.push((tree.sampled.rank1(y + 1) - 1) as u64);
        }
        let mut up = vec![PackedInts::from_slice(width, &first)];
        let mut span = 1u64;
        while span < max_level {
            let prev = up.last().expect("level");
            let next: Vec<u64> = (0..count).map(|s| prev.get(prev.get(s) as usize)).collect();
            up.push(PackedInts::from_slice(width, &next));
            span *= 2;
        }
        tree.up = up;
        tree
    }

    pub fn paren_seq(&self) -> &ParenSeq {
        &self.ps
    }

    pub fn bits(&self) -> &BitSeq {
        self.ps.bits()
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    /// Bits of the depth samples and jump tables.
    pub fn aux_bits(&self) -> usize {
        self.ps.aux_bits()
            + self.sampled.len()
            + self.sampled.aux_bits()
            + self.sample_level.size_bits()
            + self.up.iter().map(|u| u.size_bits()).sum::<usize>()
    }

    fn check(&self, x: usize) -> Result<()> {
        if x >= self.nodes {
            return Err(Error::LabelOutOfRange { x, nodes: self.nodes });
        }
        Ok(())
    }

    /// Node owning position `i`.
    pub fn pre_rank(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.ps.len() {
            return Err(Error::OutOfRange { pos: i, len: self.ps.len() });
        }
        Ok(self.pre_rank_of(i))
    }

    /// First position of node `x`'s segment.
    pub fn pre_select(&self, x: usize) -> Result<usize> {
        self.check(x)?;
        Ok(self.pre_select_of(x))
    }

    pub fn parent(&self, x: usize) -> Result<Option<usize>> {
        self.check(x)?;
        Ok((x != 0).then(|| self.parent_of(x)))
    }

    pub fn degree(&self, x: usize) -> Result<usize> {
        self.check(x)?;
        Ok(self.degree_of(x))
    }

    pub fn child(&self, x: usize, i: usize) -> Result<usize> {
        self.check(x)?;
        let degree = self.degree_of(x);
        if i == 0 || i > degree {
            return Err(Error::ChildIndex { i, degree });
        }
        Ok(self.child_of(x, i))
    }

    /// Number of left siblings; 0 for the root.
    pub fn child_rank(&self, x: usize) -> Result<usize> {
        self.check(x)?;
        Ok(self.child_rank_of(x))
    }

    pub fn next_sibling(&self, x: usize) -> Result<Option<usize>> {
        self.check(x)?;
        Ok(self.next_sibling_of(x))
    }

    pub fn subtree_size(&self, x: usize) -> Result<usize> {
        self.check(x)?;
        Ok(self.subtree_size_of(x))
    }

    pub fn depth(&self, x: usize) -> Result<usize> {
        self.check(x)?;
        Ok(self.depth_of(x))
    }

    pub fn level_anc(&self, x: usize, d: usize) -> Result<usize> {
        self.check(x)?;
        let depth = self.depth_of(x);
        if d > depth {
            return Err(Error::DepthTooLarge { d, depth });
        }
        Ok(self.level_anc_of(x, d))
    }

    pub fn lca(&self, x: usize, y: usize) -> Result<usize> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.lca_of(x, y))
    }

    #[inline]
    pub(crate) fn pre_rank_of(&self, i: usize) -> usize {
        self.ps.bits().rank0(i - 1)
    }

    #[inline]
    pub(crate) fn pre_select_of(&self, x: usize) -> usize {
        if x == 0 {
            1
        } else {
            self.ps.bits().select0(x).expect("label in range") + 1
        }
    }

    /// Position of the close ending node `x`'s segment.
    #[inline]
    pub(crate) fn close_pos(&self, x: usize) -> usize {
        self.ps.bits().select0(x + 1).expect("label in range")
    }

    #[inline]
    pub(crate) fn degree_of(&self, x: usize) -> usize {
        self.close_pos(x) - self.pre_select_of(x) - usize::from(x == 0)
    }

    /// Open in the parent's segment that points at `x` (x > 0).
    #[inline]
    pub(crate) fn incoming_open(&self, x: usize) -> usize {
        self.ps.open_of(self.pre_select_of(x) - 1)
    }

    #[inline]
    pub(crate) fn parent_of(&self, x: usize) -> usize {
        self.pre_rank_of(self.incoming_open(x))
    }

    #[inline]
    pub(crate) fn child_of(&self, x: usize, i: usize) -> usize {
        let b = self.close_pos(x) - 1;
        self.pre_rank_of(self.ps.close_of(b - (i - 1)) + 1)
    }

    #[inline]
    pub(crate) fn child_rank_of(&self, x: usize) -> usize {
        if x == 0 {
            return 0;
        }
        let o = self.incoming_open(x);
        let group_end = self.ps.bits().select0(self.ps.bits().rank0(o) + 1).expect("group close");
        group_end - 1 - o
    }

    #[inline]
    pub(crate) fn next_sibling_of(&self, x: usize) -> Option<usize> {
        if x == 0 {
            return None;
        }
        let o = self.incoming_open(x);
        (o > 2 && self.ps.is_open(o - 1)).then(|| self.pre_rank_of(self.ps.close_of(o - 1) + 1))
    }

    #[inline]
    pub(crate) fn subtree_size_of(&self, x: usize) -> usize {
        if x == 0 {
            return self.nodes;
        }
        let end = self.ps.fwd_search(self.pre_select_of(x) - 1, -1).expect("subtree end");
        self.ps.bits().rank0(end) - x
    }

    #[inline]
    fn sample_index(&self, x: usize) -> Option<usize> {
        self.sampled.get(x + 1).then(|| self.sampled.rank1(x + 1) - 1)
    }

    pub(crate) fn depth_of(&self, x: usize) -> usize {
        let mut y = x;
        let mut steps = 0;
        loop {
            if let Some(s) = self.sample_index(y) {
                return self.sample_level.get(s) as usize * SAMPLE + steps;
            }
            y = self.parent_of(y);
            steps += 1;
        }
    }

    pub(crate) fn level_anc_of(&self, x: usize, d: usize) -> usize {
        let mut y = x;
        let mut dy = self.depth_of(x);
        while dy > d && self.sample_index(y).is_none() {
            y = self.parent_of(y);
            dy -= 1;
        }
        if dy == d {
            return y;
        }
        let target = d.div_ceil(SAMPLE) * SAMPLE;
        let mut s = self.sample_index(y).expect("sampled");
        let mut jumps = (dy - target) / SAMPLE;
        let mut j = 0;
        while jumps > 0 {
            if jumps & 1 == 1 {
                s = self.up[j].get(s) as usize;
            }
            jumps >>= 1;
            j += 1;
        }
        y = self.sampled.select1(s + 1).expect("sample") - 1;
        for _ in d..target {
            y = self.parent_of(y);
        }
        y
    }

    pub(crate) fn lca_of(&self, x: usize, y: usize) -> usize {
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        if x == y || y < x + self.subtree_size_of(x) {
            return x;
        }
        let bits = self.ps.bits();
        let lo = bits.select0(x).expect("label");
        let hi = bits.select0(y).expect("label");
        let q = self.ps.min_excess(lo, hi).1;
        self.parent_of(bits.rank0(q))
    }
}
