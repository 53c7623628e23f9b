//! Elias–Fano coded non-decreasing integer sequence.

use super::{BitBuf, BitSeq, PackedInts, StorageMode};

/// A sorted list of positions stored in about `2 + lg(u/m)` bits each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseSet {
    len: usize,
    universe: u64,
    low_width: u32,
    low: PackedInts,
    high: BitSeq,
}

impl SparseSet {
    /// `values` must be non-decreasing and below `universe`.
    pub fn from_sorted(values: &[u64], universe: u64) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(values.last().is_none_or(|&v| v < universe.max(1)));
        let m = values.len() as u64;
        let low_width = if m > 0 && universe > m { 63 - (universe / m).leading_zeros() } else { 0 };
        let mut low = PackedInts::with_capacity(low_width, values.len());
        let mut high = BitBuf::with_capacity(values.len() + (universe >> low_width) as usize + 1);
        let mut prev_high = 0u64;
        for &v in values {
            let h = v >> low_width;
            high.push_run(false, (h - prev_high) as usize);
            high.push(true);
            prev_high = h;
            low.push(if low_width == 0 { 0 } else { v & ((1u64 << low_width) - 1) });
        }
        SparseSet {
            len: values.len(),
            universe,
            low_width,
            low,
            high: high.finish(StorageMode::Plain),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    /// The `i`-th value, 0-based.
    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        let pos = self.high.select1(i + 1).expect("index in range");
        let h = (pos - 1 - i) as u64;
        (h << self.low_width) | self.low.get(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Number of values strictly below `x`.
    pub fn rank_below(&self, x: u64) -> usize {
        let (mut lo, mut hi) = (0usize, self.len);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.get(mid) < x {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn size_bits(&self) -> usize {
        self.low.size_bits() + self.high.len() + self.high.aux_bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_rank() {
        let vals: Vec<u64> = (0..1000u64).map(|i| i * i / 7 + i).collect();
        let u = vals.last().unwrap() + 5;
        let s = SparseSet::from_sorted(&vals, u);
        assert_eq!(s.iter().collect::<Vec<_>>(), vals);
        for x in [0, 1, 50, 5000, u] {
            assert_eq!(s.rank_below(x), vals.iter().filter(|&&v| v < x).count());
        }
        assert!(s.size_bits() < 1000 * 16);
    }

    #[test]
    fn empty_and_dense() {
        let s = SparseSet::from_sorted(&[], 10);
        assert!(s.is_empty());
        let vals = vec![0u64, 0, 1, 1, 2, 3, 3];
        let s = SparseSet::from_sorted(&vals, 4);
        assert_eq!(s.iter().collect::<Vec<_>>(), vals);
    }
}
