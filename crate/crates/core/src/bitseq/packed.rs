//! Fixed-width packed integer vector.

/// Integers of a fixed bit width packed back to back into 64-bit words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PackedInts {
    width: u32,
    len: usize,
    words: Vec<u64>,
}

impl PackedInts {
    pub fn new(width: u32) -> Self {
        assert!(width <= 64, "width {width} exceeds 64");
        Self { width, len: 0, words: Vec::new() }
    }

    pub fn with_capacity(width: u32, cap: usize) -> Self {
        let mut p = Self::new(width);
        p.words.reserve((cap * width as usize).div_ceil(64));
        p
    }

    /// Smallest width able to hold `max`.
    pub fn width_for(max: u64) -> u32 {
        64 - max.leading_zeros()
    }

    pub fn from_slice(width: u32, values: &[u64]) -> Self {
        let mut p = Self::with_capacity(width, values.len());
        for &v in values {
            p.push(v);
        }
        p
    }

    pub(crate) fn from_raw(width: u32, len: usize, words: Vec<u64>) -> Option<Self> {
        let bits = len.checked_mul(width as usize)?;
        if width > 64 || words.len() != bits.div_ceil(64) {
            return None;
        }
        // bits past the last value must be clear so the encoding is canonical
        if bits % 64 != 0 && words[words.len() - 1] >> (bits % 64) != 0 {
            return None;
        }
        Some(Self { width, len, words })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn push(&mut self, value: u64) {
        let w = self.width as usize;
        if w == 0 {
            self.len += 1;
            return;
        }
        debug_assert!(w == 64 || value >> w == 0, "value {value} wider than {w} bits");
        let pos = self.len * w;
        let need = (pos + w).div_ceil(64);
        if self.words.len() < need {
            self.words.resize(need, 0);
        }
        write_bits(&mut self.words, pos, w, value);
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        let w = self.width as usize;
        if w == 0 {
            return 0;
        }
        read_bits(&self.words, i * w, w)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Bits used by the packed values (excluding the final partial word).
    pub fn size_bits(&self) -> usize {
        self.len * self.width as usize
    }
}

/// Reads `len <= 64` bits starting at bit offset `pos` (LSB-first layout).
#[inline]
pub(crate) fn read_bits(words: &[u64], pos: usize, len: usize) -> u64 {
    if len == 0 {
        return 0;
    }
    let wi = pos / 64;
    let off = pos % 64;
    let mut v = words[wi] >> off;
    if off + len > 64 {
        v |= words[wi + 1] << (64 - off);
    }
    if len < 64 {
        v &= (1u64 << len) - 1;
    }
    v
}

#[inline]
pub(crate) fn write_bits(words: &mut [u64], pos: usize, len: usize, value: u64) {
    if len == 0 {
        return;
    }
    let wi = pos / 64;
    let off = pos % 64;
    let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
    let value = value & mask;
    words[wi] = (words[wi] & !(mask << off)) | (value << off);
    if off + len > 64 {
        let spill = off + len - 64;
        let m2 = (1u64 << spill) - 1;
        words[wi + 1] = (words[wi + 1] & !m2) | (value >> (64 - off));
    }
}
