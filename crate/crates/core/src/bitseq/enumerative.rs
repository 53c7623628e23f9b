//! Enumerative (class, offset) coding of 63-bit blocks.
//!
//! A block with `c` set bits is identified by its rank among all
//! `C(63, c)` blocks of that class in the combinatorial number system.

use std::sync::OnceLock;

pub const BLOCK_BITS: usize = 63;

struct Tables {
    binom: [[u64; BLOCK_BITS + 1]; BLOCK_BITS + 1],
    width: [u32; BLOCK_BITS + 1],
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut binom = [[0u64; BLOCK_BITS + 1]; BLOCK_BITS + 1];
        for n in 0..=BLOCK_BITS {
            binom[n][0] = 1;
            for k in 1..=n {
                binom[n][k] = binom[n - 1][k - 1] + if k < n { binom[n - 1][k] } else { 0 };
            }
        }
        let mut width = [0u32; BLOCK_BITS + 1];
        for (c, w) in width.iter_mut().enumerate() {
            let count = binom[BLOCK_BITS][c];
            // ceil(lg count)
            *w = if count <= 1 { 0 } else { 64 - (count - 1).leading_zeros() };
        }
        Tables { binom, width }
    })
}

#[inline]
pub fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        0
    } else {
        tables().binom[n][k]
    }
}

/// Bits needed for the offset of a class-`c` block.
#[inline]
pub fn offset_width(class: u32) -> u32 {
    tables().width[class as usize]
}

/// Number of distinct blocks in class `c`.
#[inline]
pub fn class_size(class: u32) -> u64 {
    binom(BLOCK_BITS, class as usize)
}

pub fn encode(block: u64) -> (u32, u64) {
    debug_assert!(block >> BLOCK_BITS == 0);
    let class = block.count_ones();
    let mut offset = 0u64;
    let mut j = 0usize;
    let mut b = block;
    while b != 0 {
        let p = b.trailing_zeros() as usize;
        j += 1;
        offset += binom(p, j);
        b &= b - 1;
    }
    (class, offset)
}

pub fn decode(class: u32, mut offset: u64) -> u64 {
    let mut block = 0u64;
    let mut p = BLOCK_BITS;
    for j in (1..=class as usize).rev() {
        // largest p with C(p, j) <= offset
        p -= 1;
        while binom(p, j) > offset {
            p -= 1;
        }
        block |= 1u64 << p;
        offset -= binom(p, j);
    }
    block
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_match_binomials() {
        assert_eq!(offset_width(0), 0);
        assert_eq!(offset_width(63), 0);
        assert_eq!(offset_width(1), 6); // 63 choices
        assert_eq!(class_size(2), 63 * 62 / 2);
    }

    #[test]
    fn encode_decode_roundtrip() {
        let mut x = 0x1234_5678_9abc_def1u64;
        for _ in 0..5000 {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let block = x & ((1u64 << 63) - 1);
            let sparse = block & (block >> 3) & (block >> 9);
            for b in [block, sparse, 0, (1u64 << 63) - 1] {
                let (c, o) = encode(b);
                assert!(o < class_size(c));
                assert_eq!(decode(c, o), b);
            }
        }
    }
}
