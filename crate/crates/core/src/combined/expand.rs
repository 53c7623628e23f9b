//! The expansion functions `f` and `f'` that merge a D' substring with run
//! bits, and the chunk tables that evaluate them a byte at a time.
//!
//! `s` is a sequence of groups `(^d )` and `c` a bit string. Read left to
//! right, `f` turns a `1` of `c` into `)` and a `0` into the next group of
//! `s`; once `c` runs out the rest of `s` follows, and once `s` runs out
//! nothing does. `f'` is the mirror image, consuming both inputs from the
//! right. Bits are `true` for `(`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Direct evaluation of `f`.
pub fn f(s: &[bool], c: &[bool]) -> Vec<bool> {
    let mut out = Vec::with_capacity(s.len() + c.len());
    let (mut si, mut ci) = (0, 0);
    while si < s.len() && ci < c.len() {
        if c[ci] {
            out.push(false);
            ci += 1;
            continue;
        }
        let bit = s[si];
        out.push(bit);
        si += 1;
        if !bit {
            ci += 1;
        }
    }
    if ci == c.len() {
        out.extend_from_slice(&s[si..]);
    }
    out
}

/// Direct evaluation of `f'`.
pub fn fprime(s: &[bool], c: &[bool]) -> Vec<bool> {
    let mut rev = Vec::with_capacity(s.len() + c.len());
    let (mut se, mut ce) = (s.len(), c.len());
    while se > 0 && ce > 0 {
        if s[se - 1] {
            // opens belong to the group whose close was emitted last
            rev.push(true);
            se -= 1;
        } else if c[ce - 1] {
            rev.push(false);
            ce -= 1;
        } else {
            rev.push(false);
            se -= 1;
            ce -= 1;
        }
    }
    if ce == 0 {
        rev.extend(s[..se].iter().rev());
    }
    rev.reverse();
    rev
}

/// Parenthesis-string form of [`f`]; `c` is a string of `0`/`1`.
pub fn f_str(s: &str, c: &str) -> String {
    render(&f(&parse_parens(s), &parse_bits(c)))
}

/// Parenthesis-string form of [`fprime`].
pub fn fprime_str(s: &str, c: &str) -> String {
    render(&fprime(&parse_parens(s), &parse_bits(c)))
}

fn parse_parens(s: &str) -> Vec<bool> {
    s.chars().map(|ch| ch == '(').collect()
}

fn parse_bits(c: &str) -> Vec<bool> {
    c.chars().map(|ch| ch == '1').collect()
}

fn render(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '(' } else { ')' }).collect()
}

/// Entry layout: output bits (32), output length (6), `s` bits used (5),
/// `c` bits used (5).
#[inline]
fn pack(out: u64, out_len: u32, s_used: u32, c_used: u32) -> u64 {
    out | (out_len as u64) << 32 | (s_used as u64) << 38 | (c_used as u64) << 43
}

#[inline]
fn unpack(e: u64) -> (u64, u32, u32, u32) {
    (e & 0xffff_ffff, (e >> 32 & 0x3f) as u32, (e >> 38 & 0x1f) as u32, (e >> 43 & 0x1f) as u32)
}

/// `T_f` and `T_f'`: for every pair of `chunk`-bit pieces of `s` and `c`,
/// the output produced until one of them is used up.
#[derive(Clone, Debug)]
pub struct ExpandTables {
    chunk: u32,
    table_f: Vec<u64>,
    table_fprime: Vec<u64>,
}

/// Largest chunk whose two tables stay within 256 MiB.
pub const MAX_CHUNK_BITS: u32 = 12;

/// Builds both tables for `chunk_bits`-bit pieces (`2^(2 chunk_bits)`
/// entries each).
pub fn build_tables(chunk_bits: u32) -> Result<ExpandTables> {
    if chunk_bits == 0 || chunk_bits > 16 || chunk_bits > MAX_CHUNK_BITS {
        return Err(Error::ChunkTooLarge(chunk_bits));
    }
    let m = chunk_bits;
    let size = 1usize << (2 * m);
    let mut table_f = Vec::with_capacity(size);
    let mut table_fprime = Vec::with_capacity(size);
    for idx in 0..size as u64 {
        let s = idx & ((1 << m) - 1);
        let c = idx >> m;
        table_f.push(f_chunk(s, c, m));
        table_fprime.push(fprime_chunk(s, c, m));
    }
    Ok(ExpandTables { chunk: m, table_f, table_fprime })
}

fn f_chunk(s: u64, c: u64, m: u32) -> u64 {
    let (mut out, mut len, mut si, mut ci) = (0u64, 0u32, 0u32, 0u32);
    while si < m && ci < m {
        if c >> ci & 1 == 1 {
            len += 1;
            ci += 1;
            continue;
        }
        let bit = s >> si & 1;
        out |= bit << len;
        len += 1;
        si += 1;
        if bit == 0 {
            ci += 1;
        }
    }
    pack(out, len, si, ci)
}

/// Works from bit `m - 1` down; the output is stored first bit lowest.
fn fprime_chunk(s: u64, c: u64, m: u32) -> u64 {
    let (mut out, mut len, mut se, mut ce) = (0u64, 0u32, m, m);
    while se > 0 && ce > 0 {
        let sb = s >> (se - 1) & 1;
        out <<= 1;
        len += 1;
        if sb == 1 {
            out |= 1;
            se -= 1;
        } else if c >> (ce - 1) & 1 == 1 {
            ce -= 1;
        } else {
            se -= 1;
            ce -= 1;
        }
    }
    pack(out, len, m - se, m - ce)
}

/// The process-wide 8-bit tables.
pub fn shared_tables() -> &'static ExpandTables {
    static TABLES: OnceLock<ExpandTables> = OnceLock::new();
    TABLES.get_or_init(|| build_tables(8).expect("8-bit chunks are supported"))
}

impl ExpandTables {
    pub fn chunk_bits(&self) -> u32 {
        self.chunk
    }

    pub fn entries(&self) -> usize {
        self.table_f.len()
    }

    /// Size of both tables in bits.
    pub fn size_bits(&self) -> u64 {
        (self.table_f.len() + self.table_fprime.len()) as u64 * 64
    }

    #[inline]
    fn mask(&self) -> u64 {
        (1u64 << self.chunk) - 1
    }

    /// `f` on bit windows (first bit lowest), producing at most `limit <= 64`
    /// output bits. Returns the output and its length.
    pub fn f_window(&self, s: u64, s_len: u32, c: u64, c_len: u32, limit: u32) -> (u64, u32) {
        debug_assert!(s_len <= 64 && c_len <= 64 && limit <= 64);
        let m = self.chunk;
        let mut out = 0u128;
        let (mut len, mut si, mut ci) = (0u32, 0u32, 0u32);
        while si < s_len && ci < c_len && len < limit {
            if s_len - si >= m && c_len - ci >= m {
                let sc = s >> si & self.mask();
                let cc = c >> ci & self.mask();
                let (o, ol, su, cu) = unpack(self.table_f[(sc | cc << m) as usize]);
                out |= (o as u128) << len;
                len += ol;
                si += su;
                ci += cu;
                continue;
            }
            if c >> ci & 1 == 1 {
                len += 1;
                ci += 1;
                continue;
            }
            let bit = s >> si & 1;
            out |= (bit as u128) << len;
            len += 1;
            si += 1;
            if bit == 0 {
                ci += 1;
            }
        }
        if ci == c_len && si < s_len && len < limit {
            let rest = s_len - si;
            out |= ((s >> si) as u128 & ((1u128 << rest) - 1)) << len;
            len += rest;
        }
        let len = len.min(limit);
        let bits = if len == 0 { 0 } else { out as u64 & (u64::MAX >> (64 - len)) };
        (bits, len)
    }

    /// The last `limit <= 64` output bits of `f'` on bit windows.
    pub fn fprime_window(&self, s: u64, s_len: u32, c: u64, c_len: u32, limit: u32) -> (u64, u32) {
        debug_assert!(s_len <= 64 && c_len <= 64 && limit <= 64);
        let m = self.chunk;
        // built right to left: `out` holds the produced suffix, first bit lowest
        let mut out = 0u128;
        let (mut len, mut se, mut ce) = (0u32, s_len, c_len);
        while se > 0 && ce > 0 && len < limit {
            if se >= m && ce >= m {
                let sc = s >> (se - m) & self.mask();
                let cc = c >> (ce - m) & self.mask();
                let (o, ol, su, cu) = unpack(self.table_fprime[(sc | cc << m) as usize]);
                out = (out << ol) | o as u128;
                len += ol;
                se -= su;
                ce -= cu;
                continue;
            }
            let sb = s >> (se - 1) & 1;
            out <<= 1;
            len += 1;
            if sb == 1 {
                out |= 1;
                se -= 1;
            } else if c >> (ce - 1) & 1 == 1 {
                ce -= 1;
            } else {
                se -= 1;
                ce -= 1;
            }
        }
        if ce == 0 && se > 0 && len < limit {
            // only the tail of the untouched prefix can reach the last `limit` bits
            let take = se.min(limit - len);
            let seg = (s >> (se - take)) as u128 & ((1u128 << take) - 1);
            out = (out << take) | seg;
            len += take;
        }
        // keep the last `limit` bits: the suffix is the high end of `out`
        if len > limit {
            out >>= len - limit;
            len = limit;
        }
        let bits = if len == 0 { 0 } else { out as u64 & (u64::MAX >> (64 - len)) };
        (bits, len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand::rngs::StdRng;

    fn to_word(bits: &[bool]) -> u64 {
        bits.iter().enumerate().fold(0, |w, (i, &b)| w | (b as u64) << i)
    }

    fn from_word(w: u64, len: u32) -> Vec<bool> {
        (0..len).map(|i| w >> i & 1 == 1).collect()
    }

    fn random_groups(rng: &mut StdRng, len: usize) -> Vec<bool> {
        (0..len).map(|_| rng.gen_bool(0.5)).chain(std::iter::once(false)).collect()
    }

    #[test]
    fn recurrence_examples() {
        assert_eq!(f_str("()()", ""), "()()");
        assert_eq!(f_str("()()", "010"), "())()");
        assert_eq!(f_str("", "0110"), "");
        assert_eq!(f_str("(()", "10"), ")(()");
        assert_eq!(fprime_str("()()", ""), "()()");
        assert_eq!(fprime_str("()()", "010"), "())()");
        assert_eq!(fprime_str("", "101"), "");
        assert_eq!(fprime_str("(()())", "01"), "(()()))");
        assert_eq!(fprime_str("(()())", "100"), "(())())");
        assert_eq!(f_str("(()())", "100"), ")(()())");
    }

    #[test]
    fn table_sizes_and_limits() {
        let t = build_tables(8).unwrap();
        assert_eq!(t.entries(), 1 << 16);
        assert!(matches!(build_tables(17), Err(Error::ChunkTooLarge(17))));
        assert!(build_tables(0).is_err());
        // all-zero c chunks copy complete groups
        for s in 0u64..256 {
            let (out, len, su, _) = unpack(t.table_f[s as usize]);
            assert_eq!(len, su);
            assert_eq!(out, s & ((1 << su) - 1));
        }
    }

    #[test]
    fn chained_lookups_match_direct() {
        let mut rng = StdRng::seed_from_u64(7);
        for chunk in [3, 8] {
            let t = build_tables(chunk).unwrap();
            for _ in 0..10_000 {
                let n = rng.gen_range(0..63);
                let s = random_groups(&mut rng, n);
                let c: Vec<bool> = (0..rng.gen_range(0..=64)).map(|_| rng.gen_bool(0.3)).collect();
                let limit = rng.gen_range(0..=64u32);
                let direct = f(&s, &c);
                let (w, len) = t.f_window(to_word(&s), s.len() as u32, to_word(&c), c.len() as u32, limit);
                let want = &direct[..direct.len().min(limit as usize)];
                assert_eq!(from_word(w, len), want, "f s={s:?} c={c:?}");
                let direct = fprime(&s, &c);
                let (w, len) =
                    t.fprime_window(to_word(&s), s.len() as u32, to_word(&c), c.len() as u32, limit);
                let want = &direct[direct.len() - direct.len().min(limit as usize)..];
                assert_eq!(from_word(w, len), want, "f' s={s:?} c={c:?}");
            }
        }
    }

    #[test]
    fn complete_groups_agree_both_ways() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..2000 {
            let n = rng.gen_range(0..40);
            let s = random_groups(&mut rng, n);
            let groups = s.iter().filter(|&&b| !b).count();
            // one 0 per group, 1-runs only between groups
            let mut c = Vec::new();
            for g in 0..groups {
                if g > 0 {
                    c.extend(std::iter::repeat_n(true, rng.gen_range(0..3)));
                }
                c.push(false);
            }
            assert_eq!(f(&s, &c), fprime(&s, &c));
        }
    }
}
