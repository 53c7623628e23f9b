//! Binary layout of an encoding.
//!
//! All integers are 64-bit little-endian.
//!
//! | field       | contents                                   |
//! |-------------|--------------------------------------------|
//! | magic       | `SRQ1`                                     |
//! | variant     | one byte, `a`..`d`                         |
//! | n, k        | array length, duplicates                   |
//! | root counts | min then max, checked against the payload  |
//! | v_min_len   | length of `V_min` (0 without colors)       |
//! | T, U, C     | bit sequences                              |
//! | V           | bit sequence, variants `c` and `d` only    |
//!
//! Decoding structures are rebuilt on load.

use crate::bitseq::BitSeq;
use crate::error::{format_err, Result};
use crate::wire::{Reader, Writer};

use super::{CombinedEncoding, Variant};

const MAGIC: &[u8; 4] = b"SRQ1";

impl CombinedEncoding {
    pub fn write_to(&self, out: &mut Vec<u8>) {
        let mut w = Writer::default();
        w.bytes(MAGIC);
        w.u8(self.variant.letter() as u8);
        for v in [self.n, self.k, self.root_min, self.root_max, self.v_min_len] {
            w.u64(v as u64);
        }
        out.extend_from_slice(&w.buf);
        self.t_store.write_to(out);
        self.u_store.write_to(out);
        self.c_store.write_to(out);
        if let Some(v) = &self.v_store {
            v.write_to(out);
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out);
        out
    }

    /// Parses and validates an encoding, rejecting trailing bytes.
    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let mut r = Reader::new(data);
        r.expect_magic(MAGIC)?;
        let letter = r.u8()?;
        let variant = Variant::from_letter(letter as char)
            .filter(|_| letter.is_ascii_lowercase())
            .ok_or_else(|| format_err(format!("unknown variant byte {letter:#04x}")))?;
        let n = r.usize()?;
        let k = r.usize()?;
        let root_min = r.usize()?;
        let root_max = r.usize()?;
        let v_min_len = r.usize()?;
        let t = BitSeq::read_from(&mut r)?;
        let u = BitSeq::read_from(&mut r)?;
        let c = BitSeq::read_from(&mut r)?;
        let v = if variant.has_colors() { Some(BitSeq::read_from(&mut r)?) } else { None };
        r.finish()?;
        if c.len() != n {
            return Err(format_err(format!("header says n = {n}, C has {} bits", c.len())));
        }
        if !variant.has_colors() && v_min_len != 0 {
            return Err(format_err("V_min length set without colors"));
        }
        let e = CombinedEncoding::from_parts(variant, t, u, c, v, v_min_len)?;
        if e.k != k {
            return Err(format_err(format!("header says k = {k}, C has {} ones", e.k)));
        }
        if (e.root_min, e.root_max) != (root_min, root_max) {
            return Err(format_err("root counts do not match the payload"));
        }
        Ok(e)
    }
}
