//! Full reconstruction of both heaps of `A` from the heaps of `A'`.
//!
//! A run of `m + 1` equal values is one node `x'` of the heap of `A'`. In
//! the heap of `A` its first `m` copies become leaves: `m` closes go in
//! front of the group of `x'` (at `r = pre_select(x')`) and `m` opens in
//! front of the open matched with the close at `r - 1`, in the parent's
//! group. The new children are equal to their left siblings, so `m` ones
//! enter the color string at the first new open.

use crate::bitseq::{BitBuf, BitSeq, StorageMode};
use crate::error::{format_err, Result};
use crate::heap_build::dfuds_from_tu;
use crate::query::Side;

/// The DFUDS sequences of both heaps of `A`, and their color strings when
/// the encoding stores colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reconstruction {
    pub d_min: BitSeq,
    pub d_max: BitSeq,
    pub v_min: Option<BitSeq>,
    pub v_max: Option<BitSeq>,
}

/// Inputs: `T`/`U` of `A'`, the run bitmap `C` of `A`, the root counts of
/// `A'`'s heaps, and `A'`'s color strings `(V_min, V_max)`.
pub(crate) fn reconstruct(
    t: &BitSeq,
    u: &BitSeq,
    c: &BitSeq,
    roots: (usize, usize),
    colors: Option<(&BitSeq, &BitSeq)>,
) -> Result<Reconstruction> {
    let n = c.len();
    let runs = run_lengths(c)?;
    let (d_min, v_min) = repair_side(t, u, roots.0, Side::Min, &runs, colors.map(|v| v.0), n)?;
    let (d_max, v_max) = repair_side(t, u, roots.1, Side::Max, &runs, colors.map(|v| v.1), n)?;
    Ok(Reconstruction { d_min, d_max, v_min, v_max })
}

/// Extra copies of each run head, in order.
fn run_lengths(c: &BitSeq) -> Result<Vec<usize>> {
    let mut runs = Vec::with_capacity(c.count_zeros());
    for (i, bit) in c.iter().enumerate() {
        if !bit {
            runs.push(0);
        } else if let Some(last) = runs.last_mut() {
            *last += 1;
        } else {
            return Err(format_err(format!("C[{}] = 1 has no left neighbour", i + 1)));
        }
    }
    Ok(runs)
}

fn repair_side(
    t: &BitSeq,
    u: &BitSeq,
    root: usize,
    side: Side,
    runs: &[usize],
    v_prime: Option<&BitSeq>,
    n: usize,
) -> Result<(BitSeq, Option<BitSeq>)> {
    let dp = dfuds_from_tu(t, u, root, side).to_bools();
    let nodes = runs.len();
    if dp.len() != 2 * nodes + 2 {
        return Err(format_err(format!("heap of A' has {} bits, want {}", dp.len(), 2 * nodes + 2)));
    }
    // close positions (0-based) and, for each close, its matching open
    let mut closes = Vec::with_capacity(nodes + 1);
    let mut open_of = vec![usize::MAX; dp.len()];
    let mut stack = Vec::new();
    for (i, &b) in dp.iter().enumerate() {
        if b {
            stack.push(i);
        } else {
            let o = stack.pop().ok_or_else(|| format_err("heap of A' is unbalanced"))?;
            open_of[i] = o;
            closes.push(i);
            if stack.is_empty() && i + 1 != dp.len() {
                return Err(format_err("heap of A' closes early"));
            }
        }
    }
    if !stack.is_empty() {
        return Err(format_err("heap of A' is unbalanced"));
    }
    let mut ins_close = vec![0usize; dp.len()];
    let mut ins_open = vec![0usize; dp.len()];
    for (x, &m) in runs.iter().enumerate() {
        if m == 0 {
            continue;
        }
        // node x + 1 starts right after the (x + 1)-th close
        let r = closes[x] + 1;
        ins_close[r] += m;
        ins_open[open_of[r - 1]] += m;
    }
    let mut d = BitBuf::with_capacity(2 * n + 2);
    let mut v = v_prime.map(|vp| (vp, BitBuf::with_capacity(vp.len() + n), 0usize));
    for (q, &b) in dp.iter().enumerate() {
        d.push_run(false, ins_close[q]);
        let m = ins_open[q];
        d.push_run(true, m);
        if let Some((_, out, _)) = v.as_mut() {
            out.push_run(true, m);
        }
        d.push(b);
        if b && dp.get(q + 1) == Some(&true) {
            if let Some((vp, out, next)) = v.as_mut() {
                *next += 1;
                if *next > vp.len() {
                    return Err(format_err("color string shorter than the heap needs"));
                }
                out.push(vp.get(*next));
            }
        }
    }
    let v = match v {
        Some((vp, out, used)) => {
            if used != vp.len() {
                return Err(format_err("color string longer than the heap needs"));
            }
            Some(out.finish(StorageMode::Plain))
        }
        None => None,
    };
    if d.len() != 2 * n + 2 {
        return Err(format_err("repaired heap has the wrong length"));
    }
    Ok((d.finish(StorageMode::Plain), v))
}
