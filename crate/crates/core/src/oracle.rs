//! Brute-force reference answers and explicit heap trees.
//!
//! Everything here scans the array directly. It is the ground truth for the
//! differential tests and favors obviousness over speed.

use crate::error::Result;
use crate::query::{QueryKind, QuerySpec, Side};

/// Answers `q` on `a` (1-based positions) by linear scan. Sentinels are
/// reported as 0 and `n + 1`; `None` means the k-th occurrence does not exist.
pub fn oracle_answer(a: &[i64], q: &QuerySpec) -> Result<Option<usize>> {
    let n = a.len();
    q.validate(n)?;
    let at = |p: usize| a[p - 1];
    let (i, j) = (q.i, q.j);
    let ans = match q.kind {
        QueryKind::Psv => Some((1..i).rev().find(|&p| at(p) < at(i)).unwrap_or(0)),
        QueryKind::Plv => Some((1..i).rev().find(|&p| at(p) > at(i)).unwrap_or(0)),
        QueryKind::Nsv => Some((i + 1..=n).find(|&p| at(p) < at(i)).unwrap_or(n + 1)),
        QueryKind::Nlv => Some((i + 1..=n).find(|&p| at(p) > at(i)).unwrap_or(n + 1)),
        kind => {
            let best = match kind.side() {
                Side::Min => (i..=j).map(at).min(),
                Side::Max => (i..=j).map(at).max(),
            }
            .expect("non-empty range");
            let mut hits = (i..=j).filter(|&p| at(p) == best);
            match kind {
                QueryKind::RLMinQ | QueryKind::RLMaxQ => hits.next(),
                QueryKind::RkMinQ | QueryKind::RkMaxQ => hits.nth(q.k - 1),
                _ => hits.next_back(),
            }
        }
    };
    Ok(ans)
}

/// An explicit 2d-Min or 2d-Max heap: node `i` is array position `i`, node 0
/// the sentinel root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleTree {
    pub parent: Vec<usize>,
    pub children: Vec<Vec<usize>>,
    /// Color of each non-leftmost child: `Some(true)` for red.
    pub red: Vec<Option<bool>>,
}

/// Tree with `parent(i) = PSV(i)`; red children are strictly smaller than
/// their left sibling.
pub fn oracle_min_tree(a: &[i64]) -> OracleTree {
    oracle_tree(a, Side::Min)
}

/// Tree with `parent(i) = PLV(i)`; red children are strictly larger than
/// their left sibling.
pub fn oracle_max_tree(a: &[i64]) -> OracleTree {
    oracle_tree(a, Side::Max)
}

pub fn oracle_tree(a: &[i64], side: Side) -> OracleTree {
    let n = a.len();
    let kind = match side {
        Side::Min => QueryKind::Psv,
        Side::Max => QueryKind::Plv,
    };
    let mut parent = vec![0usize; n + 1];
    let mut children = vec![Vec::new(); n + 1];
    for i in 1..=n {
        let p = oracle_answer(a, &QuerySpec::point(kind, i)).expect("valid").expect("total");
        parent[i] = p;
        children[p].push(i);
    }
    let mut red = vec![None; n + 1];
    for ch in &children {
        for w in ch.windows(2) {
            let (left, x) = (a[w[0] - 1], a[w[1] - 1]);
            red[w[1]] = Some(match side {
                Side::Min => x < left,
                Side::Max => x > left,
            });
        }
    }
    OracleTree { parent, children, red }
}

impl OracleTree {
    /// DFUDS by definition: one extra open, then each node's degree in opens
    /// followed by a close, in preorder.
    pub fn dfuds_string(&self) -> String {
        let mut s = String::from("(");
        for ch in &self.children {
            s.push_str(&"(".repeat(ch.len()));
            s.push(')');
        }
        s
    }

    /// Color string: a leading `1`, then for every node in preorder its
    /// non-leftmost children from right to left (`0` = red).
    pub fn color_string(&self) -> String {
        let mut s = String::from("1");
        for ch in &self.children {
            for &c in ch.iter().skip(1).rev() {
                s.push(if self.red[c] == Some(true) { '0' } else { '1' });
            }
        }
        s
    }

    pub fn leftmost_children(&self) -> usize {
        self.children.iter().filter(|c| !c.is_empty()).count()
    }
}
