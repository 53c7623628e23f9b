//! Query kinds and argument validation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QueryKind {
    RMinQ,
    RLMinQ,
    RRMinQ,
    RkMinQ,
    RMaxQ,
    RLMaxQ,
    RRMaxQ,
    RkMaxQ,
    Psv,
    Nsv,
    Plv,
    Nlv,
}

/// Which heap answers a query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Min,
    Max,
}

impl QueryKind {
    pub const ALL: [QueryKind; 12] = [
        QueryKind::RMinQ,
        QueryKind::RLMinQ,
        QueryKind::RRMinQ,
        QueryKind::RkMinQ,
        QueryKind::RMaxQ,
        QueryKind::RLMaxQ,
        QueryKind::RRMaxQ,
        QueryKind::RkMaxQ,
        QueryKind::Psv,
        QueryKind::Nsv,
        QueryKind::Plv,
        QueryKind::Nlv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueryKind::RMinQ => "RMINQ",
            QueryKind::RLMinQ => "RLMINQ",
            QueryKind::RRMinQ => "RRMINQ",
            QueryKind::RkMinQ => "RKMINQ",
            QueryKind::RMaxQ => "RMAXQ",
            QueryKind::RLMaxQ => "RLMAXQ",
            QueryKind::RRMaxQ => "RRMAXQ",
            QueryKind::RkMaxQ => "RKMAXQ",
            QueryKind::Psv => "PSV",
            QueryKind::Nsv => "NSV",
            QueryKind::Plv => "PLV",
            QueryKind::Nlv => "NLV",
        }
    }

    pub fn side(self) -> Side {
        match self {
            QueryKind::RMinQ | QueryKind::RLMinQ | QueryKind::RRMinQ | QueryKind::RkMinQ => Side::Min,
            QueryKind::Psv | QueryKind::Nsv => Side::Min,
            _ => Side::Max,
        }
    }

    /// Takes a range `[i, j]`.
    pub fn is_range(self) -> bool {
        !matches!(self, QueryKind::Psv | QueryKind::Nsv | QueryKind::Plv | QueryKind::Nlv)
    }

    /// Takes an occurrence index `k`.
    pub fn is_kth(self) -> bool {
        matches!(self, QueryKind::RkMinQ | QueryKind::RkMaxQ)
    }

    /// Needs node colors (only the colored encodings answer it).
    pub fn needs_colors(self) -> bool {
        matches!(
            self,
            QueryKind::RLMinQ
                | QueryKind::RkMinQ
                | QueryKind::RLMaxQ
                | QueryKind::RkMaxQ
                | QueryKind::Nsv
                | QueryKind::Nlv
        )
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QueryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let up = s.to_ascii_uppercase();
        QueryKind::ALL
            .into_iter()
            .find(|k| k.name() == up)
            .ok_or_else(|| Error::InvalidQuery(format!("unknown query kind {s:?}")))
    }
}

/// One query: `i` alone for the value queries, `[i, j]` for ranges, plus `k`
/// for the k-th occurrence kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuerySpec {
    pub kind: QueryKind,
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl QuerySpec {
    pub fn point(kind: QueryKind, i: usize) -> Self {
        QuerySpec { kind, i, j: i, k: 1 }
    }

    pub fn range(kind: QueryKind, i: usize, j: usize) -> Self {
        QuerySpec { kind, i, j, k: 1 }
    }

    pub fn kth(kind: QueryKind, i: usize, j: usize, k: usize) -> Self {
        QuerySpec { kind, i, j, k }
    }

    /// Checks the arguments against an array of length `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.i == 0 || self.i > n {
            return Err(Error::InvalidQuery(format!("{self}: i must be in 1..={n}")));
        }
        if self.kind.is_range() && (self.j < self.i || self.j > n) {
            return Err(Error::InvalidQuery(format!("{self}: need i <= j <= {n}")));
        }
        if self.kind.is_kth() && self.k == 0 {
            return Err(Error::InvalidQuery(format!("{self}: k must be at least 1")));
        }
        Ok(())
    }

    /// Every valid query on an array of length `n`, with `k` up to `max_k`.
    pub fn enumerate(n: usize, max_k: usize) -> Vec<QuerySpec> {
        let mut out = Vec::new();
        for kind in QueryKind::ALL {
            if !kind.is_range() {
                out.extend((1..=n).map(|i| QuerySpec::point(kind, i)));
                continue;
            }
            for i in 1..=n {
                for j in i..=n {
                    if kind.is_kth() {
                        out.extend((1..=max_k).map(|k| QuerySpec::kth(kind, i, j, k)));
                    } else {
                        out.push(QuerySpec::range(kind, i, j));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for QuerySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind.is_kth() {
            write!(f, "{} {} {} {}", self.kind, self.i, self.j, self.k)
        } else if self.kind.is_range() {
            write!(f, "{} {} {}", self.kind, self.i, self.j)
        } else {
            write!(f, "{} {}", self.kind, self.i)
        }
    }
}

impl FromStr for QuerySpec {
    type Err = Error;

    /// Parses `KIND i [j] [k]`, e.g. `RKMINQ 3 9 2` or `PSV 5`.
    fn from_str(line: &str) -> Result<Self> {
        let mut parts = line.split_whitespace();
        let kind: QueryKind = parts.next().ok_or_else(|| Error::InvalidQuery("empty line".into()))?.parse()?;
        let nums = parts
            .map(|t| t.parse::<usize>().map_err(|_| Error::InvalidQuery(format!("bad number {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let want = if kind.is_kth() {
            3
        } else if kind.is_range() {
            2
        } else {
            1
        };
        if nums.len() != want {
            return Err(Error::InvalidQuery(format!("{kind} takes {want} arguments, got {}", nums.len())));
        }
        Ok(match want {
            3 => QuerySpec::kth(kind, nums[0], nums[1], nums[2]),
            2 => QuerySpec::range(kind, nums[0], nums[1]),
            _ => QuerySpec::point(kind, nums[0]),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let q: QuerySpec = "RKMINQ 3 9 2".parse().unwrap();
        assert_eq!(q, QuerySpec::kth(QueryKind::RkMinQ, 3, 9, 2));
        assert_eq!(q.to_string(), "RKMINQ 3 9 2");
        let q: QuerySpec = "psv 5".parse().unwrap();
        assert_eq!(q, QuerySpec::point(QueryKind::Psv, 5));
        assert!("PSV 1 2".parse::<QuerySpec>().is_err());
        assert!("FOO 1".parse::<QuerySpec>().is_err());
        assert!("RMINQ 1 x".parse::<QuerySpec>().is_err());
        assert!("".parse::<QuerySpec>().is_err());
    }

    #[test]
    fn validation() {
        assert!(QuerySpec::range(QueryKind::RMinQ, 2, 1).validate(5).is_err());
        assert!(QuerySpec::range(QueryKind::RMinQ, 1, 6).validate(5).is_err());
        assert!(QuerySpec::kth(QueryKind::RkMinQ, 1, 2, 0).validate(5).is_err());
        assert!(QuerySpec::point(QueryKind::Nlv, 0).validate(5).is_err());
        assert!(QuerySpec::point(QueryKind::Nlv, 5).validate(5).is_ok());
    }

    #[test]
    fn enumeration_counts() {
        // 4 point kinds * n + 6 range kinds * n(n+1)/2 + 2 kth kinds * n(n+1)/2 * max_k
        let n = 4;
        assert_eq!(QuerySpec::enumerate(n, 3).len(), 4 * n + 6 * 10 + 2 * 10 * 3);
    }
}
