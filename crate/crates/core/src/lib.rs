//! Succinct encodings of an integer array that answer range minimum and
//! maximum queries (rightmost, leftmost and k-th occurrence) and previous or
//! next smaller and larger value queries without access to the array.

pub mod bitseq;
pub mod bp;
pub mod cheap_query;
pub mod dfuds;
pub mod combined;
pub mod error;
pub mod heap_build;
pub mod io;
pub mod oracle;
pub mod query;
mod wire;

pub use error::{Error, Result};
