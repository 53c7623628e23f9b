#![no_main]

use libfuzzer_sys::fuzz_target;
use srq_core::combined::CombinedEncoding;
use srq_core::query::{QueryKind, QuerySpec};

fuzz_target!(|data: &[u8]| {
    let Ok(e) = CombinedEncoding::from_bytes(data) else { return };
    assert_eq!(e.to_bytes(), data);
    let n = e.n();
    for kind in QueryKind::ALL {
        let q = if kind.is_kth() {
            QuerySpec::kth(kind, 1, n, 2)
        } else if kind.is_range() {
            QuerySpec::range(kind, 1, n)
        } else {
            QuerySpec::point(kind, n)
        };
        let _ = e.query(&q);
    }
    let _ = e.space_report();
});
