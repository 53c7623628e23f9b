#![no_main]

use libfuzzer_sys::fuzz_target;
use srq_core::io::parse_query_script;
use srq_core::query::QuerySpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(qs) = parse_query_script(text) {
        for (_, q) in qs {
            assert_eq!(q.to_string().parse::<QuerySpec>().unwrap(), q);
        }
    }
});
