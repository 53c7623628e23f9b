#![no_main]

use libfuzzer_sys::fuzz_target;
use srq_core::io::{parse_array, parse_array_binary, write_array_binary};

fuzz_target!(|data: &[u8]| {
    if let Ok(a) = parse_array_binary(data) {
        assert_eq!(write_array_binary(&a), data);
    }
    let _ = parse_array(data);
});
