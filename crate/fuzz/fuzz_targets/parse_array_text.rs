#![no_main]

use libfuzzer_sys::fuzz_target;
use srq_core::io::{parse_array_text, write_array_text};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(a) = parse_array_text(text) {
        assert_eq!(parse_array_text(&write_array_text(&a)).unwrap(), a);
    }
});
