#![no_main]

use libfuzzer_sys::fuzz_target;
use srq_core::bitseq::BitSeq;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = BitSeq::from_bytes(data) else { return };
    let len = s.len();
    for i in [0, len / 3, len / 2, len] {
        let ones = s.rank1(i);
        if ones > 0 {
            assert!(s.select1(ones).unwrap() <= i);
        }
        if i > 0 {
            let _ = s.get(i);
        }
    }
    let _ = s.bits_at(0, len.min(64));
    assert_eq!(s.count_ones() + s.count_zeros(), len);
});
