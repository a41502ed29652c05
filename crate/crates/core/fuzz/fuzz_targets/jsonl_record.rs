#![no_main]

use eventrl::corpus::{read_jsonl, write_jsonl};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(samples) = read_jsonl(text) {
        let written = write_jsonl(&samples);
        let again = read_jsonl(&written).expect("written records read back");
        assert_eq!(again, samples);
        assert_eq!(write_jsonl(&again), written);
    }
});
