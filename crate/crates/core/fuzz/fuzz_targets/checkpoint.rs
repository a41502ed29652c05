#![no_main]

use eventrl::policy::{read_checkpoint, write_checkpoint};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(params) = read_checkpoint(text) {
        let written = write_checkpoint(&params);
        let again = read_checkpoint(&written).expect("written checkpoint reads back");
        assert_eq!(again, params);
        assert_eq!(write_checkpoint(&again), written);
    }
});
