#![no_main]

use gridspect::io::{parse_estimate, write_estimate};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = parse_estimate(text) {
        let again = parse_estimate(&write_estimate(&file)).expect("written estimate parses");
        assert_eq!(again, file);
    }
});
