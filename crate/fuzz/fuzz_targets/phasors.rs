#![no_main]

use gridspect::io::{parse_phasors, write_phasors};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ds) = parse_phasors(text) {
        let again = parse_phasors(&write_phasors(&ds)).expect("written phasors parse");
        assert_eq!(again, ds);
    }
});
