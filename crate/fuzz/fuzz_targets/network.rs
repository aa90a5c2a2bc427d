#![no_main]

use gridspect::io::{parse_network, write_network};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_network(text) {
        let again = parse_network(&write_network(&spec)).expect("written network parses");
        assert_eq!(again, spec);
    }
});
