#![no_main]

use gridspect::evaluation::plan_from_config;
use gridspect::io::parse_config;
use libfuzzer_sys::fuzz_target;

// Parses a run configuration and builds the plan without loading networks.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_config(text) {
        let _ = plan_from_config(&cfg);
    }
});
