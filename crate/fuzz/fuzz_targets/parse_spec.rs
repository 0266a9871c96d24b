#![no_main]

use libfuzzer_sys::fuzz_target;
use skew_cli::spec::parse_spec;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = parse_spec(s);
    }
});
