#![no_main]

use libfuzzer_sys::fuzz_target;
use skew_cli::spec::parse_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_spec(s) else { return };
    let printed = spec.to_string();
    let again = parse_spec(&printed).unwrap_or_else(|e| panic!("reprint rejected: {e}\n{printed}"));
    assert_eq!(again, spec);
    assert_eq!(again.to_string(), printed);
});
