#![no_main]

use libfuzzer_sys::fuzz_target;
use skew_cli::spec::parse_expr;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(e) = parse_expr(s) {
            // printing must produce something the parser accepts again
            let printed = e.to_string();
            assert_eq!(parse_expr(&printed).as_ref(), Ok(&e), "reprint of {s:?} is {printed:?}");
        }
    }
});
