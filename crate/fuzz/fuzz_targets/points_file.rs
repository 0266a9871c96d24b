#![no_main]

use libfuzzer_sys::fuzz_target;
use skew_cli::spec::parse_points;

fuzz_target!(|data: &[u8]| {
    // first byte picks the arity, the rest is the file
    let Some((&arity, rest)) = data.split_first() else { return };
    if let Ok(s) = std::str::from_utf8(rest) {
        if let Ok(points) = parse_points(s, 1 + arity as usize % 3) {
            assert!(points.iter().all(|p| p.len() == 1 + arity as usize % 3));
        }
    }
});
