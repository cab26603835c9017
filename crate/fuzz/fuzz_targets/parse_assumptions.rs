#![no_main]

use conflict_core::sat::parse_assumptions;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    if let Ok(lits) = parse_assumptions(text, u32::from(n)) {
        assert!(lits.iter().all(|l| l.var() <= u32::from(n)));
    }
});
