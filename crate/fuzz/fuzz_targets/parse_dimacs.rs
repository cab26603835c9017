#![no_main]

use conflict_core::sat::{parse_dimacs, write_dimacs};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_dimacs(text) {
        assert_eq!(parse_dimacs(&write_dimacs(&p)).expect("written problems parse"), p);
        if p.num_vars <= 64 && p.clauses.len() <= 256 {
            let _ = p.solve();
        }
    }
});
