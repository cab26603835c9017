#![no_main]

use conflict_core::scenario::{parse_scenario, render_scenario};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    match parse_scenario(text) {
        Ok(doc) => {
            let again = parse_scenario(&render_scenario(&doc)).expect("rendered documents parse");
            assert_eq!(again, doc);
        }
        Err(diags) => assert!(!diags.is_empty()),
    }
});
