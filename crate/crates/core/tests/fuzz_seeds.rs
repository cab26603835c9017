//! Replays the checked-in fuzz seeds through the invariants the fuzz targets assert.

use std::path::PathBuf;

use conflict_core::logic::parse_formula;
use conflict_core::sat::{parse_assumptions, parse_dimacs, write_dimacs};
use conflict_core::scenario::{parse_scenario, render_scenario};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .expect("seed directory")
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn scenario_seeds_parse_and_round_trip() {
    for (name, data) in seeds("parse_scenario") {
        let doc = parse_scenario(std::str::from_utf8(&data).unwrap()).unwrap_or_else(|d| panic!("{name}: {d:?}"));
        assert_eq!(parse_scenario(&render_scenario(&doc)).unwrap(), doc, "{name}");
    }
}

#[test]
fn formula_seeds_parse_and_round_trip() {
    for (name, data) in seeds("parse_formula") {
        let f = parse_formula(std::str::from_utf8(&data).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "{name}");
    }
}

#[test]
fn dimacs_seeds_parse_and_round_trip() {
    for (name, data) in seeds("parse_dimacs") {
        let p = parse_dimacs(std::str::from_utf8(&data).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_dimacs(&write_dimacs(&p)).unwrap(), p, "{name}");
        p.solve().unwrap();
    }
}

#[test]
fn assumption_seeds_parse_within_range() {
    for (name, data) in seeds("parse_assumptions") {
        let (&n, rest) = data.split_first().unwrap();
        let lits = parse_assumptions(std::str::from_utf8(rest).unwrap(), u32::from(n))
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!lits.is_empty() && lits.iter().all(|l| l.var() <= u32::from(n)), "{name}");
    }
}
