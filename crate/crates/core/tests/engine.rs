mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;

use conflict_core::engine::{analyze, verify_cause, EngineError, TraceEvent, WORLD_ATOM};
use conflict_core::report::{TraceReport, SCHEMA};
use conflict_core::scenario::{parse_scenario, ScenarioDoc};
use conflict_core::temporal::encode_goal;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::*;

fn load(name: &str) -> ScenarioDoc {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    parse_scenario(&std::fs::read_to_string(p).unwrap()).unwrap()
}

const CORPUS: [&str; 6] = [
    "ex1_evidence.scn",
    "ex3_stay_lane.scn",
    "ex4_observation.scn",
    "ex5_strategy.scn",
    "ex6_goals.scn",
    "ex7_sacrifice.scn",
];

#[test]
fn every_corpus_cause_is_a_real_contradiction() {
    let mut seen = 0;
    for name in CORPUS {
        let doc = load(name);
        let p = doc.problem();
        let a = analyze(&p).unwrap();
        for c in &a.causes {
            assert!(verify_cause(&p, c).unwrap(), "{name}: {:?}", c.chain());
            assert!(c.violated_goals.iter().all(|g| c.joint_goals.contains(g)));
            assert!(c.atoms.iter().all(|x| x == WORLD_ATOM || c.members.contains(x)));
            seen += 1;
        }
    }
    assert!(seen > 0);
}

#[test]
fn causes_are_referenced_by_events() {
    let a = analyze(&load("ex4_observation.scn").problem()).unwrap();
    let referenced: BTreeSet<usize> = a
        .events
        .iter()
        .filter_map(|e| match e {
            TraceEvent::Cause { index, .. } => Some(*index),
            _ => None,
        })
        .collect();
    assert_eq!(referenced, (0..a.causes.len()).collect());
    let radar_blamed = a.causes.iter().any(|c| c.atoms.contains("radar") && c.rivals.contains("lidar"));
    assert!(radar_blamed);
}

#[test]
fn report_json_round_trips() {
    for name in CORPUS {
        let doc = load(name);
        let r = TraceReport::new(&doc, analyze(&doc.problem()).unwrap());
        assert_eq!(r.schema, SCHEMA);
        let back = TraceReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r, "{name}");
        assert_eq!(parse_scenario(&r.input).unwrap(), doc, "{name}");
    }
}

#[test]
fn level_bound_is_enforced() {
    let mut p = load("ex3_stay_lane.scn").problem();
    p.options.max_level = 5;
    assert_eq!(analyze(&p).unwrap_err(), EngineError::InvalidLevel(5));
}

#[test]
fn joint_budget_is_enforced() {
    let mut p = load("ex3_stay_lane.scn").problem();
    p.options.budget = 30;
    assert!(analyze(&p).is_err());
}

#[test]
fn ladder_stops_at_the_requested_level() {
    for (name, needed) in [("ex4_observation.scn", 1u8), ("ex5_strategy.scn", 2), ("ex6_goals.scn", 3), ("ex7_sacrifice.scn", 4)] {
        let mut p = load(name).problem();
        p.options.max_level = needed - 1;
        let o = analyze(&p).unwrap().outcome;
        assert!(!o.resolved, "{name} resolved below level {needed}");
        p.options.max_level = needed;
        let o = analyze(&p).unwrap().outcome;
        assert!(o.resolved && o.level == needed, "{name}: {o:?}");
    }
}

#[test]
fn conflict_verdict_matches_brute_force_on_many_problems() {
    let mut rng = StdRng::seed_from_u64(61);
    let mut conflicts = 0;
    let mut checked = 0;
    while checked < 400 {
        let p = random_problem(&mut rng);
        let Some(expected) = problem_verdict(&p) else { continue };
        let got = analyze(&p).unwrap().outcome.conflict_at_start;
        assert_eq!(got, expected, "problem {checked}: {p:#?}");
        conflicts += usize::from(expected);
        checked += 1;
    }
    assert!(conflicts > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn encoding_agrees_with_trace_semantics_on_simulated_runs(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let w = random_world(&mut rng);
        let h = (seed % 4) as usize;
        let f = random_formula(&mut rng, &w.vars, 4, true);
        for run in simulate(&w, h).iter().take(20) {
            for at in 0..=h {
                let enc = encode_goal(&f, h, at).unwrap();
                let got = enc.eval_prop(&|v| {
                    let (name, t) = v.split_once('@').unwrap();
                    run.holds(name, t.parse().unwrap())
                });
                prop_assert_eq!(got, Some(holds_on_run(&f, run, at)));
            }
        }
    }

    #[test]
    fn groups_are_consistent_maximal_and_cover_live_atoms(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let w = random_world(&mut rng);
        let evidence = random_evidence(&mut rng, &w, 5, 3);
        let ws = conflict_core::world::max_consistent_sets(&evidence, &[], &w, 2).unwrap();
        let live: BTreeSet<String> = bodies(&evidence).into_keys().filter(|a| !ws.degenerate.contains(a)).collect();
        let covered: BTreeSet<String> = ws.groups.iter().flat_map(|g| g.members.iter().cloned()).collect();
        prop_assert_eq!(covered, live);
        for (i, g) in ws.groups.iter().enumerate() {
            for (j, other) in ws.groups.iter().enumerate() {
                prop_assert!(i == j || !g.members.is_subset(&other.members));
            }
        }
    }
}
