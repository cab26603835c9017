//! The `conflict` command line.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::engine::analyze;
use crate::report::TraceReport;
use crate::sat::{
    lit_value, minimize_core, parse_assumptions, parse_dimacs, AssumptionId, SolveResult,
};
use crate::scenario::{parse_scenario, ScenarioDoc};
use crate::temporal::{encode_goal, TimedEncoding};
use crate::world::{bodies_by_atom, max_consistent_sets, StrategyMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNRESOLVED: i32 = 10;
pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;

#[derive(Parser, Debug)]
#[command(name = "conflict", about = "Goal conflict analysis between two agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Look for winning strategies, resolving conflicts when needed.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=4))]
        max_level: Option<u8>,
        #[arg(long, value_parser = ["sequence", "reactive"])]
        mode: Option<String>,
        /// Write the machine-readable report here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// List the maximal consistent evidence groups.
    Consistency { file: PathBuf },
    /// Solve a DIMACS CNF file.
    Sat {
        file: PathBuf,
        /// Print a minimal core of the assumptions when unsatisfiable.
        #[arg(long)]
        core: bool,
        /// File of assumption literals.
        #[arg(long)]
        assume: Option<PathBuf>,
    },
    /// Print only the justification chains of the conflicts found.
    Explain { file: PathBuf },
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Analyze { file, horizon, max_level, mode, out: path, budget } => {
            load(&file).and_then(|mut doc| {
                if let Some(h) = horizon {
                    doc.options.horizon = h;
                }
                if let Some(l) = max_level {
                    doc.options.max_level = l;
                }
                if let Some(m) = mode.as_deref().and_then(StrategyMode::from_name) {
                    doc.options.mode = m;
                }
                if let Some(b) = budget {
                    doc.options.budget = b;
                }
                cmd_analyze(&doc, path.as_deref(), out)
            })
        }
        Command::Consistency { file } => load(&file).and_then(|doc| cmd_consistency(&doc, out)),
        Command::Sat { file, core, assume } => cmd_sat(&file, core, assume.as_deref(), out),
        Command::Explain { file } => load(&file).and_then(|doc| cmd_explain(&doc, out)),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "{msg}");
            EXIT_INPUT
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<ScenarioDoc, String> {
    let text = read(path)?;
    parse_scenario(&text).map_err(|diags| {
        diags.iter().map(|d| format!("{}:{d}", path.display())).collect::<Vec<_>>().join("\n")
    })
}

fn report(doc: &ScenarioDoc) -> Result<TraceReport, String> {
    let analysis = analyze(&doc.problem()).map_err(|e| format!("error: {e}"))?;
    Ok(TraceReport::new(doc, analysis))
}

fn cmd_analyze(doc: &ScenarioDoc, path: Option<&Path>, out: &mut dyn Write) -> Result<i32, String> {
    let r = report(doc)?;
    if let Some(p) = path {
        std::fs::write(p, r.to_json()).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    let _ = out.write_all(r.human().as_bytes());
    Ok(if r.outcome.resolved { EXIT_OK } else { EXIT_UNRESOLVED })
}

fn cmd_explain(doc: &ScenarioDoc, out: &mut dyn Write) -> Result<i32, String> {
    let r = report(doc)?;
    let text = if r.chains.is_empty() { "no conflict\n".to_string() } else { r.chains_text() };
    let _ = out.write_all(text.as_bytes());
    Ok(EXIT_OK)
}

fn cmd_consistency(doc: &ScenarioDoc, out: &mut dyn Write) -> Result<i32, String> {
    let p = doc.problem();
    let h = p.options.horizon;
    let fail = |e: &dyn std::fmt::Display| format!("error: {e}");
    let ws = max_consistent_sets(&p.evidence, &p.facts, &p.world, h).map_err(|e| fail(&e))?;
    let mut enc = TimedEncoding::new(&p.world, h).map_err(|e| fail(&e))?;
    for f in &p.facts {
        let timed = encode_goal(f, h, 0).map_err(|e| fail(&e))?;
        enc.assert_timed(&timed).map_err(|e| fail(&e))?;
    }
    let bodies = bodies_by_atom(&p.evidence);
    let mut solver_lits = Vec::new();
    for g in &ws.groups {
        let mut lits = Vec::new();
        for a in &g.members {
            lits.push(enc.goal_lit(&bodies[a], 0).map_err(|e| fail(&e))?);
        }
        solver_lits.push(lits);
    }
    let mut solver = enc.solver();
    let _ = writeln!(out, "{} group(s)", ws.groups.len());
    for (n, (g, lits)) in ws.groups.iter().zip(&solver_lits).enumerate() {
        let members: Vec<&str> = g.members.iter().map(String::as_str).collect();
        let _ = writeln!(out, "group {n}: {{{}}}", members.join(", "));
        if let SolveResult::Sat(model) = solver.solve_lits(lits) {
            let state: Vec<String> = p
                .world
                .vars
                .iter()
                .map(|v| {
                    let on = enc.state_lit(v, 0).is_some_and(|l| lit_value(&model, l));
                    if on { v.clone() } else { format!("!{v}") }
                })
                .collect();
            let _ = writeln!(out, "  sample state: {}", state.join(" "));
        }
    }
    if !ws.degenerate.is_empty() {
        let _ = writeln!(out, "degenerate: {{{}}}", ws.degenerate.join(", "));
    }
    Ok(EXIT_OK)
}

fn cmd_sat(path: &Path, want_core: bool, assume: Option<&Path>, out: &mut dyn Write) -> Result<i32, String> {
    let text = read(path)?;
    let mut problem = parse_dimacs(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(a) = assume {
        let text = read(a)?;
        let lits = parse_assumptions(&text, problem.num_vars).map_err(|e| format!("{}: {e}", a.display()))?;
        problem.assumptions = lits.into_iter().enumerate().map(|(k, l)| (AssumptionId(k as u32), l)).collect();
    }
    let fail = |e: crate::sat::SatError| format!("error: {e}");
    match problem.solve().map_err(fail)? {
        SolveResult::Sat(model) => {
            let lits: Vec<String> = model
                .iter()
                .enumerate()
                .map(|(v, &b)| if b { format!("{}", v + 1) } else { format!("-{}", v + 1) })
                .collect();
            let _ = writeln!(out, "SAT");
            let _ = writeln!(out, "{}", lits.join(" "));
            Ok(EXIT_SAT)
        }
        SolveResult::Unsat(core) => {
            let _ = writeln!(out, "UNSAT");
            if want_core {
                let core: BTreeSet<AssumptionId> = minimize_core(&problem, &core).map_err(fail)?;
                let lits: Vec<String> = problem
                    .assumptions
                    .iter()
                    .filter(|(id, _)| core.contains(id))
                    .map(|(_, l)| l.to_dimacs().to_string())
                    .collect();
                let _ = writeln!(out, "core: {}", lits.join(" "));
            }
            Ok(EXIT_UNSAT)
        }
    }
}
