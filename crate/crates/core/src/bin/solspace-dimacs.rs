//! Competition-style front end to the internal solver: reads a DIMACS file,
//! prints `s`/`v` lines and exits with 10 (SAT), 20 (UNSAT) or 0 (unknown).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use solspace::formulas::dimacs_parse;
use solspace::solver::{solve_with, DEFAULT_CONFLICT_BUDGET};
use solspace::{SolveStatus, SolverConfig};

#[derive(Parser)]
#[command(name = "solspace-dimacs", version)]
struct Cli {
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CONFLICT_BUDGET)]
    budget: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("c cannot read {}: {e}", cli.input.display());
            return ExitCode::from(1);
        }
    };
    let f = match dimacs_parse(&text) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("c {e}");
            return ExitCode::from(1);
        }
    };
    let r = match solve_with(&f, &[], SolverConfig::default().with_budget(cli.budget)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("c {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(c) = r.conflicts() {
        println!("c conflicts {c}");
    }
    match r.status {
        SolveStatus::Sat => {
            println!("s SATISFIABLE");
            let w = r.witness.expect("SAT result has a witness");
            let lits: Vec<String> = (0..f.num_vars)
                .map(|i| if w.get(i) { format!("{}", i + 1) } else { format!("-{}", i + 1) })
                .collect();
            for chunk in lits.chunks(16) {
                println!("v {}", chunk.join(" "));
            }
            println!("v 0");
            ExitCode::from(10)
        }
        SolveStatus::Unsat => {
            println!("s UNSATISFIABLE");
            ExitCode::from(20)
        }
        SolveStatus::BudgetExhausted => {
            println!("s UNKNOWN");
            ExitCode::SUCCESS
        }
    }
}
