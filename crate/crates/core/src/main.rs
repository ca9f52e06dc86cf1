use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use solspace::drunkwalk::Strategy;
use solspace::harness::config::{Charges, Experiment, ExperimentConfig, Family};
use solspace::harness::{report, run};
use solspace::scaling::FitModel;
use solspace::Error;

#[derive(Parser)]
#[command(name = "solspace", version, about = "Measure the topology and search geometry of CNF solution spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instances and write them as DIMACS.
    Gen(ExpArgs),
    /// Solve instances with the internal or an external solver.
    Solve(ExpArgs),
    /// Betti numbers of small solution sets.
    Homology(ExpArgs),
    /// Forced-probe clustering of the solution space.
    Shatter(ExpArgs),
    /// Walk strategies toward a distant target solution.
    Drunkwalk(ExpArgs),
    /// XOR closure of sampled solutions.
    Xortest(ExpArgs),
    /// Conflict scaling and fits.
    Scaling(ExpArgs),
    /// Summarise the runs stored under a directory.
    Report {
        #[arg(default_value = "runs")]
        path: PathBuf,
    },
}

#[derive(Args, Default)]
struct ExpArgs {
    /// JSON config; flags given on the command line override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<Family>,
    #[arg(short, long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(short, long)]
    k: Option<usize>,
    /// Expander side for tseitin instances.
    #[arg(short, long)]
    m: Option<usize>,
    #[arg(long)]
    charges: Option<Charges>,
    /// DIMACS file to use instead of a generated family.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    fraction: Option<f64>,
    #[arg(long)]
    probes: Option<usize>,
    #[arg(long)]
    tau: Option<usize>,
    /// Conflict budget per solver call.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    triples: Option<usize>,
    /// Comma-separated sizes for scaling runs.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    seeds_per_size: Option<usize>,
    /// Instances per run.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    max_dim: Option<usize>,
    /// Comma-separated subset of S1,S2,S3,S4.
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<Strategy>>,
    #[arg(long, value_parser = parse_model)]
    fit_model: Option<FitModel>,
    #[arg(long)]
    payload_n: Option<usize>,
    #[arg(long)]
    payload_alpha: Option<f64>,
    /// Keep unsatisfiable draws instead of replacing them.
    #[arg(long)]
    allow_unsat: bool,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// External solver; defaults to $SOLSPACE_SOLVER.
    #[arg(long)]
    solver_path: Option<PathBuf>,
    /// Print the resolved config and exit.
    #[arg(long)]
    dry_run: bool,
}

fn parse_model(s: &str) -> Result<FitModel, String> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| format!("unknown fit model '{s}' (exp-linear or exp-two-thirds)"))
}

impl ExpArgs {
    fn into_config(self, exp: Experiment) -> Result<ExperimentConfig, Error> {
        let mut c = match &self.config {
            Some(p) => {
                let c = ExperimentConfig::load(p)?;
                if c.experiment != exp {
                    return Err(Error::InvalidParameters(format!(
                        "{} holds a {} config, not {exp}",
                        p.display(),
                        c.experiment
                    )));
                }
                c
            }
            None => ExperimentConfig::new(exp),
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        macro_rules! set_opt {
            ($($f:ident),*) => { $( if self.$f.is_some() { c.$f = self.$f; } )* };
        }
        set!(family, k, charges, fraction, probes, budget, steps, trials, triples, sizes, seeds_per_size, seeds, max_dim);
        set!(strategies, payload_alpha, master_seed, workers, output_dir);
        set_opt!(n, alpha, m, input, tau, fit_model, payload_n, solver_path);
        if self.allow_unsat {
            c.require_sat = false;
        }
        Ok(c)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParameters(_) | Error::Json(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (exp, args) = match cli.command {
        Command::Report { path } => {
            return match report(&path) {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            };
        }
        Command::Gen(a) => (Experiment::Gen, a),
        Command::Solve(a) => (Experiment::Solve, a),
        Command::Homology(a) => (Experiment::Homology, a),
        Command::Shatter(a) => (Experiment::Shatter, a),
        Command::Drunkwalk(a) => (Experiment::Drunkwalk, a),
        Command::Xortest(a) => (Experiment::Xortest, a),
        Command::Scaling(a) => (Experiment::Scaling, a),
    };
    let dry_run = args.dry_run;
    let config = match args.into_config(exp) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if dry_run {
        return match config.validate() {
            Ok(()) => {
                println!("{}", config.to_json());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        };
    }
    match run(&config) {
        Ok(rec) => {
            println!("{}", rec.run_dir.display());
            println!("{}", serde_json::to_string_pretty(&rec.summary).unwrap_or_default());
            if rec.failed_items() > 0 {
                eprintln!("{} of {} items failed; see run.json", rec.failed_items(), rec.items.len());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let Error::Config(errs) = &e {
                for fe in errs {
                    eprintln!("invalid {fe}");
                }
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
