//! Walk strategies that try to reach a designated target cluster.
//!
//! Every walk starts from the reference solution (the default solver's
//! unconstrained model) and records one state per step, beginning with the
//! start state at step 0. A step hits when its state satisfies the formula
//! and lies within `tau` of the target; the walk stops at the first hit.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::formulas::CnfFormula;
use crate::rng;
use crate::shattering::{distinct_witnesses, forced_probe_sample_with, run_probe, ProbeOptions, DEFAULT_FRACTION};
use crate::solver::{solve, SolveStatus, Solver, SolverConfig, DEFAULT_CONFLICT_BUDGET};

pub const DEFAULT_STEPS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    /// Independent forced probes.
    S1,
    /// Solution-preserving single flips.
    S2,
    /// Re-solving with fresh random phases, blocking visited witnesses.
    S3,
    /// Greedy descent on the differing bits, guided by the target.
    S4,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::S1, Strategy::S2, Strategy::S3, Strategy::S4];

    pub fn knows_target(self) -> bool {
        self == Strategy::S4
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S1" => Ok(Strategy::S1),
            "S2" => Ok(Strategy::S2),
            "S3" => Ok(Strategy::S3),
            "S4" => Ok(Strategy::S4),
            _ => Err(Error::InvalidParameters(format!("unknown strategy '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub target: Assignment,
    pub tau: usize,
}

impl TargetSpec {
    pub fn new(f: &CnfFormula, target: Assignment, tau: usize) -> Result<Self> {
        if target.len() != f.num_vars || !f.is_satisfied_by(&target) {
            return Err(Error::WitnessRejected("target does not satisfy the formula".into()));
        }
        Ok(Self { target, tau })
    }

    fn hit(&self, f: &CnfFormula, a: &Assignment) -> (bool, bool) {
        let sat = f.is_satisfied_by(a);
        (sat, sat && a.hamming(&self.target) <= self.tau)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkStep {
    pub step_index: usize,
    pub assignment: Assignment,
    pub satisfies: bool,
    pub hit_target: bool,
    pub distance_to_target: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkTrace {
    pub strategy: Strategy,
    pub steps: Vec<WalkStep>,
    pub hit_step: Option<usize>,
    /// Moves allowed after the start state.
    pub budget: usize,
    pub seed: u64,
    /// Wall time per step in seconds, aligned with `steps`.
    #[serde(default)]
    pub step_seconds: Vec<f64>,
}

impl WalkTrace {
    pub fn hit(&self) -> bool {
        self.hit_step.is_some()
    }

    /// Whether the distance to the target drops at every move.
    pub fn strictly_approaches(&self) -> bool {
        self.steps
            .windows(2)
            .all(|w| w[1].distance_to_target < w[0].distance_to_target)
    }
}

/// The default solver's unconstrained model, the start of every walk.
pub fn reference_solution(f: &CnfFormula) -> Result<Assignment> {
    let r = solve(f, &[])?;
    match r.status {
        SolveStatus::Sat => Ok(r.witness.expect("verified SAT result has a witness")),
        SolveStatus::Unsat => Err(Error::UnsupportedInput("formula is unsatisfiable".into())),
        SolveStatus::BudgetExhausted => Err(Error::BudgetExhausted {
            budget: DEFAULT_CONFLICT_BUDGET,
        }),
    }
}

/// Forced probes followed by the witness farthest from the reference
/// solution; ties go to the smallest assignment.
pub fn select_target(f: &CnfFormula, probes: usize, tau: usize, seed: u64) -> Result<TargetSpec> {
    let reference = reference_solution(f)?;
    let records = forced_probe_sample_with(f, DEFAULT_FRACTION, probes, seed, &ProbeOptions::default())?;
    let target = distinct_witnesses(&records)
        .into_iter()
        .map(|w| (std::cmp::Reverse(w.hamming(&reference)), w))
        .min()
        .map(|(_, w)| w)
        .ok_or_else(|| Error::InsufficientSample("no forced probe found a witness".into()))?;
    TargetSpec::new(f, target, tau)
}

/// One walk from the reference solution.
pub fn run_walk(f: &CnfFormula, strategy: Strategy, target: &TargetSpec, budget: usize, seed: u64) -> Result<WalkTrace> {
    let start = reference_solution(f)?;
    run_walk_from(f, strategy, target, &start, budget, seed)
}

/// One walk from `start`, which must satisfy `f`.
pub fn run_walk_from(
    f: &CnfFormula,
    strategy: Strategy,
    target: &TargetSpec,
    start: &Assignment,
    budget: usize,
    seed: u64,
) -> Result<WalkTrace> {
    if !f.is_satisfied_by(&target.target) {
        return Err(Error::WitnessRejected("target does not satisfy the formula".into()));
    }
    if !f.is_satisfied_by(start) {
        return Err(Error::WitnessRejected("start state does not satisfy the formula".into()));
    }
    let mut rng = rng::stream(seed, 0);
    let mut trace = WalkTrace {
        strategy,
        steps: Vec::with_capacity(budget + 1),
        hit_step: None,
        budget,
        seed,
        step_seconds: Vec::with_capacity(budget + 1),
    };
    let record = |trace: &mut WalkTrace, a: &Assignment, forced_miss: bool, t0: Instant| {
        let (sat, hit) = target.hit(f, a);
        let hit = hit && !forced_miss;
        let step_index = trace.steps.len();
        trace.steps.push(WalkStep {
            step_index,
            assignment: a.clone(),
            satisfies: sat,
            hit_target: hit,
            distance_to_target: a.hamming(&target.target),
        });
        trace.step_seconds.push(t0.elapsed().as_secs_f64());
        if hit {
            trace.hit_step = Some(step_index);
        }
        hit
    };

    let mut state = start.clone();
    if record(&mut trace, &state, false, Instant::now()) {
        return Ok(trace);
    }
    let mut s3 = (strategy == Strategy::S3).then(|| {
        let mut solver = Solver::from_formula(f, SolverConfig::default());
        solver.add_clause(&crate::solver::blocking_clause(&state));
        solver
    });
    for step in 1..=budget {
        let t0 = Instant::now();
        let mut forced_miss = false;
        match strategy {
            Strategy::S1 => match s1_move(f, step, seed)? {
                Some(w) => state = w,
                None => forced_miss = true,
            },
            Strategy::S2 => {
                let i = rng.gen_range(0..f.num_vars.max(1));
                if f.num_vars > 0 {
                    state.flip(i);
                    if !f.is_satisfied_by(&state) {
                        state.flip(i);
                    }
                }
            }
            Strategy::S3 => {
                let solver = s3.as_mut().expect("S3 solver");
                solver.reseed_phases(rng.gen());
                let r = solver.solve(&[])?;
                match r.witness {
                    Some(w) if r.status == SolveStatus::Sat => {
                        if !f.is_satisfied_by(&w) {
                            return Err(Error::WitnessRejected("S3 witness failed re-verification".into()));
                        }
                        solver.add_clause(&crate::solver::blocking_clause(&w));
                        state = w;
                    }
                    _ => forced_miss = true,
                }
            }
            Strategy::S4 => {
                if let Some(i) = greedy_flip(f, &state, &target.target) {
                    state.flip(i);
                }
            }
        }
        if record(&mut trace, &state, forced_miss, t0) {
            break;
        }
        debug_assert_eq!(trace.steps.len(), step + 1);
    }
    Ok(trace)
}

/// S1's move at `step`: one forced probe.
fn s1_move(f: &CnfFormula, step: usize, seed: u64) -> Result<Option<Assignment>> {
    let probe = run_probe(f, DEFAULT_FRACTION, step, rng::derive(seed, 1), &ProbeOptions::default())?;
    Ok(probe.witness().cloned())
}

/// The differing variable whose flip leaves the most clauses satisfied;
/// ties go to the lowest index.
fn greedy_flip(f: &CnfFormula, state: &Assignment, target: &Assignment) -> Option<usize> {
    let mut probe = state.clone();
    state
        .differing(target)
        .into_iter()
        .map(|i| {
            probe.flip(i);
            let score = f.count_satisfied(&probe);
            probe.flip(i);
            (std::cmp::Reverse(score), i)
        })
        .min()
        .map(|(_, i)| i)
}

/// Step allowance under which S4 always reaches its target: one move per
/// variable covers any starting distance.
pub fn s4_budget(steps: usize, n: usize) -> usize {
    steps.max(n)
}

/// `trials` independent walks; trial `t` uses seed `derive(seed, t)`.
pub fn run_trials(
    f: &CnfFormula,
    strategy: Strategy,
    target: &TargetSpec,
    budget: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<WalkTrace>> {
    if trials == 0 {
        return Err(Error::InvalidParameters("trials must be >= 1".into()));
    }
    let start = reference_solution(f)?;
    (0..trials)
        .into_par_iter()
        .map(|t| run_walk_from(f, strategy, target, &start, budget, rng::derive(seed, t as u64)))
        .collect()
}

/// Fraction of trials that hit the target.
pub fn hit_rate(f: &CnfFormula, strategy: Strategy, target: &TargetSpec, budget: usize, trials: usize, seed: u64) -> Result<f64> {
    let traces = run_trials(f, strategy, target, budget, trials, seed)?;
    Ok(traces.iter().filter(|t| t.hit()).count() as f64 / trials as f64)
}

/// Fraction of forced probes that return a witness.
pub fn probe_success_rate(f: &CnfFormula, probes: usize, seed: u64) -> Result<f64> {
    let recs = forced_probe_sample_with(f, DEFAULT_FRACTION, probes, seed, &ProbeOptions::default())?;
    Ok(recs.iter().filter(|r| r.witness().is_some()).count() as f64 / probes as f64)
}
