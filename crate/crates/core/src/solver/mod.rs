//! Deciding, enumerating and instrumenting CNF solving.

mod cdcl;
mod enumerate;
mod external;

pub use cdcl::{luby, solver_seed, Solver, SolverFingerprint};
pub use enumerate::{brute_force, enumerate_solutions, BRUTE_FORCE_MAX_VARS};
pub(crate) use enumerate::blocking_clause;
pub use external::{external_solve, resolve_solver_path, SOLVER_ENV};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::formulas::{CnfFormula, Literal};

pub const DEFAULT_CONFLICT_BUDGET: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Seeds random phase initialisation when `random_polarity` is set.
    pub seed: u64,
    pub random_polarity: bool,
    /// Conflicts allowed per call to `solve`.
    pub conflict_budget: u64,
    pub var_decay: f64,
    /// Conflicts per Luby unit.
    pub restart_base: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            random_polarity: false,
            conflict_budget: DEFAULT_CONFLICT_BUDGET,
            var_decay: 0.95,
            restart_base: 64,
        }
    }
}

impl SolverConfig {
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.conflict_budget = budget;
        self
    }

    pub fn with_random_polarity(mut self, seed: u64) -> Self {
        self.random_polarity = true;
        self.seed = seed;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Sat,
    Unsat,
    BudgetExhausted,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Sat => "SAT",
            SolveStatus::Unsat => "UNSAT",
            SolveStatus::BudgetExhausted => "BUDGET",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub witness: Option<Assignment>,
    /// Search counters; absent for results from an external solver.
    pub stats: Option<SearchStats>,
    pub wall_time: f64,
}

impl SolveResult {
    pub fn conflicts(&self) -> Option<u64> {
        self.stats.map(|s| s.conflicts)
    }

    pub fn is_sat(&self) -> bool {
        self.status == SolveStatus::Sat
    }
}

/// Rejects results whose status and witness disagree, or whose witness
/// does not satisfy `f`.
pub fn verify_result(f: &CnfFormula, r: &SolveResult) -> Result<()> {
    match (&r.status, &r.witness) {
        (SolveStatus::Sat, Some(w)) => {
            if w.len() != f.num_vars {
                return Err(Error::WitnessRejected(format!(
                    "witness has {} variables, formula has {}",
                    w.len(),
                    f.num_vars
                )));
            }
            if let Some(ci) = f.clauses.iter().position(|c| !c.iter().any(|l| l.is_true_under(w))) {
                return Err(Error::WitnessRejected(format!("clause {ci} is falsified")));
            }
            Ok(())
        }
        (SolveStatus::Sat, None) => Err(Error::WitnessRejected("SAT result without witness".into())),
        (_, Some(_)) => Err(Error::WitnessRejected("non-SAT result carries a witness".into())),
        (_, None) => Ok(()),
    }
}

/// Solves `f` under `assumptions` with the default configuration.
pub fn solve(f: &CnfFormula, assumptions: &[Literal]) -> Result<SolveResult> {
    solve_with(f, assumptions, SolverConfig::default())
}

/// Solves `f` with a fresh solver; every SAT witness is re-checked
/// against `f` before it is returned.
pub fn solve_with(f: &CnfFormula, assumptions: &[Literal], config: SolverConfig) -> Result<SolveResult> {
    f.validate()?;
    let mut s = Solver::from_formula(f, config);
    let r = s.solve(assumptions)?;
    verify_result(f, &r)?;
    if let Some(w) = &r.witness {
        if let Some(a) = assumptions.iter().find(|a| !a.is_true_under(w)) {
            return Err(Error::WitnessRejected(format!("assumption {a} violated")));
        }
    }
    Ok(r)
}

/// An explicit set of satisfying assignments, sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub n: usize,
    pub members: Vec<Assignment>,
    /// True iff enumeration was exhaustive.
    pub complete: bool,
}

impl SolutionSet {
    /// Canonicalises `members` (sort + dedup).
    pub fn new(n: usize, mut members: Vec<Assignment>, complete: bool) -> Self {
        assert!(members.iter().all(|m| m.len() == n), "member length mismatch");
        members.sort();
        members.dedup();
        Self { n, members, complete }
    }

    /// All of `{0,1}^n`.
    pub fn full_cube(n: usize) -> Self {
        assert!(n <= 24);
        Self::new(n, (0..1u64 << n).map(|w| Assignment::from_u64(w, n)).collect(), true)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: &Assignment) -> bool {
        self.members.binary_search(a).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{gen_random_ksat, FamilyTag};

    #[test]
    fn empty_formula_is_sat() {
        let r = solve(&CnfFormula::empty(0), &[]).unwrap();
        assert_eq!(r.status, SolveStatus::Sat);
        let r = solve(&CnfFormula::empty(5), &[]).unwrap();
        assert_eq!(r.witness.unwrap().len(), 5);
    }

    #[test]
    fn contradiction_needs_a_conflict() {
        let f = CnfFormula::new(1, vec![vec![Literal::pos(1)], vec![Literal::neg(1)]], FamilyTag::Custom);
        let r = solve(&f, &[]).unwrap();
        assert_eq!(r.status, SolveStatus::Unsat);
        assert!(r.conflicts().unwrap() >= 1);
    }

    #[test]
    fn empty_clause_is_unsat() {
        let f = CnfFormula::new(2, vec![vec![]], FamilyTag::Custom);
        assert_eq!(solve(&f, &[]).unwrap().status, SolveStatus::Unsat);
    }

    #[test]
    fn assumptions_are_respected() {
        let f = gen_random_ksat(30, 3.0, 3, 4).unwrap();
        let assumptions = [Literal::pos(3), Literal::neg(7), Literal::pos(11)];
        let r = solve(&f, &assumptions).unwrap();
        if let Some(w) = r.witness {
            assert!(assumptions.iter().all(|a| a.is_true_under(&w)));
        }
        assert!(solve(&f, &[Literal::pos(31)]).is_err());
    }

    #[test]
    fn budget_exhaustion_is_a_distinct_outcome() {
        let f = gen_random_ksat(150, 4.26, 3, 2).unwrap();
        let r = solve_with(&f, &[], SolverConfig::default().with_budget(1)).unwrap();
        assert!(matches!(r.status, SolveStatus::BudgetExhausted | SolveStatus::Sat | SolveStatus::Unsat));
        let r = solve_with(&f, &[], SolverConfig::default().with_budget(0)).unwrap();
        assert_eq!(r.status, SolveStatus::BudgetExhausted);
    }

    #[test]
    fn deterministic_conflict_counts() {
        let f = gen_random_ksat(80, 4.5, 3, 17).unwrap();
        let a = solve(&f, &[]).unwrap();
        let b = solve(&f, &[]).unwrap();
        assert_eq!(a.stats, b.stats);
        let cfg = SolverConfig::default().with_random_polarity(9);
        assert_eq!(
            solve_with(&f, &[], cfg).unwrap().stats,
            solve_with(&f, &[], cfg).unwrap().stats
        );
    }

    #[test]
    fn verify_rejects_bad_witnesses() {
        let f = CnfFormula::new(1, vec![vec![Literal::pos(1)]], FamilyTag::Custom);
        let bad = SolveResult {
            status: SolveStatus::Sat,
            witness: Some(Assignment::zeros(1)),
            stats: None,
            wall_time: 0.0,
        };
        assert!(matches!(verify_result(&f, &bad), Err(Error::WitnessRejected(_))));
    }
}
