use super::{verify_result, SolutionSet, SolveStatus, Solver, SolverConfig};
use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::formulas::{CnfFormula, Literal};

pub const BRUTE_FORCE_MAX_VARS: usize = 30;

/// Every satisfying assignment of `f`, by direct evaluation of all `2^n`
/// points.
pub fn brute_force(f: &CnfFormula) -> Result<SolutionSet> {
    let n = f.num_vars;
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(Error::GuardRefused(format!(
            "brute force is limited to {BRUTE_FORCE_MAX_VARS} variables, formula has {n}"
        )));
    }
    f.validate()?;
    let masks: Vec<(u32, u32)> = f
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0u32, 0u32), |(p, q), l| {
                let bit = 1u32 << l.index();
                if l.is_positive() {
                    (p | bit, q)
                } else {
                    (p, q | bit)
                }
            })
        })
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u64 << n) as u32 - 1 };
    let members: Vec<Assignment> = (0..(1u64 << n))
        .map(|w| w as u32)
        .filter(|&w| masks.iter().all(|&(p, q)| (w & p) != 0 || (!w & full & q) != 0))
        .map(|w| Assignment::from_u64(w as u64, n))
        .collect();
    Ok(SolutionSet::new(n, members, true))
}

/// The clause excluding exactly `a`.
pub(crate) fn blocking_clause(a: &Assignment) -> Vec<Literal> {
    (0..a.len()).map(|i| Literal::new(i as u32 + 1, !a.get(i))).collect()
}

/// Blocking-clause enumeration: solve, record the model, forbid it, repeat.
///
/// Stops when the solver reports UNSAT (`complete = true`) or after `cap`
/// members; in the latter case one more solve decides whether the cap
/// happened to cover everything.
pub fn enumerate_solutions(f: &CnfFormula, cap: usize, config: SolverConfig) -> Result<SolutionSet> {
    if cap == 0 {
        return Err(Error::InvalidParameters("enumeration cap must be >= 1".into()));
    }
    f.validate()?;
    let mut solver = Solver::from_formula(f, config);
    let mut members = Vec::new();
    loop {
        let r = solver.solve(&[])?;
        verify_result(f, &r)?;
        match r.status {
            SolveStatus::Unsat => return Ok(SolutionSet::new(f.num_vars, members, true)),
            SolveStatus::BudgetExhausted => {
                return Err(Error::BudgetExhausted { budget: config.conflict_budget })
            }
            SolveStatus::Sat => {
                if members.len() == cap {
                    return Ok(SolutionSet::new(f.num_vars, members, false));
                }
                let w = r.witness.expect("verified SAT result has a witness");
                solver.add_clause(&blocking_clause(&w));
                members.push(w);
            }
        }
    }
}
