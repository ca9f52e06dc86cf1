//! Formula families and DIMACS I/O.

mod dimacs;
mod expander;
mod tseitin;

pub use dimacs::{dimacs_emit, dimacs_parse};
pub use expander::{margulis_expander, ExpanderGraph, MARGULIS_DEGREE};
pub use tseitin::{random_charges, tseitin, TseitinInstance};

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::rng;

/// A signed occurrence of a variable. Variables are numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: u32,
    positive: bool,
}

impl Literal {
    pub fn new(var: u32, positive: bool) -> Self {
        assert!(var >= 1, "variables are 1-based");
        Self { var, positive }
    }

    pub fn pos(var: u32) -> Self {
        Self::new(var, true)
    }

    pub fn neg(var: u32) -> Self {
        Self::new(var, false)
    }

    pub fn from_dimacs(x: i64) -> Option<Self> {
        if x == 0 || x.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Self::new(x.unsigned_abs() as u32, x > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    /// 0-based coordinate of the variable.
    pub fn index(self) -> usize {
        self.var as usize - 1
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negated(self) -> Self {
        Self {
            var: self.var,
            positive: !self.positive,
        }
    }

    #[inline]
    pub fn is_true_under(self, a: &Assignment) -> bool {
        a.get(self.index()) == self.positive
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;
    fn not(self) -> Literal {
        self.negated()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyTag {
    RandomKsat,
    Twosat,
    Hornsat,
    XorsatCnf,
    Tseitin,
    Conjoined,
    Custom,
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyTag::RandomKsat => "random-ksat",
            FamilyTag::Twosat => "twosat",
            FamilyTag::Hornsat => "hornsat",
            FamilyTag::XorsatCnf => "xorsat-cnf",
            FamilyTag::Tseitin => "tseitin",
            FamilyTag::Conjoined => "conjoined",
            FamilyTag::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// `XOR of vars == parity`, variables 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityConstraint {
    pub vars: Vec<u32>,
    pub parity: bool,
}

impl ParityConstraint {
    /// The `2^(k-1)` clauses that forbid every assignment of wrong parity.
    pub fn to_clauses(&self) -> Vec<Vec<Literal>> {
        parity_clauses(&self.vars, self.parity)
    }
}

/// Direct CNF expansion of `XOR(vars) == parity`.
///
/// Each clause rules out exactly one sign pattern with the wrong parity, so
/// `k` distinct variables yield `2^(k-1)` clauses. With no variables the
/// constraint is either vacuous or the empty clause.
pub(crate) fn parity_clauses(vars: &[u32], parity: bool) -> Vec<Vec<Literal>> {
    let k = vars.len();
    if k == 0 {
        return if parity { vec![Vec::new()] } else { Vec::new() };
    }
    assert!(k < 31, "parity expansion over {k} variables is too large");
    let mut out = Vec::with_capacity(1 << (k - 1));
    for pattern in 0u32..(1u32 << k) {
        // `pattern` is a forbidden assignment when its parity is wrong.
        if (pattern.count_ones() % 2 == 1) != parity {
            let clause = vars
                .iter()
                .enumerate()
                .map(|(i, &v)| Literal::new(v, (pattern >> i) & 1 == 0))
                .collect();
            out.push(clause);
        }
    }
    out
}

/// A CNF formula over variables `1..=num_vars`.
#[derive(Clone, Debug, PartialEq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Literal>>,
    pub family: FamilyTag,
    /// The parity system a `xorsat-cnf` formula was expanded from.
    pub parity_system: Option<Vec<ParityConstraint>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>, family: FamilyTag) -> Self {
        Self {
            num_vars,
            clauses,
            family,
            parity_system: None,
        }
    }

    pub fn empty(num_vars: usize) -> Self {
        Self::new(num_vars, Vec::new(), FamilyTag::Custom)
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Clause density `m / n` (0 when there are no variables).
    pub fn density(&self) -> f64 {
        if self.num_vars == 0 {
            0.0
        } else {
            self.clauses.len() as f64 / self.num_vars as f64
        }
    }

    /// Checks the structural invariants: literals in range and no variable
    /// repeated inside a clause.
    pub fn validate(&self) -> Result<()> {
        for (ci, clause) in self.clauses.iter().enumerate() {
            let mut seen: Vec<u32> = clause.iter().map(|l| l.var()).collect();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameters(format!(
                    "clause {ci} repeats a variable"
                )));
            }
            if let Some(&max) = seen.last() {
                if max as usize > self.num_vars {
                    return Err(Error::InvalidParameters(format!(
                        "clause {ci} references variable {max} > {}",
                        self.num_vars
                    )));
                }
            }
        }
        Ok(())
    }

    /// Independent clause-by-clause check of an assignment.
    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        a.len() == self.num_vars
            && self
                .clauses
                .iter()
                .all(|c| c.iter().any(|l| l.is_true_under(a)))
    }

    pub fn count_satisfied(&self, a: &Assignment) -> usize {
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|l| l.is_true_under(a)))
            .count()
    }

    /// For each 0-based variable, the indices of the clauses mentioning it.
    pub fn occurrences(&self) -> Vec<Vec<usize>> {
        let mut occ = vec![Vec::new(); self.num_vars];
        for (ci, clause) in self.clauses.iter().enumerate() {
            for l in clause {
                occ[l.index()].push(ci);
            }
        }
        occ
    }
}

/// `round(x)` with ties to even.
pub fn round_half_even(x: f64) -> usize {
    x.round_ties_even().max(0.0) as usize
}

fn random_clause(rng: &mut impl Rng, n: usize, k: usize) -> Vec<Literal> {
    let mut vars: Vec<usize> = sample(rng, n, k).into_vec();
    vars.sort_unstable();
    vars.into_iter()
        .map(|v| Literal::new(v as u32 + 1, rng.gen_bool(0.5)))
        .collect()
}

/// Uniform random k-SAT with `round(alpha * n)` clauses.
pub fn gen_random_ksat(n: usize, alpha: f64, k: usize, seed: u64) -> Result<CnfFormula> {
    if k == 0 || n < k {
        return Err(Error::InvalidParameters(format!(
            "random k-SAT needs n >= k >= 1 (n = {n}, k = {k})"
        )));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameters(format!("alpha must be >= 0, got {alpha}")));
    }
    let m = round_half_even(alpha * n as f64);
    let mut rng = rng::stream(seed, 0);
    let clauses = (0..m).map(|_| random_clause(&mut rng, n, k)).collect();
    Ok(CnfFormula::new(n, clauses, FamilyTag::RandomKsat))
}

/// Polynomial-time control families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlFamily {
    Twosat,
    Hornsat,
    Xorsat,
}

impl FromStr for ControlFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "twosat" | "2sat" => Ok(ControlFamily::Twosat),
            "hornsat" | "horn" => Ok(ControlFamily::Hornsat),
            "xorsat" => Ok(ControlFamily::Xorsat),
            other => Err(Error::InvalidParameters(format!("unknown control family '{other}'"))),
        }
    }
}

/// Random instances from a control family with `m` constraints.
///
/// Horn clauses have width `min(3, n)` and carry a single positive literal
/// with probability one half. XOR-SAT draws `m` parity constraints over
/// `min(3, n)` variables and expands each into CNF.
pub fn gen_control_family(family: ControlFamily, n: usize, m: usize, seed: u64) -> Result<CnfFormula> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!("control families need n >= 2, got {n}")));
    }
    let mut rng = rng::stream(seed, 1);
    let f = match family {
        ControlFamily::Twosat => {
            let clauses = (0..m).map(|_| random_clause(&mut rng, n, 2)).collect();
            CnfFormula::new(n, clauses, FamilyTag::Twosat)
        }
        ControlFamily::Hornsat => {
            let w = n.min(3);
            let clauses = (0..m)
                .map(|_| {
                    let mut clause = random_clause(&mut rng, n, w);
                    let positive = if rng.gen_bool(0.5) { Some(rng.gen_range(0..w)) } else { None };
                    for (i, l) in clause.iter_mut().enumerate() {
                        *l = Literal::new(l.var(), Some(i) == positive);
                    }
                    clause
                })
                .collect();
            CnfFormula::new(n, clauses, FamilyTag::Hornsat)
        }
        ControlFamily::Xorsat => {
            let w = n.min(3);
            let system: Vec<ParityConstraint> = (0..m)
                .map(|_| {
                    let mut vars: Vec<u32> =
                        sample(&mut rng, n, w).into_iter().map(|v| v as u32 + 1).collect();
                    vars.sort_unstable();
                    ParityConstraint { vars, parity: rng.gen_bool(0.5) }
                })
                .collect();
            let clauses = system.iter().flat_map(|p| p.to_clauses()).collect();
            let mut f = CnfFormula::new(n, clauses, FamilyTag::XorsatCnf);
            f.parity_system = Some(system);
            f
        }
    };
    Ok(f)
}

/// Disjoint conjunction: `b`'s variables are shifted past `a`'s.
pub fn conjoin(a: &CnfFormula, b: &CnfFormula) -> CnfFormula {
    let shift = a.num_vars as u32;
    let mut clauses = a.clauses.clone();
    clauses.extend(b.clauses.iter().map(|c| {
        c.iter()
            .map(|l| Literal::new(l.var() + shift, l.is_positive()))
            .collect::<Vec<_>>()
    }));
    CnfFormula::new(a.num_vars + b.num_vars, clauses, FamilyTag::Conjoined)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_ksat_clause_counts() {
        assert_eq!(gen_random_ksat(100, 4.2, 3, 7).unwrap().num_clauses(), 420);
        assert_eq!(gen_random_ksat(200, 3.8, 3, 1).unwrap().num_clauses(), 760);
        let f = gen_random_ksat(10, 0.0, 3, 0).unwrap();
        assert_eq!(f.num_clauses(), 0);
        assert!(f.is_satisfied_by(&Assignment::zeros(10)));
    }

    #[test]
    fn random_ksat_rounds_half_to_even() {
        // 2.5 -> 2, 3.5 -> 4
        assert_eq!(gen_random_ksat(5, 0.5, 3, 0).unwrap().num_clauses(), 2);
        assert_eq!(gen_random_ksat(7, 0.5, 3, 0).unwrap().num_clauses(), 4);
    }

    #[test]
    fn random_ksat_rejects_bad_parameters() {
        assert!(matches!(gen_random_ksat(2, 4.0, 3, 0), Err(Error::InvalidParameters(_))));
        assert!(matches!(gen_random_ksat(5, -1.0, 3, 0), Err(Error::InvalidParameters(_))));
        assert!(matches!(gen_random_ksat(5, 1.0, 0, 0), Err(Error::InvalidParameters(_))));
    }

    #[test]
    fn random_ksat_is_deterministic_with_distinct_variables() {
        let a = gen_random_ksat(50, 4.0, 3, 99).unwrap();
        let b = gen_random_ksat(50, 4.0, 3, 99).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_random_ksat(50, 4.0, 3, 100).unwrap());
        for c in &a.clauses {
            assert_eq!(c.len(), 3);
        }
        a.validate().unwrap();
    }

    #[test]
    fn control_families_have_their_shape() {
        let x = gen_control_family(ControlFamily::Xorsat, 6, 3, 2).unwrap();
        assert_eq!(x.num_clauses(), 12);
        assert_eq!(x.family, FamilyTag::XorsatCnf);
        assert_eq!(x.parity_system.as_ref().unwrap().len(), 3);

        let h = gen_control_family(ControlFamily::Hornsat, 5, 4, 3).unwrap();
        assert!(h.clauses.iter().all(|c| c.iter().filter(|l| l.is_positive()).count() <= 1));

        let t = gen_control_family(ControlFamily::Twosat, 4, 2, 1).unwrap();
        assert!(t.clauses.iter().all(|c| c.len() == 2));

        assert!("quantum".parse::<ControlFamily>().is_err());
        assert!(gen_control_family(ControlFamily::Twosat, 1, 2, 1).is_err());
    }

    #[test]
    fn xorsat_cnf_matches_parity_system() {
        let f = gen_control_family(ControlFamily::Xorsat, 8, 5, 11).unwrap();
        let sys = f.parity_system.clone().unwrap();
        for word in 0u64..256 {
            let a = Assignment::from_u64(word, 8);
            let parity_ok = sys.iter().all(|p| {
                let ones = p.vars.iter().filter(|&&v| a.get(v as usize - 1)).count();
                (ones % 2 == 1) == p.parity
            });
            assert_eq!(parity_ok, f.is_satisfied_by(&a));
        }
    }

    #[test]
    fn conjoin_is_a_disjoint_union() {
        let e = conjoin(&CnfFormula::empty(0), &CnfFormula::empty(0));
        assert_eq!((e.num_vars, e.num_clauses()), (0, 0));

        let f = gen_random_ksat(5, 0.8, 3, 1).unwrap();
        let g = gen_random_ksat(3, 0.67, 3, 2).unwrap();
        assert_eq!((f.num_vars, f.num_clauses(), g.num_clauses()), (5, 4, 2));
        let h = conjoin(&f, &g);
        assert_eq!((h.num_vars, h.num_clauses()), (8, 6));
        assert_eq!(h.family, FamilyTag::Conjoined);
        assert!(h.clauses[4..].iter().flatten().all(|l| l.var() > 5));
    }

    #[test]
    fn parity_clause_expansion() {
        assert_eq!(parity_clauses(&[1, 2, 3], true).len(), 4);
        assert_eq!(parity_clauses(&[], true), vec![Vec::<Literal>::new()]);
        assert!(parity_clauses(&[], false).is_empty());
    }
}
