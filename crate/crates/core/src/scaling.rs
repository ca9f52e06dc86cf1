//! Conflict-count scaling of the internal solver across instance families,
//! with exponential and stretched-exponential least-squares fits.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::{conjoin, gen_random_ksat, margulis_expander, random_charges, tseitin, CnfFormula};
use crate::rng;
use crate::solver::{solve_with, SolveStatus, SolverConfig};

/// What to generate at each size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ScalingFamily {
    /// Size is the variable count.
    RandomKsat { alpha: f64, k: usize },
    /// Size is the expander side `m`; the instance has `4 m^2` variables.
    Tseitin { odd_charge: bool },
}

impl ScalingFamily {
    /// Whether the family is expected to produce UNSAT instances only.
    pub fn targets_unsat(&self) -> bool {
        match self {
            ScalingFamily::RandomKsat { alpha, .. } => *alpha > crate::harness::ALPHA_C,
            ScalingFamily::Tseitin { odd_charge } => *odd_charge,
        }
    }

    pub fn instance(&self, size: usize, seed: u64) -> Result<CnfFormula> {
        match *self {
            ScalingFamily::RandomKsat { alpha, k } => gen_random_ksat(size, alpha, k, seed),
            ScalingFamily::Tseitin { odd_charge } => {
                let g = margulis_expander(size)?;
                let charges = random_charges(g.num_vertices(), odd_charge, &mut rng::stream(seed, 2));
                Ok(tseitin(&g, &charges)?.into_formula())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingPoint {
    /// Generator size parameter.
    pub size: usize,
    /// Variables of the core instance.
    pub n: usize,
    pub seed: u64,
    pub conflicts: u64,
    pub status: SolveStatus,
    /// The family targets UNSAT, so a SAT point is logged but not fitted.
    pub unsat_targeted: bool,
}

impl ScalingPoint {
    pub fn censored(&self) -> bool {
        self.status == SolveStatus::BudgetExhausted
    }

    pub fn usable(&self) -> bool {
        !self.censored() && !(self.unsat_targeted && self.status == SolveStatus::Sat)
    }
}

fn check_sizes(sizes: &[usize], seeds_per_size: usize) -> Result<()> {
    if sizes.is_empty() || !sizes.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameters("sizes must be nonempty and strictly ascending".into()));
    }
    if seeds_per_size == 0 {
        return Err(Error::InvalidParameters("seeds_per_size must be >= 1".into()));
    }
    Ok(())
}

/// Seed of replicate `j`, shared by every size.
pub fn point_seed(seed: u64, replicate: usize) -> u64 {
    rng::derive(seed, replicate as u64)
}

fn run_points<F>(sizes: &[usize], seeds_per_size: usize, seed: u64, unsat_targeted: bool, budget: u64, make: F) -> Result<Vec<ScalingPoint>>
where
    F: Fn(usize, u64) -> Result<(CnfFormula, usize)> + Sync,
{
    check_sizes(sizes, seeds_per_size)?;
    let jobs: Vec<(usize, usize)> = sizes
        .iter()
        .flat_map(|&s| (0..seeds_per_size).map(move |j| (s, j)))
        .collect();
    jobs.into_par_iter()
        .map(|(size, j)| {
            let ps = point_seed(seed, j);
            let (f, n) = make(size, ps)?;
            let r = solve_with(&f, &[], SolverConfig::default().with_budget(budget))?;
            Ok(ScalingPoint {
                size,
                n,
                seed: ps,
                conflicts: r.conflicts().expect("internal solver reports conflicts"),
                status: r.status,
                unsat_targeted,
            })
        })
        .collect()
}

/// One internal-solver run per `(size, replicate)`.
pub fn run_scaling(family: &ScalingFamily, sizes: &[usize], seeds_per_size: usize, budget: u64, seed: u64) -> Result<Vec<ScalingPoint>> {
    run_points(sizes, seeds_per_size, seed, family.targets_unsat(), budget, |size, ps| {
        let f = family.instance(size, ps)?;
        let n = f.num_vars;
        Ok((f, n))
    })
}

/// As [`run_scaling`], solving `core ∧ payload` on disjoint variables.
/// Points report the core's variable count.
pub fn conjoined_scaling(
    core: &ScalingFamily,
    payload: &CnfFormula,
    sizes: &[usize],
    seeds_per_size: usize,
    budget: u64,
    seed: u64,
) -> Result<Vec<ScalingPoint>> {
    run_points(sizes, seeds_per_size, seed, core.targets_unsat(), budget, |size, ps| {
        let c = core.instance(size, ps)?;
        let n = c.num_vars;
        Ok((conjoin(&c, payload), n))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// `log2(conflicts) = a n + b`
    ExpLinear,
    /// `log2(conflicts) = c n^(2/3) + b`
    ExpTwoThirds,
}

impl FitModel {
    pub fn transform(self, n: f64) -> f64 {
        match self {
            FitModel::ExpLinear => n,
            FitModel::ExpTwoThirds => n.powf(2.0 / 3.0),
        }
    }

    /// Fitted `log2(conflicts)` at `n`.
    pub fn predict(self, fit: &ScalingFit, n: f64) -> f64 {
        fit.coefficient * self.transform(n) + fit.intercept
    }
}

impl fmt::Display for FitModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitModel::ExpLinear => "exp-linear",
            FitModel::ExpTwoThirds => "exp-two-thirds",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub model: FitModel,
    pub coefficient: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Points entering the per-size medians.
    pub points_used: usize,
    /// Budget-exhausted points left out.
    pub censored: usize,
    /// SAT points from an UNSAT-targeted family left out.
    pub excluded_sat: usize,
    pub sizes_used: usize,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

/// `log2(max(conflicts, 1))`.
pub fn log_conflicts(c: u64) -> f64 {
    (c.max(1) as f64).log2()
}

/// Per-size medians of `log2(conflicts)` over usable points, keyed by `n`.
pub fn median_series(points: &[ScalingPoint]) -> Vec<(usize, f64)> {
    let mut by_n: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
    for p in points.iter().filter(|p| p.usable()) {
        by_n.entry(p.n).or_default().push(log_conflicts(p.conflicts));
    }
    by_n.into_iter().map(|(n, mut v)| (n, median(&mut v))).collect()
}

/// Ordinary least squares of `y` against the model's transform of `n`;
/// returns `(coefficient, intercept, r_squared)`.
pub fn fit_series(series: &[(usize, f64)], model: FitModel) -> (f64, f64, f64) {
    let xs: Vec<f64> = series.iter().map(|&(n, _)| model.transform(n as f64)).collect();
    let ys: Vec<f64> = series.iter().map(|&(_, y)| y).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let coefficient = sxy / sxx;
    let intercept = my - coefficient * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (coefficient * x + intercept)).powi(2))
        .sum();
    let r_squared = if ss_tot <= f64::EPSILON * k {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    (coefficient, intercept, r_squared)
}

/// Least squares of per-size median `log2(conflicts)` against the model's
/// size transform.
pub fn fit_scaling(points: &[ScalingPoint], model: FitModel) -> Result<ScalingFit> {
    let used = points.iter().filter(|p| p.usable()).count();
    let series = median_series(points);
    if used < 3 || series.len() < 3 {
        return Err(Error::FitRefused(format!(
            "need at least 3 usable points over 3 sizes, have {used} over {}",
            series.len()
        )));
    }
    let (coefficient, intercept, r_squared) = fit_series(&series, model);
    Ok(ScalingFit {
        model,
        coefficient,
        intercept,
        r_squared,
        points_used: used,
        censored: points.iter().filter(|p| p.censored()).count(),
        excluded_sat: points.iter().filter(|p| !p.censored() && !p.usable()).count(),
        sizes_used: series.len(),
    })
}
