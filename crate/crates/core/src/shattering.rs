//! Forced-probe sampling of a solution space and cluster statistics.
//!
//! Each probe fixes a small random subset of variables to random values and
//! asks the solver for a model under those assumptions. The distinct
//! witnesses are grouped by single linkage at Hamming radius `tau`.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::formulas::{round_half_even, CnfFormula, Literal};
use crate::rng;
use crate::solver::{solve_with, SolveStatus, SolverConfig, DEFAULT_CONFLICT_BUDGET};
use crate::topology::DisjointSets;

pub const DEFAULT_FRACTION: f64 = 0.05;
pub const DEFAULT_PROBES: usize = 200;

/// `max(4, ceil(n / 10))`.
pub fn default_tau(n: usize) -> usize {
    4.max(n.div_ceil(10))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ProbeOutcome {
    Sat { witness: Assignment },
    Unsat,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub probe_id: usize,
    /// `(variable, value)` pairs, variables 1-based and ascending.
    pub fixed_vars: Vec<(u32, bool)>,
    pub outcome: ProbeOutcome,
}

impl ProbeRecord {
    pub fn witness(&self) -> Option<&Assignment> {
        match &self.outcome {
            ProbeOutcome::Sat { witness } => Some(witness),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    pub conflict_budget: u64,
    /// Randomise the solver's initial phases per probe.
    pub random_polarity: bool,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            conflict_budget: DEFAULT_CONFLICT_BUDGET,
            random_polarity: true,
        }
    }
}

fn check_fraction(fraction: f64) -> Result<()> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidParameters(format!("fraction must lie in [0, 1), got {fraction}")));
    }
    Ok(())
}

/// One probe. Variable choice, values and solver phases all come from the
/// stream `(seed, probe_id)`.
pub fn run_probe(f: &CnfFormula, fraction: f64, probe_id: usize, seed: u64, opts: &ProbeOptions) -> Result<ProbeRecord> {
    let n = f.num_vars;
    let mut rng = rng::stream(seed, probe_id as u64);
    let count = round_half_even(fraction * n as f64).min(n);
    let mut vars: Vec<usize> = sample(&mut rng, n, count).into_vec();
    vars.sort_unstable();
    let fixed_vars: Vec<(u32, bool)> = vars.into_iter().map(|v| (v as u32 + 1, rng.gen_bool(0.5))).collect();
    let assumptions: Vec<Literal> = fixed_vars.iter().map(|&(v, b)| Literal::new(v, b)).collect();
    let mut config = SolverConfig::default().with_budget(opts.conflict_budget);
    if opts.random_polarity {
        config = config.with_random_polarity(rng.gen());
    }
    let r = solve_with(f, &assumptions, config)?;
    let outcome = match r.status {
        SolveStatus::Sat => ProbeOutcome::Sat {
            witness: r.witness.expect("verified SAT result has a witness"),
        },
        SolveStatus::Unsat => ProbeOutcome::Unsat,
        SolveStatus::BudgetExhausted => ProbeOutcome::BudgetExhausted,
    };
    Ok(ProbeRecord { probe_id, fixed_vars, outcome })
}

/// Runs `probes` independent forced probes with default options.
pub fn forced_probe_sample(f: &CnfFormula, fraction: f64, probes: usize, seed: u64) -> Result<Vec<ProbeRecord>> {
    forced_probe_sample_with(f, fraction, probes, seed, &ProbeOptions::default())
}

pub fn forced_probe_sample_with(
    f: &CnfFormula,
    fraction: f64,
    probes: usize,
    seed: u64,
    opts: &ProbeOptions,
) -> Result<Vec<ProbeRecord>> {
    check_fraction(fraction)?;
    if probes == 0 {
        return Err(Error::InvalidParameters("probes must be >= 1".into()));
    }
    f.validate()?;
    (0..probes)
        .into_par_iter()
        .map(|i| run_probe(f, fraction, i, seed, opts))
        .collect()
}

/// Distinct witnesses of a probe batch, sorted.
pub fn distinct_witnesses(records: &[ProbeRecord]) -> Vec<Assignment> {
    let mut w: Vec<Assignment> = records.iter().filter_map(|r| r.witness().cloned()).collect();
    w.sort();
    w.dedup();
    w
}

/// Single-linkage clustering at threshold `tau`.
///
/// Returns groups of indices into `solutions`. The groups are determined
/// by the set of points alone; they are listed by smallest member in
/// sorted point order, so permuting the input permutes only the indices.
pub fn cluster_assign(solutions: &[Assignment], tau: usize) -> Vec<Vec<usize>> {
    if let Some(first) = solutions.first() {
        assert!(
            solutions.iter().all(|a| a.len() == first.len()),
            "assignments must share one length"
        );
    }
    let mut order: Vec<usize> = (0..solutions.len()).collect();
    order.sort_by(|&a, &b| solutions[a].cmp(&solutions[b]).then(a.cmp(&b)));
    let mut sets = DisjointSets::new(order.len());
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if solutions[order[i]].hamming(&solutions[order[j]]) <= tau {
                sets.union(i, j);
            }
        }
    }
    sets.groups()
        .into_iter()
        .map(|g| {
            let mut ids: Vec<usize> = g.into_iter().map(|k| order[k]).collect();
            ids.sort_unstable();
            ids
        })
        .collect()
}

/// The member minimising its largest distance to the rest; ties go to the
/// smallest assignment.
pub fn medoid<'a>(cluster: &[&'a Assignment]) -> &'a Assignment {
    cluster
        .iter()
        .map(|a| (cluster.iter().map(|b| a.hamming(b)).max().unwrap_or(0), *a))
        .min()
        .map(|(_, a)| a)
        .expect("cluster is non-empty")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub n: usize,
    pub probes_run: usize,
    pub sat_probes: usize,
    pub unsat_probes: usize,
    pub budget_exhausted_probes: usize,
    /// Distinct witnesses.
    pub solutions_found: usize,
    /// Clusters among the sampled witnesses; the true count can only be
    /// larger.
    pub cluster_count_lower_bound: usize,
    pub largest_cluster: usize,
    /// Mean Hamming distance over within-cluster pairs; `None` if every
    /// cluster is a singleton.
    pub intra_mean: Option<f64>,
    /// Largest within-cluster distance.
    pub intra_diameter: Option<usize>,
    /// Mean distance between cluster medoids; `None` below two clusters.
    pub inter_mean: Option<f64>,
    pub ratio: Option<f64>,
    pub inter_over_n: Option<f64>,
    pub linkage_threshold: usize,
    pub fraction: f64,
    pub seed: u64,
}

/// Probes, deduplicates, clusters and summarises.
pub fn shatter_report(f: &CnfFormula, fraction: f64, probes: usize, tau: usize, seed: u64) -> Result<ClusterReport> {
    let records = forced_probe_sample(f, fraction, probes, seed)?;
    Ok(summarize(f, &records, fraction, tau, seed))
}

/// Builds the report for an existing probe batch.
pub fn summarize(f: &CnfFormula, records: &[ProbeRecord], fraction: f64, tau: usize, seed: u64) -> ClusterReport {
    let witnesses = distinct_witnesses(records);
    assert!(witnesses.iter().all(|w| f.is_satisfied_by(w)), "probe witness failed re-verification");
    let count = |p: fn(&ProbeOutcome) -> bool| records.iter().filter(|r| p(&r.outcome)).count();

    let groups = cluster_assign(&witnesses, tau);
    let clusters: Vec<Vec<&Assignment>> =
        groups.iter().map(|g| g.iter().map(|&i| &witnesses[i]).collect()).collect();

    let (mut intra_sum, mut intra_pairs, mut diameter) = (0usize, 0usize, 0usize);
    for c in &clusters {
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                let d = c[i].hamming(c[j]);
                intra_sum += d;
                intra_pairs += 1;
                diameter = diameter.max(d);
            }
        }
    }
    let intra_mean = (intra_pairs > 0).then(|| intra_sum as f64 / intra_pairs as f64);

    let medoids: Vec<&Assignment> = clusters.iter().map(|c| medoid(c)).collect();
    let (mut inter_sum, mut inter_pairs) = (0usize, 0usize);
    for i in 0..medoids.len() {
        for j in i + 1..medoids.len() {
            inter_sum += medoids[i].hamming(medoids[j]);
            inter_pairs += 1;
        }
    }
    let inter_mean = (inter_pairs > 0).then(|| inter_sum as f64 / inter_pairs as f64);
    let ratio = match (inter_mean, intra_mean) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    };

    ClusterReport {
        n: f.num_vars,
        probes_run: records.len(),
        sat_probes: count(|o| matches!(o, ProbeOutcome::Sat { .. })),
        unsat_probes: count(|o| matches!(o, ProbeOutcome::Unsat)),
        budget_exhausted_probes: count(|o| matches!(o, ProbeOutcome::BudgetExhausted)),
        solutions_found: witnesses.len(),
        cluster_count_lower_bound: clusters.len(),
        largest_cluster: clusters.iter().map(Vec::len).max().unwrap_or(0),
        intra_mean,
        intra_diameter: (intra_pairs > 0).then_some(diameter),
        inter_mean,
        ratio,
        inter_over_n: inter_mean.map(|x| x / f.num_vars.max(1) as f64),
        linkage_threshold: tau,
        fraction,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{gen_control_family, gen_random_ksat, ControlFamily, FamilyTag};
    use crate::solver::brute_force;
    use crate::topology::connected_components;

    fn bits(s: &str) -> Assignment {
        Assignment::parse_bitstring(s).unwrap()
    }

    #[test]
    fn probe_fixes_rounded_fraction() {
        let f = gen_random_ksat(100, 3.0, 3, 1).unwrap();
        let recs = forced_probe_sample(&f, 0.05, 8, 3).unwrap();
        for r in &recs {
            assert_eq!(r.fixed_vars.len(), 5);
            assert!(r.fixed_vars.windows(2).all(|w| w[0].0 < w[1].0));
            if let Some(w) = r.witness() {
                assert!(f.is_satisfied_by(w));
                assert!(r.fixed_vars.iter().all(|&(v, b)| w.get(v as usize - 1) == b));
            }
        }
        assert_eq!(recs, forced_probe_sample(&f, 0.05, 8, 3).unwrap());
    }

    #[test]
    fn zero_fraction_is_an_unconstrained_solve() {
        let f = gen_random_ksat(40, 3.0, 3, 2).unwrap();
        let recs = forced_probe_sample(&f, 0.0, 3, 0).unwrap();
        assert!(recs.iter().all(|r| r.fixed_vars.is_empty() && r.witness().is_some()));
    }

    #[test]
    fn unsat_formula_yields_no_witnesses() {
        let f = CnfFormula::new(3, vec![vec![Literal::pos(1)], vec![Literal::neg(1)]], FamilyTag::Custom);
        let recs = forced_probe_sample(&f, 0.5, 10, 0).unwrap();
        assert!(recs.iter().all(|r| r.outcome == ProbeOutcome::Unsat));
        let rep = summarize(&f, &recs, 0.5, 4, 0);
        assert_eq!(rep.solutions_found, 0);
        assert_eq!(rep.inter_mean, None);
    }

    #[test]
    fn bad_parameters() {
        let f = gen_random_ksat(10, 2.0, 3, 0).unwrap();
        assert!(forced_probe_sample(&f, 1.0, 1, 0).is_err());
        assert!(forced_probe_sample(&f, -0.1, 1, 0).is_err());
        assert!(forced_probe_sample(&f, 0.1, 0, 0).is_err());
    }

    #[test]
    fn budget_exhaustion_is_recorded_per_probe() {
        let f = gen_random_ksat(120, 4.26, 3, 5).unwrap();
        let opts = ProbeOptions { conflict_budget: 0, random_polarity: false };
        let recs = forced_probe_sample_with(&f, 0.05, 4, 0, &opts).unwrap();
        assert!(recs.iter().all(|r| r.outcome == ProbeOutcome::BudgetExhausted));
    }

    #[test]
    fn linkage_examples() {
        let pts = vec![bits("00000"), bits("00001"), bits("11111")];
        assert_eq!(cluster_assign(&pts, 1), vec![vec![0, 1], vec![2]]);
        assert_eq!(cluster_assign(&pts, 5).len(), 1);
        assert!(cluster_assign(&[], 3).is_empty());
    }

    #[test]
    fn linkage_is_order_invariant_and_monotone() {
        use rand::seq::SliceRandom;
        let mut rng = rng::stream(4, 0);
        for _ in 0..20 {
            let pts: Vec<Assignment> = (0..30).map(|_| Assignment::from_u64(rng.gen::<u64>() & 0xfff, 12)).collect();
            let canon = |pts: &[Assignment], tau| {
                let mut p: Vec<Vec<Assignment>> = cluster_assign(pts, tau)
                    .into_iter()
                    .map(|g| {
                        let mut v: Vec<Assignment> = g.into_iter().map(|i| pts[i].clone()).collect();
                        v.sort();
                        v
                    })
                    .collect();
                p.sort();
                p
            };
            let mut shuffled = pts.clone();
            shuffled.shuffle(&mut rng);
            assert_eq!(canon(&pts, 3), canon(&shuffled, 3));
            let mut prev = usize::MAX;
            for tau in 0..=12 {
                let c = cluster_assign(&pts, tau).len();
                assert!(c <= prev);
                prev = c;
            }
            assert_eq!(prev, 1);
        }
    }

    #[test]
    fn medoid_minimises_eccentricity() {
        let a = bits("0000");
        let b = bits("0001");
        let c = bits("0011");
        assert_eq!(medoid(&[&a, &b, &c]), &b);
    }

    #[test]
    fn single_cluster_has_no_inter_distance() {
        // x1 ^ x2 = 1 leaves x3, x4 free: every solution is within distance 3 of every other.
        let f = gen_control_family(ControlFamily::Xorsat, 4, 1, 0).unwrap();
        let rep = shatter_report(&f, 0.25, 40, 4, 1).unwrap();
        assert_eq!(rep.cluster_count_lower_bound, 1);
        assert_eq!(rep.inter_mean, None);
        assert_eq!(rep.ratio, None);
        assert!(rep.intra_mean.is_some());
    }

    #[test]
    fn cluster_count_never_exceeds_component_count() {
        for seed in 0..20 {
            let f = gen_random_ksat(20, 4.0, 3, seed).unwrap();
            let s = brute_force(&f).unwrap();
            if s.is_empty() {
                continue;
            }
            let exact = connected_components(&s).len();
            let rep = shatter_report(&f, 0.05, 200, default_tau(20), seed).unwrap();
            assert!(rep.solutions_found > 0);
            assert!(
                rep.cluster_count_lower_bound <= exact,
                "seed {seed}: {} clusters, {exact} components",
                rep.cluster_count_lower_bound
            );
        }
    }

    #[test]
    fn default_tau_band() {
        assert_eq!(default_tau(20), 4);
        assert_eq!(default_tau(100), 10);
        assert_eq!(default_tau(101), 11);
    }
}
