//! Affine closure test: does `x ⊕ y ⊕ z` stay a solution for distinct
//! solutions `x, y, z`?

use std::collections::HashSet;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::formulas::CnfFormula;
use crate::rng;
use crate::shattering::{distinct_witnesses, forced_probe_sample, DEFAULT_FRACTION};
use crate::solver::brute_force;

/// Formulas up to this size draw their pool from exhaustive enumeration.
pub const ENUMERATION_MAX_VARS: usize = 16;
pub const DEFAULT_POOL_PROBES: usize = 200;
pub const MAX_POOL_BATCHES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolSource {
    Enumeration,
    ForcedProbes,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XorReport {
    pub triples_tested: usize,
    pub violations: usize,
    pub violation_rate: f64,
    /// How triples were drawn.
    pub sampling: String,
    pub pool_source: PoolSource,
    pub pool_size: usize,
    pub n: usize,
    pub seed: u64,
}

/// Distinct solutions: every solution for small formulas, otherwise the
/// witnesses of forced-probe batches, added until the pool supports
/// `triples` distinct triples or `MAX_POOL_BATCHES` batches have run.
pub fn solution_pool(f: &CnfFormula, triples: usize, batch: usize, seed: u64) -> Result<(PoolSource, Vec<Assignment>)> {
    if f.num_vars <= ENUMERATION_MAX_VARS {
        return Ok((PoolSource::Enumeration, brute_force(f)?.members));
    }
    let mut pool: Vec<Assignment> = Vec::new();
    for b in 0..MAX_POOL_BATCHES {
        let recs = forced_probe_sample(f, DEFAULT_FRACTION, batch, rng::derive(seed, b as u64))?;
        pool.extend(distinct_witnesses(&recs));
        pool.sort();
        pool.dedup();
        if choose3(pool.len()) >= triples as u128 {
            break;
        }
    }
    Ok((PoolSource::ForcedProbes, pool))
}

fn choose3(k: usize) -> u128 {
    let k = k as u128;
    k * k.saturating_sub(1) * k.saturating_sub(2) / 6
}

/// Samples `triples` distinct 3-subsets of the pool (all of them if the
/// pool has fewer) and counts those whose XOR falsifies `f`.
pub fn xor_closure_test(f: &CnfFormula, triples: usize, seed: u64) -> Result<XorReport> {
    xor_closure_test_with(f, triples, DEFAULT_POOL_PROBES, seed)
}

pub fn xor_closure_test_with(f: &CnfFormula, triples: usize, pool_probes: usize, seed: u64) -> Result<XorReport> {
    if triples == 0 || pool_probes == 0 {
        return Err(Error::InvalidParameters("triples and pool probes must be >= 1".into()));
    }
    let (source, pool) = solution_pool(f, triples, pool_probes, seed)?;
    if pool.len() < 3 {
        return Err(Error::InsufficientSample(format!(
            "found {} distinct solutions, need at least 3",
            pool.len()
        )));
    }
    let wanted = (triples as u128).min(choose3(pool.len())) as usize;
    let mut rng = rng::stream(seed, 1);
    let mut seen: HashSet<[usize; 3]> = HashSet::with_capacity(wanted);
    let mut violations = 0;
    while seen.len() < wanted {
        let mut t: Vec<usize> = sample(&mut rng, pool.len(), 3).into_vec();
        t.sort_unstable();
        let key = [t[0], t[1], t[2]];
        if !seen.insert(key) {
            continue;
        }
        let (x, y, z) = (&pool[key[0]], &pool[key[1]], &pool[key[2]]);
        let combined = x.xor(y).xor(z);
        if !f.is_satisfied_by(&combined) {
            if f.count_satisfied(&combined) == f.num_clauses() {
                return Err(Error::WitnessRejected("violation failed re-verification".into()));
            }
            violations += 1;
        }
    }
    Ok(XorReport {
        triples_tested: wanted,
        violations,
        violation_rate: violations as f64 / wanted as f64,
        sampling: "uniform distinct-solution triples without replacement, affine form x^y^z".into(),
        pool_source: source,
        pool_size: pool.len(),
        n: f.num_vars,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{gen_control_family, gen_random_ksat, ControlFamily};

    #[test]
    fn xorsat_is_closed() {
        let mut tested = 0;
        for seed in 0..50 {
            let n = 8 + (seed as usize % 13);
            let f = gen_control_family(ControlFamily::Xorsat, n, n / 3, seed).unwrap();
            match xor_closure_test(&f, 50, seed) {
                Ok(r) => {
                    assert_eq!(r.violations, 0, "seed {seed}");
                    tested += 1;
                }
                Err(Error::InsufficientSample(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(tested >= 40);
    }

    #[test]
    fn random_3sat_is_not_closed() {
        let f = gen_random_ksat(14, 3.0, 3, 1).unwrap();
        let r = xor_closure_test(&f, 100, 1).unwrap();
        assert_eq!(r.pool_source, PoolSource::Enumeration);
        assert!(r.violation_rate > 0.3);
        assert!((0.0..=1.0).contains(&r.violation_rate));
        assert_eq!(r, xor_closure_test(&f, 100, 1).unwrap());
    }

    #[test]
    fn triple_order_does_not_matter() {
        let f = gen_random_ksat(12, 3.0, 3, 3).unwrap();
        let pool = brute_force(&f).unwrap().members;
        for w in pool.windows(3).take(50) {
            let a = f.is_satisfied_by(&w[0].xor(&w[1]).xor(&w[2]));
            let b = f.is_satisfied_by(&w[2].xor(&w[0]).xor(&w[1]));
            let c = f.is_satisfied_by(&w[1].xor(&w[2]).xor(&w[0]));
            assert!(a == b && b == c);
        }
    }

    #[test]
    fn degenerate_triples_never_violate() {
        let f = gen_random_ksat(12, 3.0, 3, 3).unwrap();
        let pool = brute_force(&f).unwrap().members;
        for w in pool.windows(2) {
            assert!(f.is_satisfied_by(&w[0].xor(&w[0]).xor(&w[1])));
        }
    }

    #[test]
    fn small_pools() {
        let f = CnfFormula::new(2, vec![vec![crate::Literal::pos(1)]], crate::FamilyTag::Custom);
        assert!(matches!(xor_closure_test(&f, 5, 0), Err(Error::InsufficientSample(_))));
        let f = CnfFormula::empty(3);
        let r = xor_closure_test(&f, 1000, 0).unwrap();
        assert_eq!(r.triples_tested, 56);
        assert_eq!(r.violations, 0);
        assert!(xor_closure_test(&f, 0, 0).is_err());
    }

    #[test]
    fn probes_supply_larger_pools() {
        let f = gen_random_ksat(40, 3.5, 3, 2).unwrap();
        let r = xor_closure_test(&f, 50, 2).unwrap();
        assert_eq!(r.pool_source, PoolSource::ForcedProbes);
        assert!(r.pool_size >= 3);
    }
}
