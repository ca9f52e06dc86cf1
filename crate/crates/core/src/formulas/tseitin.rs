use rand::Rng;

use super::expander::ExpanderGraph;
use super::{parity_clauses, CnfFormula, FamilyTag};
use crate::error::{Error, Result};

/// Parity constraints on the edges of a graph: one variable per edge slot,
/// and at each vertex the XOR of incident edges equals the vertex charge.
#[derive(Clone, Debug, PartialEq)]
pub struct TseitinInstance {
    pub graph: ExpanderGraph,
    pub charges: Vec<bool>,
    pub cnf: CnfFormula,
}

impl TseitinInstance {
    pub fn total_charge_odd(&self) -> bool {
        self.charges.iter().filter(|&&c| c).count() % 2 == 1
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.cnf
    }

    pub fn into_formula(self) -> CnfFormula {
        self.cnf
    }
}

/// Direct clause expansion of the Tseitin contradiction (or tautology) on
/// `graph`. A self-loop meets its vertex twice and cancels out of the local
/// parity, so a vertex of effective degree `d` contributes `2^(d-1)` clauses.
pub fn tseitin(graph: &ExpanderGraph, charges: &[bool]) -> Result<TseitinInstance> {
    if charges.len() != graph.num_vertices() {
        return Err(Error::InvalidParameters(format!(
            "{} charges for {} vertices",
            charges.len(),
            graph.num_vertices()
        )));
    }
    if !graph.is_connected() {
        return Err(Error::UnsupportedInput(
            "tseitin parity criterion needs a connected graph".into(),
        ));
    }
    let mut clauses = Vec::new();
    for (v, slots) in graph.incidence().into_iter().enumerate() {
        let mut odd: Vec<u32> = Vec::with_capacity(slots.len());
        let mut sorted = slots;
        sorted.sort_unstable();
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i;
            while j < sorted.len() && sorted[j] == sorted[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                odd.push(sorted[i] as u32 + 1);
            }
            i = j;
        }
        clauses.extend(parity_clauses(&odd, charges[v]));
    }
    let cnf = CnfFormula::new(graph.edges.len(), clauses, FamilyTag::Tseitin);
    Ok(TseitinInstance {
        graph: graph.clone(),
        charges: charges.to_vec(),
        cnf,
    })
}

/// Uniform random charges conditioned on the parity of their sum.
pub fn random_charges(num_vertices: usize, odd_total: bool, rng: &mut impl Rng) -> Vec<bool> {
    assert!(num_vertices > 0);
    let mut charges: Vec<bool> = (0..num_vertices).map(|_| rng.gen_bool(0.5)).collect();
    let odd = charges.iter().filter(|&&c| c).count() % 2 == 1;
    if odd != odd_total {
        let v = rng.gen_range(0..num_vertices);
        charges[v] = !charges[v];
    }
    charges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::Assignment;
    use crate::formulas::margulis_expander;
    use crate::rng;

    #[test]
    fn full_degree_vertex_contributes_128_clauses() {
        let g = margulis_expander(3).unwrap();
        let inc = g.incidence();
        let v = (0..g.num_vertices())
            .find(|&v| {
                let mut s = inc[v].clone();
                s.sort_unstable();
                s.dedup();
                s.len() == 8
            })
            .expect("some vertex has no self-loop");
        let mut charges = vec![false; g.num_vertices()];
        let base = tseitin(&g, &charges).unwrap().formula().num_clauses();
        charges[v] = true;
        // Flipping a charge swaps which half of the patterns is forbidden.
        assert_eq!(tseitin(&g, &charges).unwrap().formula().num_clauses(), base);
        let only_v: Vec<_> = tseitin(&g, &charges)
            .unwrap()
            .into_formula()
            .clauses
            .into_iter()
            .filter(|c| {
                let mut vars: Vec<usize> = c.iter().map(|l| l.index()).collect();
                vars.sort_unstable();
                let mut e = inc[v].clone();
                e.sort_unstable();
                vars == e
            })
            .collect();
        assert_eq!(only_v.len(), 128);
    }

    #[test]
    fn parity_decides_satisfiability_on_m2() {
        let g = margulis_expander(2).unwrap();
        let mut r = rng::stream(5, 0);
        for trial in 0..100 {
            let odd = trial % 2 == 1;
            let inst = tseitin(&g, &random_charges(4, odd, &mut r)).unwrap();
            let f = inst.formula();
            let any_sat = (0u64..1 << 16).any(|w| f.is_satisfied_by(&Assignment::from_u64(w, 16)));
            assert_eq!(any_sat, !odd, "trial {trial}");
        }
    }

    #[test]
    fn all_zero_charges_satisfied_by_all_false() {
        let g = margulis_expander(2).unwrap();
        let inst = tseitin(&g, &[false; 4]).unwrap();
        assert!(inst.formula().is_satisfied_by(&Assignment::zeros(16)));
        assert!(!inst.total_charge_odd());
    }

    #[test]
    fn rejects_disconnected_graphs_and_bad_lengths() {
        let g = ExpanderGraph { side: 2, edges: vec![(0, 1), (2, 3)] };
        assert!(matches!(tseitin(&g, &[false; 4]), Err(Error::UnsupportedInput(_))));
        let g = margulis_expander(2).unwrap();
        assert!(tseitin(&g, &[false; 3]).is_err());
    }
}
