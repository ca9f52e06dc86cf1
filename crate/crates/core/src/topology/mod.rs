//! The cubical complex a solution set induces inside the hypercube, and
//! its Betti numbers over GF(2).

pub mod gf2;

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::formulas::CnfFormula;
use crate::solver::{brute_force, SolutionSet};

pub const DEFAULT_MAX_DIM: usize = 3;
/// Largest face count per dimension accepted by [`betti`].
pub const MAX_FACES_PER_DIM: usize = 1 << 16;
pub const MAX_SOLUTION_SET: usize = 1 << 24;
pub const FORMULA_MAX_VARS: usize = 24;
const MAX_BUILD_FACES: usize = 1 << 24;

pub const FIELD_TAG: &str = "GF(2)";

/// A face of the hypercube: `base` has zeros on the free coordinates, so
/// `base` is the face's smallest vertex and the pair is canonical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    pub base: u64,
    pub free_mask: u64,
}

impl Face {
    pub fn vertex(v: u64) -> Self {
        Face { base: v, free_mask: 0 }
    }

    pub fn dim(&self) -> usize {
        self.free_mask.count_ones() as usize
    }

    /// All `2^dim` vertices.
    pub fn vertices(&self) -> Vec<u64> {
        let free: Vec<u32> = bits(self.free_mask).collect();
        (0..1u64 << free.len())
            .map(|sel| {
                free.iter()
                    .enumerate()
                    .filter(|(k, _)| (sel >> k) & 1 == 1)
                    .fold(self.base, |acc, (_, &i)| acc | 1 << i)
            })
            .collect()
    }

    /// The `2 * dim` codimension-one faces.
    pub fn facets(&self) -> impl Iterator<Item = Face> + '_ {
        bits(self.free_mask).flat_map(move |i| {
            let mask = self.free_mask & !(1 << i);
            [
                Face { base: self.base, free_mask: mask },
                Face { base: self.base | 1 << i, free_mask: mask },
            ]
        })
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let t = m.trailing_zeros();
            m &= m - 1;
            Some(t)
        }
    })
}

/// Faces of dimension `0..=max_dim` whose vertices all lie in the source
/// set. The `(max_dim + 1)`-faces are kept aside so that `β_max_dim` is the
/// value of the full induced complex, not of its skeleton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicalComplex {
    pub n: usize,
    pub max_dim: usize,
    pub faces_by_dim: Vec<Vec<Face>>,
    next_dim_faces: Vec<Face>,
}

impl CubicalComplex {
    pub fn face_counts(&self) -> Vec<usize> {
        self.faces_by_dim.iter().map(Vec::len).collect()
    }

    pub fn faces(&self, d: usize) -> &[Face] {
        self.faces_by_dim.get(d).map(Vec::as_slice).unwrap_or(&[])
    }

    /// True when faces above `max_dim` exist and were left out.
    pub fn is_truncated(&self) -> bool {
        !self.next_dim_faces.is_empty()
    }

    /// Every facet of every face is present.
    pub fn is_closed(&self) -> bool {
        (1..self.faces_by_dim.len()).all(|d| {
            let lower: HashSet<&Face> = self.faces_by_dim[d - 1].iter().collect();
            self.faces_by_dim[d].iter().all(|f| f.facets().all(|g| lower.contains(&g)))
        })
    }
}

fn grow(prev: &[Face], n: usize) -> Vec<Face> {
    let lookup: HashSet<Face> = prev.iter().copied().collect();
    let mut next: Vec<Face> = prev
        .par_iter()
        .flat_map_iter(|f| {
            let lowest_new = 64 - f.free_mask.leading_zeros() as usize;
            let lookup = &lookup;
            (lowest_new..n).filter_map(move |i| {
                let bit = 1u64 << i;
                if f.base & bit == 0 && lookup.contains(&Face { base: f.base | bit, free_mask: f.free_mask }) {
                    Some(Face { base: f.base, free_mask: f.free_mask | bit })
                } else {
                    None
                }
            })
        })
        .collect();
    next.sort_unstable();
    next
}

/// Builds the induced cubical complex of a complete solution set.
///
/// A `d`-face is generated from its facet with the highest free coordinate
/// fixed to 0, and is included iff the opposite facet is present too.
pub fn build_complex(s: &SolutionSet, max_dim: usize) -> Result<CubicalComplex> {
    if !s.complete {
        return Err(Error::UnsupportedInput(
            "the induced complex is undefined for an incomplete solution set".into(),
        ));
    }
    if s.len() > MAX_SOLUTION_SET {
        return Err(Error::GuardRefused(format!(
            "solution set of {} points exceeds {MAX_SOLUTION_SET}",
            s.len()
        )));
    }
    if s.n > 64 {
        return Err(Error::UnsupportedInput(format!(
            "complexes are limited to 64 coordinates, got {}",
            s.n
        )));
    }
    let mut vertices: Vec<Face> = s.members.iter().map(|a| Face::vertex(a.as_u64())).collect();
    vertices.sort_unstable();
    let mut faces_by_dim = vec![vertices];
    for _ in 1..=max_dim {
        let next = grow(faces_by_dim.last().unwrap(), s.n);
        if next.len() > MAX_BUILD_FACES {
            return Err(Error::SizeLimit(format!("{} faces in one dimension", next.len())));
        }
        faces_by_dim.push(next);
    }
    let next_dim_faces = grow(faces_by_dim.last().unwrap(), s.n);
    Ok(CubicalComplex {
        n: s.n,
        max_dim,
        faces_by_dim,
        next_dim_faces,
    })
}

/// Betti numbers `β_0..β_D` with their face counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector {
    pub betti: Vec<usize>,
    pub face_counts: Vec<usize>,
    /// Rank of the boundary map out of the `(D+1)`-faces; zero unless the
    /// complex was truncated.
    pub top_boundary_rank: usize,
    pub field: String,
}

impl BettiVector {
    pub fn beta(&self, d: usize) -> usize {
        self.betti.get(d).copied().unwrap_or(0)
    }

    fn alternating(v: &[usize]) -> i64 {
        v.iter()
            .enumerate()
            .map(|(d, &x)| if d % 2 == 0 { x as i64 } else { -(x as i64) })
            .sum()
    }

    pub fn euler_from_faces(&self) -> i64 {
        Self::alternating(&self.face_counts)
    }

    pub fn euler_from_betti(&self) -> i64 {
        Self::alternating(&self.betti)
    }

    /// `Σ(-1)^d f_d = Σ(-1)^d β_d + (-1)^D r_{D+1}`; the correction vanishes
    /// for untruncated complexes.
    pub fn satisfies_euler_identity(&self) -> bool {
        let d = self.betti.len().saturating_sub(1);
        let correction = if d.is_multiple_of(2) {
            self.top_boundary_rank as i64
        } else {
            -(self.top_boundary_rank as i64)
        };
        self.euler_from_faces() == self.euler_from_betti() + correction
    }
}

/// Boundary matrix of the `d`-faces, as columns of sorted row indices into
/// the `(d-1)`-faces.
pub fn boundary_columns(lower: &[Face], upper: &[Face]) -> Vec<Vec<u32>> {
    upper
        .iter()
        .map(|f| {
            let mut col: Vec<u32> = f
                .facets()
                .map(|g| {
                    lower
                        .binary_search(&g)
                        .expect("complex is closed under facets") as u32
                })
                .collect();
            col.sort_unstable();
            col
        })
        .collect()
}

/// Betti numbers over GF(2): `β_d = f_d - rank ∂_d - rank ∂_{d+1}`.
pub fn betti(c: &CubicalComplex) -> Result<BettiVector> {
    for (d, faces) in c.faces_by_dim.iter().chain(std::iter::once(&c.next_dim_faces)).enumerate() {
        if faces.len() > MAX_FACES_PER_DIM {
            return Err(Error::SizeLimit(format!(
                "{} faces in dimension {d} exceeds the rank limit of {MAX_FACES_PER_DIM}",
                faces.len()
            )));
        }
    }
    let top = c.max_dim;
    let mut ranks = vec![0usize; top + 2];
    for d in 1..=top + 1 {
        let lower = &c.faces_by_dim[d - 1];
        let upper = if d <= top { &c.faces_by_dim[d] } else { &c.next_dim_faces };
        if lower.is_empty() || upper.is_empty() {
            continue;
        }
        ranks[d] = gf2::sparse_rank(lower.len(), &boundary_columns(lower, upper));
    }
    let face_counts = c.face_counts();
    let betti = (0..=top).map(|d| face_counts[d] - ranks[d] - ranks[d + 1]).collect();
    Ok(BettiVector {
        betti,
        face_counts,
        top_boundary_rank: ranks[top + 1],
        field: FIELD_TAG.to_string(),
    })
}

/// Brute-force enumeration, complex construction and Betti numbers.
pub fn betti_of_formula(f: &CnfFormula, max_dim: usize) -> Result<BettiVector> {
    if f.num_vars > FORMULA_MAX_VARS {
        return Err(Error::GuardRefused(format!(
            "homology is limited to {FORMULA_MAX_VARS} variables, formula has {}",
            f.num_vars
        )));
    }
    let s = brute_force(f)?;
    betti(&build_complex(&s, max_dim)?)
}

pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Groups of indices, each ascending, ordered by smallest member.
    pub fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: HashMap<usize, usize> = HashMap::new();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = self.find(i);
            let slot = *by_root.entry(r).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[slot].push(i);
        }
        out
    }
}

/// Components of the Hamming-distance-1 graph on the members.
pub fn connected_components(s: &SolutionSet) -> Vec<Vec<Assignment>> {
    let index: HashMap<&Assignment, usize> = s.members.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut sets = DisjointSets::new(s.members.len());
    for (i, a) in s.members.iter().enumerate() {
        let mut b = a.clone();
        for k in 0..s.n {
            b.flip(k);
            if let Some(&j) = index.get(&b) {
                sets.union(i, j);
            }
            b.flip(k);
        }
    }
    sets.groups()
        .into_iter()
        .map(|g| g.into_iter().map(|i| s.members[i].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{gen_control_family, ControlFamily, FamilyTag, Literal};

    fn set(n: usize, words: &[u64]) -> SolutionSet {
        SolutionSet::new(n, words.iter().map(|&w| Assignment::from_u64(w, n)).collect(), true)
    }

    fn six_cycle() -> SolutionSet {
        // 000, 100, 110, 111, 011, 001 with coordinate 0 written first.
        let pts = ["000", "100", "110", "111", "011", "001"];
        SolutionSet::new(3, pts.iter().map(|p| Assignment::parse_bitstring(p).unwrap()).collect(), true)
    }

    #[test]
    fn face_counts_of_cubes() {
        assert_eq!(build_complex(&SolutionSet::full_cube(2), 2).unwrap().face_counts(), vec![4, 4, 1]);
        assert_eq!(build_complex(&SolutionSet::full_cube(3), 3).unwrap().face_counts(), vec![8, 12, 6, 1]);
        assert_eq!(build_complex(&set(2, &[0b00, 0b11]), 2).unwrap().face_counts(), vec![2, 0, 0]);
    }

    #[test]
    fn refuses_incomplete_sets() {
        let mut s = SolutionSet::full_cube(2);
        s.complete = false;
        assert!(matches!(build_complex(&s, 2), Err(Error::UnsupportedInput(_))));
    }

    #[test]
    fn six_cycle_has_one_loop() {
        let c = build_complex(&six_cycle(), 2).unwrap();
        let b = betti(&c).unwrap();
        assert_eq!(b.face_counts, vec![6, 6, 0]);
        assert_eq!(b.betti, vec![1, 1, 0]);
        assert!(b.satisfies_euler_identity());
        assert_eq!(connected_components(&six_cycle()).len(), 1);
    }

    #[test]
    fn empty_and_trivial_cases() {
        let empty = SolutionSet::new(3, vec![], true);
        assert_eq!(betti(&build_complex(&empty, 3).unwrap()).unwrap().betti, vec![0, 0, 0, 0]);
        assert!(connected_components(&empty).is_empty());
        assert_eq!(connected_components(&set(2, &[0b00, 0b11])).len(), 2);

        let b = betti_of_formula(&CnfFormula::empty(4), 3).unwrap();
        assert_eq!(b.betti, vec![1, 0, 0, 0]);
        assert!(b.satisfies_euler_identity());

        let unsat = CnfFormula::new(2, vec![vec![Literal::pos(1)], vec![Literal::neg(1)]], FamilyTag::Custom);
        assert_eq!(betti_of_formula(&unsat, 3).unwrap().betti, vec![0, 0, 0, 0]);
        assert!(matches!(betti_of_formula(&CnfFormula::empty(25), 3), Err(Error::GuardRefused(_))));
    }

    #[test]
    fn truncation_keeps_top_betti_exact() {
        // The 4-cube's 3-skeleton has a 3-sphere; the induced complex does not.
        let c = build_complex(&SolutionSet::full_cube(4), 3).unwrap();
        assert!(c.is_truncated());
        let b = betti(&c).unwrap();
        assert_eq!(b.betti, vec![1, 0, 0, 0]);
        assert_eq!(b.top_boundary_rank, 1);
        assert!(b.satisfies_euler_identity());
        assert_ne!(b.euler_from_faces(), b.euler_from_betti());
    }

    #[test]
    fn full_cubes_are_contractible() {
        for n in 0..=6 {
            let b = betti(&build_complex(&SolutionSet::full_cube(n), n).unwrap()).unwrap();
            let mut expect = vec![0; n + 1];
            expect[0] = 1;
            assert_eq!(b.betti, expect, "n = {n}");
            assert!(b.satisfies_euler_identity());
        }
    }

    #[test]
    fn random_xorsat_has_no_loops_or_voids() {
        for seed in 0..5 {
            let f = gen_control_family(ControlFamily::Xorsat, 10, 4, seed).unwrap();
            let b = betti_of_formula(&f, 3).unwrap();
            assert_eq!((b.beta(1), b.beta(2)), (0, 0), "seed {seed}");
        }
    }

    /// Betti numbers from dense elimination on the explicit boundary maps.
    fn dense_betti(c: &CubicalComplex) -> Vec<usize> {
        let rank = |d: usize| -> usize {
            if d == 0 || d >= c.faces_by_dim.len() {
                return 0;
            }
            let (lower, upper) = (&c.faces_by_dim[d - 1], &c.faces_by_dim[d]);
            let mut m = gf2::BitMatrix::zeros(lower.len(), upper.len());
            for (j, f) in upper.iter().enumerate() {
                for (i, g) in lower.iter().enumerate() {
                    let v = g.vertices();
                    if g.dim() + 1 == f.dim() && v.iter().all(|x| f.vertices().contains(x)) {
                        m.toggle(i, j);
                    }
                }
            }
            m.rank()
        };
        (0..c.faces_by_dim.len())
            .map(|d| c.faces_by_dim[d].len() - rank(d) - rank(d + 1))
            .collect()
    }

    #[test]
    fn two_dimensional_void_fixture() {
        let pts = [
            0, 1, 3, 4, 5, 6, 7, 9, 10, 13, 14, 16, 17, 18, 19, 20, 21, 22, 25, 26, 27, 28, 29, 30, 31,
        ];
        let s = set(5, &pts);
        let c = build_complex(&s, 5).unwrap();
        let b = betti(&c).unwrap();
        assert_eq!(b.betti, vec![1, 0, 1, 0, 0, 0]);
        assert_eq!(dense_betti(&c), b.betti);
        assert!(b.satisfies_euler_identity());
        assert_eq!(b.euler_from_faces(), b.euler_from_betti());
    }

    #[test]
    fn sparse_matches_dense_on_random_subsets() {
        use rand::Rng;
        let mut rng = crate::rng::stream(11, 0);
        for _ in 0..60 {
            let n = rng.gen_range(2..=5);
            let pts: Vec<u64> = (0..1u64 << n).filter(|_| rng.gen_bool(0.7)).collect();
            let c = build_complex(&set(n, &pts), n).unwrap();
            assert!(c.is_closed());
            let b = betti(&c).unwrap();
            assert_eq!(dense_betti(&c), b.betti, "{pts:?}");
            assert_eq!(b.euler_from_faces(), b.euler_from_betti());
            assert_eq!(b.beta(0), connected_components(&set(n, &pts)).len());
        }
    }

    #[test]
    fn invariant_under_coordinate_permutation() {
        use rand::seq::SliceRandom;
        let mut rng = crate::rng::stream(12, 0);
        for seed in 0..8 {
            let f = crate::formulas::gen_random_ksat(10, 3.0, 3, seed).unwrap();
            let s = brute_force(&f).unwrap();
            let mut perm: Vec<usize> = (0..10).collect();
            perm.shuffle(&mut rng);
            let t = SolutionSet::new(10, s.members.iter().map(|a| a.permuted(&perm)).collect(), true);
            let (bs, bt) = (betti(&build_complex(&s, 3).unwrap()).unwrap(), betti(&build_complex(&t, 3).unwrap()).unwrap());
            assert_eq!(bs, bt);
            assert!(bs.satisfies_euler_identity());
        }
    }

    #[test]
    fn face_vertices_and_facets() {
        let f = Face { base: 0b0001, free_mask: 0b0110 };
        let mut v = f.vertices();
        v.sort_unstable();
        assert_eq!(v, vec![0b0001, 0b0011, 0b0101, 0b0111]);
        assert_eq!(f.facets().count(), 4);
    }
}
