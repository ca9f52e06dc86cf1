use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An 8-regular Gabber–Galil multigraph on `Z_m x Z_m`.
///
/// Vertex `(x, y)` has id `x * m + y`. Each vertex emits one edge per forward
/// map, so every vertex has out-degree 4 and (the maps being bijections)
/// in-degree 4. Self-loops and parallel edges are kept; a self-loop adds 2 to
/// the degree of its vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpanderGraph {
    pub side: usize,
    pub edges: Vec<(u32, u32)>,
}

pub const MARGULIS_DEGREE: usize = 8;

impl ExpanderGraph {
    pub fn num_vertices(&self) -> usize {
        self.side * self.side
    }

    pub fn degree(&self, v: u32) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum()
    }

    /// Edge-slot indices incident to each vertex; a self-loop is listed twice.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.num_vertices()];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            inc[a as usize].push(e);
            inc[b as usize].push(e);
        }
        inc
    }

    /// Number of connected components, by breadth-first scan.
    pub fn components(&self) -> usize {
        let nv = self.num_vertices();
        let mut adj = vec![Vec::new(); nv];
        for &(a, b) in &self.edges {
            adj[a as usize].push(b as usize);
            adj[b as usize].push(a as usize);
        }
        let mut seen = vec![false; nv];
        let mut count = 0;
        for s in 0..nv {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.components() <= 1
    }

    /// Dense adjacency matrix; a self-loop contributes 2 on the diagonal so
    /// that row sums equal degrees.
    pub fn adjacency(&self) -> Vec<Vec<f64>> {
        let nv = self.num_vertices();
        let mut a = vec![vec![0.0; nv]; nv];
        for &(u, v) in &self.edges {
            a[u as usize][v as usize] += 1.0;
            a[v as usize][u as usize] += 1.0;
        }
        a
    }
}

/// Gabber–Galil expander on `Z_m x Z_m`.
///
/// Forward maps `(x+y, y)`, `(x, y+x)`, `(x+y+1, y)`, `(x, y+x+1)`; their
/// inverses supply the other four neighbours of each vertex.
pub fn margulis_expander(m: usize) -> Result<ExpanderGraph> {
    if m < 2 {
        return Err(Error::InvalidParameters(format!("expander side must be >= 2, got {m}")));
    }
    if m > 4096 {
        return Err(Error::InvalidParameters(format!("expander side {m} is too large")));
    }
    let id = |x: usize, y: usize| (x * m + y) as u32;
    let mut edges = Vec::with_capacity(4 * m * m);
    for x in 0..m {
        for y in 0..m {
            let v = id(x, y);
            edges.push((v, id((x + y) % m, y)));
            edges.push((v, id(x, (y + x) % m)));
            edges.push((v, id((x + y + 1) % m, y)));
            edges.push((v, id(x, (y + x + 1) % m)));
        }
    }
    Ok(ExpanderGraph { side: m, edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_slot_counts() {
        let g2 = margulis_expander(2).unwrap();
        assert_eq!((g2.num_vertices(), g2.edges.len()), (4, 16));
        let g3 = margulis_expander(3).unwrap();
        assert_eq!((g3.num_vertices(), g3.edges.len()), (9, 36));
        assert!(margulis_expander(1).is_err());
    }

    #[test]
    fn regular_and_connected_for_small_sides() {
        for m in 2..=12 {
            let g = margulis_expander(m).unwrap();
            assert_eq!(g.edges.len(), MARGULIS_DEGREE * m * m / 2);
            for v in 0..g.num_vertices() as u32 {
                assert_eq!(g.degree(v), MARGULIS_DEGREE, "m = {m}, v = {v}");
            }
            assert!(g.is_connected(), "m = {m}");
        }
    }

    #[test]
    fn neighbours_include_the_inverse_maps() {
        let m = 5;
        let g = margulis_expander(m).unwrap();
        let (x, y) = (2usize, 3usize);
        let v = (x * m + y) as u32;
        let mut nbrs: Vec<u32> = g
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect();
        nbrs.sort_unstable();
        let back = |dx: usize, dy: usize| ((dx % m) * m + dy % m) as u32;
        let mut expect = vec![
            back(x + y, y),
            back(x, y + x),
            back(x + y + 1, y),
            back(x, y + x + 1),
            back(x + m - y, y),
            back(x, y + m - x),
            back(x + 2 * m - y - 1, y),
            back(x, y + 2 * m - x - 1),
        ];
        expect.sort_unstable();
        assert_eq!(nbrs, expect);
    }
}
