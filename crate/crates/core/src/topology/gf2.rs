//! Linear algebra over GF(2).
//!
//! [`BitMatrix`] is a dense row-major bitset matrix with Gaussian
//! elimination. [`sparse_rank`] reduces a column-sparse matrix the way
//! boundary matrices are usually reduced, adding the pivot column whenever
//! two columns share their lowest nonzero row.

/// Dense GF(2) matrix, one `u64` bitset per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Self {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if value {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn toggle(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] ^= 1 << (c % 64);
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let w = self.words;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * w);
            (&mut lo[dst * w..dst * w + w], &hi[..w])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * w);
            (&mut hi[..w], &lo[src * w..src * w + w])
        };
        for (x, y) in a.iter_mut().zip(b) {
            *x ^= y;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words;
        for k in 0..w {
            self.data.swap(a * w + k, b * w + k);
        }
    }

    /// Rank by forward elimination; consumes the matrix.
    pub fn rank(mut self) -> usize {
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(rank, p);
            for r in rank + 1..self.rows {
                if self.get(r, c) {
                    self.xor_rows(r, rank);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Rank of a matrix given as columns of ascending row indices.
pub fn sparse_rank(num_rows: usize, columns: &[Vec<u32>]) -> usize {
    let mut pivot_of_row: Vec<u32> = vec![u32::MAX; num_rows];
    let mut reduced: Vec<Vec<u32>> = Vec::with_capacity(columns.len());
    let mut rank = 0;
    let mut scratch = Vec::new();
    for col in columns {
        debug_assert!(col.windows(2).all(|w| w[0] < w[1]));
        let mut cur = col.clone();
        while let Some(&low) = cur.last() {
            let p = pivot_of_row[low as usize];
            if p == u32::MAX {
                break;
            }
            symmetric_difference(&cur, &reduced[p as usize], &mut scratch);
            std::mem::swap(&mut cur, &mut scratch);
        }
        if let Some(&low) = cur.last() {
            pivot_of_row[low as usize] = reduced.len() as u32;
            rank += 1;
        }
        reduced.push(cur);
    }
    rank
}

fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}
