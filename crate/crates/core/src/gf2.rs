//! Dense matrices over GF(2), packed 64 entries per word.

use std::fmt;

use crate::code::words_for;

#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n_rows: usize,
    n_cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        let stride = words_for(n_cols);
        BitMatrix {
            n_rows,
            n_cols,
            stride,
            data: vec![0; n_rows * stride],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.stride + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + c / 64] ^= 1 << (c % 64);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn column_weight(&self, c: usize) -> usize {
        (0..self.n_rows).filter(|&r| self.get(r, c)).count()
    }

    /// Product over GF(2).
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.n_cols, rhs.n_rows, "dimension mismatch");
        let mut out = BitMatrix::zeros(self.n_rows, rhs.n_cols);
        for r in 0..self.n_rows {
            for k in 0..self.n_cols {
                if self.get(r, k) {
                    let src = rhs.row(k);
                    let dst = &mut out.data[r * out.stride..(r + 1) * out.stride];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d ^= s;
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Rank by forward Gaussian elimination on packed rows.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let stride = self.stride;
        let mut rank = 0;
        for col in 0..self.n_cols {
            if rank == self.n_rows {
                break;
            }
            let w = col / 64;
            let bit = 1u64 << (col % 64);
            let Some(pivot) = (rank..self.n_rows).find(|&r| m[r * stride + w] & bit != 0) else {
                continue;
            };
            if pivot != rank {
                for k in w..stride {
                    m.swap(pivot * stride + k, rank * stride + k);
                }
            }
            let (head, tail) = m.split_at_mut((rank + 1) * stride);
            let prow = &head[rank * stride + w..(rank + 1) * stride];
            for row in tail.chunks_exact_mut(stride) {
                if row[w] & bit != 0 {
                    for (d, s) in row[w..].iter_mut().zip(prow) {
                        *d ^= s;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.n_rows, self.n_cols)?;
        for r in 0..self.n_rows {
            for c in 0..self.n_cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_rows(rows: &[&[u8]]) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows.len(), rows.first().map_or(0, |r| r.len()));
        for (r, row) in rows.iter().enumerate() {
            for (c, &b) in row.iter().enumerate() {
                m.set(r, c, b == 1);
            }
        }
        m
    }

    // Textbook elimination on unpacked bytes.
    fn dense_rank(rows: &[Vec<u8>]) -> usize {
        let mut m: Vec<Vec<u8>> = rows.to_vec();
        let n_cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..n_cols {
            if let Some(p) = (rank..m.len()).find(|&r| m[r][c] == 1) {
                m.swap(p, rank);
                for r in 0..m.len() {
                    if r != rank && m[r][c] == 1 {
                        let pivot = m[rank].clone();
                        for (x, y) in m[r].iter_mut().zip(pivot) {
                            *x ^= y;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn hollow_triangle_boundary_rank_two() {
        let m = from_rows(&[&[1, 1, 0], &[1, 0, 1], &[0, 1, 1]]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn empty_shapes() {
        assert_eq!(BitMatrix::zeros(0, 5).rank(), 0);
        assert_eq!(BitMatrix::zeros(5, 0).rank(), 0);
    }

    proptest! {
        #[test]
        fn packed_rank_matches_dense(rows in prop::collection::vec(prop::collection::vec(0u8..2, 70), 1..20)) {
            let refs: Vec<&[u8]> = rows.iter().map(Vec::as_slice).collect();
            prop_assert_eq!(from_rows(&refs).rank(), dense_rank(&rows));
        }
    }
}
