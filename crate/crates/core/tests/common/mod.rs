//! Oracles shared by the integration tests, written without the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use neurotopo::CodeMatrix;

/// Faces of every support, grouped by dimension, without the library.
pub fn faces_by_dim(code: &CodeMatrix, max_dim: usize) -> Vec<Vec<Vec<usize>>> {
    let mut sets: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); max_dim + 2];
    for c in code.rows() {
        let s: Vec<usize> = c.iter_ones().collect();
        for mask in 1u32..(1 << s.len()) {
            let f: Vec<usize> = (0..s.len()).filter(|b| mask >> b & 1 == 1).map(|b| s[b]).collect();
            if f.len() <= max_dim + 2 {
                sets[f.len() - 1].insert(f);
            }
        }
    }
    sets.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// Rank over GF(2) by row reduction on a dense 0/1 matrix.
pub fn dense_rank(mut rows: Vec<Vec<u8>>) -> usize {
    let n_cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..n_cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] == 1 {
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn dense_boundary(lower: &[Vec<usize>], upper: &[Vec<usize>]) -> Vec<Vec<u8>> {
    let pos: BTreeMap<&Vec<usize>, usize> = lower.iter().enumerate().map(|(k, f)| (f, k)).collect();
    let mut m = vec![vec![0u8; upper.len()]; lower.len()];
    for (c, s) in upper.iter().enumerate() {
        for drop in 0..s.len() {
            let mut f = s.clone();
            f.remove(drop);
            m[pos[&f]][c] = 1;
        }
    }
    m
}

/// β_0 .. β_{max_dim-1} of the non-reduced homology.
pub fn oracle_betti(code: &CodeMatrix, max_dim: usize) -> Vec<usize> {
    let faces = faces_by_dim(code, max_dim);
    let rank = |m: usize| -> usize {
        if m == 0 || faces[m].is_empty() || faces[m - 1].is_empty() {
            0
        } else {
            dense_rank(dense_boundary(&faces[m - 1], &faces[m]))
        }
    };
    (0..max_dim).map(|m| faces[m].len() - rank(m) - rank(m + 1)).collect()
}
