//! Fisher information in θ, η and mixed coordinates.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};

use super::coords::{eta_from_p, p_from_theta, zeta_supersets, ThetaCoordinates};
use crate::code::NeuronSet;
use crate::error::{Error, Result};

/// Condition number above which a ridge is added before inverting.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Size of that ridge.
pub const RIDGE: f64 = 1e-10;

/// Nonempty sub-masks of `full`, ordered by size and then lexicographically
/// by their member positions.
pub(crate) fn ordered_masks(full: usize) -> Vec<usize> {
    let mut masks: Vec<usize> = (1..=full).filter(|m| m & full == *m).collect();
    masks.sort_by(|&a, &b| mask_order(a, b));
    masks
}

fn mask_order(a: usize, b: usize) -> Ordering {
    a.count_ones().cmp(&b.count_ones()).then_with(|| {
        // lowest differing bit decides: the set holding it sorts first
        let diff = a ^ b;
        if diff == 0 {
            Ordering::Equal
        } else if a & (diff & diff.wrapping_neg()) != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FisherMatrix {
    pub subset: NeuronSet,
    /// Row/column labels as masks over `subset`.
    pub index: Vec<usize>,
    pub entries: DMatrix<f64>,
}

impl FisherMatrix {
    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn position(&self, mask: usize) -> Option<usize> {
        self.index.iter().position(|&m| m == mask)
    }

    pub fn labels(&self) -> Vec<NeuronSet> {
        self.index.iter().map(|&m| self.label(m)).collect()
    }

    fn label(&self, mask: usize) -> NeuronSet {
        NeuronSet::new(
            self.subset
                .indices()
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &i)| i)
                .collect(),
        )
    }

    /// Entry for a pair of neuron sets given as masks over `subset`.
    pub fn get(&self, a: usize, b: usize) -> Option<f64> {
        Some(self.entries[(self.position(a)?, self.position(b)?)])
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| (self.entries[(i, j)] - self.entries[(j, i)]).abs() <= tol))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// `g_{H,H'} = η_{H∪H'} - η_H η_{H'}` for the given labels.
pub(crate) fn fisher_block(eta: &[f64], rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| {
        let (a, b) = (rows[r], cols[c]);
        eta[a | b] - eta[a] * eta[b]
    })
}

/// Fisher information of the log-linear model in θ coordinates, over all
/// nonempty subsets of `t.subset`.
pub fn fisher_theta(t: &ThetaCoordinates) -> FisherMatrix {
    let eta = eta_from_p(&p_from_theta(t)).eta;
    let index = ordered_masks(eta.len() - 1);
    FisherMatrix {
        subset: t.subset.clone(),
        entries: fisher_block(&eta, &index, &index),
        index,
    }
}

/// Inverse of a symmetric positive semidefinite matrix. A ridge is added
/// when the condition number exceeds [`CONDITION_LIMIT`].
#[derive(Clone, Debug)]
pub struct Inverse {
    pub matrix: DMatrix<f64>,
    pub condition: f64,
    pub regularized: bool,
}

pub fn regularized_inverse(m: &DMatrix<f64>) -> Result<Inverse> {
    if m.nrows() == 0 {
        return Ok(Inverse {
            matrix: m.clone(),
            condition: 1.0,
            regularized: false,
        });
    }
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, 0f64), |(lo, hi), &v| (lo.min(v.abs()), hi.max(v.abs())));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    let regularized = condition.is_nan() || condition > CONDITION_LIMIT;
    let mut work = m.clone();
    if regularized {
        for i in 0..work.nrows() {
            work[(i, i)] += RIDGE;
        }
    }
    let matrix = match work.clone().cholesky() {
        Some(ch) => ch.inverse(),
        None => work.try_inverse().ok_or_else(|| Error::Numerical {
            message: "Fisher matrix is singular after regularization".into(),
            condition,
        })?,
    };
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical {
            message: "non-finite entries in inverted Fisher matrix".into(),
            condition,
        });
    }
    Ok(Inverse {
        matrix,
        condition,
        regularized,
    })
}

/// Fisher information in mixed coordinates `(η_H : |H| ≤ k ; θ_H : |H| > k)`.
/// The metric is block diagonal with blocks `A_θ^{-1}` and `D_η^{-1}`,
/// where `A_θ` is the low block of `G(θ)` and `D_η` the high block of
/// `G(η) = G(θ)^{-1}`.
#[derive(Clone, Debug)]
pub struct MixedFisher {
    pub k: usize,
    /// Fisher matrix in the reordered basis, low orders first.
    pub g_zeta: FisherMatrix,
    /// `G(η)` in the original order of the input matrix.
    pub g_eta: FisherMatrix,
    pub condition: f64,
    pub regularized: bool,
}

impl MixedFisher {
    /// Diagonal entry `g^ζ_{AA}` for the neuron set `a` (mask over the subset).
    pub fn entry(&self, a: usize) -> Option<f64> {
        self.g_zeta.get(a, a)
    }
}

pub fn mixed_fisher(g_theta: &FisherMatrix, k: usize) -> Result<MixedFisher> {
    let full = regularized_inverse(&g_theta.entries)?;
    let low: Vec<usize> = (0..g_theta.dim())
        .filter(|&i| g_theta.index[i].count_ones() as usize <= k)
        .collect();
    let high: Vec<usize> = (0..g_theta.dim())
        .filter(|&i| g_theta.index[i].count_ones() as usize > k)
        .collect();
    let a_theta = g_theta.entries.select_rows(&low).select_columns(&low);
    let d_eta = full.matrix.select_rows(&high).select_columns(&high);
    let a_inv = regularized_inverse(&a_theta)?;
    let d_inv = regularized_inverse(&d_eta)?;

    let n = g_theta.dim();
    let mut entries = DMatrix::zeros(n, n);
    entries
        .view_mut((0, 0), (low.len(), low.len()))
        .copy_from(&a_inv.matrix);
    entries
        .view_mut((low.len(), low.len()), (high.len(), high.len()))
        .copy_from(&d_inv.matrix);
    let index = low.iter().chain(&high).map(|&i| g_theta.index[i]).collect();
    Ok(MixedFisher {
        k,
        g_zeta: FisherMatrix {
            subset: g_theta.subset.clone(),
            index,
            entries,
        },
        g_eta: FisherMatrix {
            subset: g_theta.subset.clone(),
            index: g_theta.index.clone(),
            entries: full.matrix,
        },
        condition: full.condition.max(a_inv.condition).max(d_inv.condition),
        regularized: full.regularized || a_inv.regularized || d_inv.regularized,
    })
}

/// One summand `exp(Σ_{∅≠W'⊆W} θ_{W'} - ψ)` of a Fisher entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionTerm {
    pub w: NeuronSet,
    pub exponent: Vec<NeuronSet>,
}

/// Closed form of `g_{A,B}` as a sum over supersets `W ⊇ A ∪ B` of the
/// ground set, minus `η_A η_B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FisherExpansion {
    pub ground: NeuronSet,
    pub a: NeuronSet,
    pub b: NeuronSet,
    pub terms: Vec<ExpansionTerm>,
}

fn subsets_of(set: &NeuronSet) -> Vec<NeuronSet> {
    let v = set.indices();
    let mut out: Vec<NeuronSet> = (1..1usize << v.len())
        .map(|m| NeuronSet::new((0..v.len()).filter(|b| m >> b & 1 == 1).map(|b| v[b]).collect()))
        .collect();
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    out
}

fn superset_terms(ground: &NeuronSet, base: &NeuronSet) -> Vec<ExpansionTerm> {
    let rest = ground.difference(base);
    let mut ws: Vec<NeuronSet> = std::iter::once(base.clone())
        .chain(subsets_of(&rest).into_iter().map(|s| base.union(&s)))
        .collect();
    ws.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    ws.into_iter()
        .map(|w| ExpansionTerm {
            exponent: subsets_of(&w),
            w,
        })
        .collect()
}

pub fn fisher_expansion(ground: &NeuronSet, a: &NeuronSet, b: &NeuronSet) -> Result<FisherExpansion> {
    if a.is_empty() || b.is_empty() || !a.is_subset(ground) || !b.is_subset(ground) {
        return Err(Error::InvalidInput(format!(
            "{a} and {b} must be nonempty subsets of {ground}"
        )));
    }
    Ok(FisherExpansion {
        ground: ground.clone(),
        a: a.clone(),
        b: b.clone(),
        terms: superset_terms(ground, &a.union(b)),
    })
}

impl FisherExpansion {
    /// Numerical value at `t`, which must be defined on the ground set.
    /// Each `η` is expanded the same way, as a sum over supersets.
    pub fn evaluate(&self, t: &ThetaCoordinates) -> Result<f64> {
        if t.subset != self.ground {
            return Err(Error::InvalidInput(format!(
                "coordinates on {} do not match ground set {}",
                t.subset, self.ground
            )));
        }
        let theta_of = |s: &NeuronSet| -> Result<f64> { Ok(t.get(super::coords::local_mask(&t.subset, s)?)) };
        let sum = |terms: &[ExpansionTerm]| -> Result<f64> {
            terms.iter().try_fold(0.0, |acc, term| {
                let e = term.exponent.iter().map(theta_of).sum::<Result<f64>>()?;
                Ok(acc + (e - t.psi).exp())
            })
        };
        let eta_a = sum(&superset_terms(&self.ground, &self.a))?;
        let eta_b = sum(&superset_terms(&self.ground, &self.b))?;
        Ok(sum(&self.terms)? - eta_a * eta_b)
    }
}

impl fmt::Display for FisherExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let compact = |s: &NeuronSet| -> String {
            s.one_based()
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "g[{}][{}] = ", compact(&self.a), compact(&self.b))?;
        for (i, term) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            f.write_str("exp(")?;
            for s in &term.exponent {
                write!(f, "θ{{{}}} + ", compact(s))?;
            }
            f.write_str("-ψ)")?;
        }
        write!(f, " - η{{{}}}η{{{}}}", compact(&self.a), compact(&self.b))
    }
}

/// `η` over all subsets of the ground set computed from θ directly.
pub fn eta_from_theta(t: &ThetaCoordinates) -> Vec<f64> {
    let mut eta = p_from_theta(t).probs;
    zeta_supersets(&mut eta);
    eta
}
