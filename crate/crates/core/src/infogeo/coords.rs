//! Empirical pattern distributions over a neuron subset and their θ/η
//! coordinates in the log-linear (exponential family) model
//! `P(x) = exp(Σ_S θ_S x_S - ψ)`.
//!
//! Patterns over a subset `M` are indexed by bit masks: bit `b` of the
//! index is the state of neuron `M[b]`. Index 0 is the all-silent pattern.

use crate::code::{CodeMatrix, NeuronSet};
use crate::error::{Error, Result};

/// Largest subset the coordinate systems are built on (2^10 patterns).
pub const MAX_SUBSET: usize = 10;

/// Default additive pseudocount per pattern.
pub const DEFAULT_SMOOTHING: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    pub subset: NeuronSet,
    /// Pattern probabilities indexed by mask over `subset`.
    pub probs: Vec<f64>,
    pub n_samples: usize,
    pub smoothing: f64,
}

impl EmpiricalDistribution {
    pub fn order(&self) -> usize {
        self.subset.len()
    }

    pub fn prob(&self, pattern: usize) -> f64 {
        self.probs[pattern]
    }
}

/// Natural parameters; `theta[0]` is unused and kept at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaCoordinates {
    pub subset: NeuronSet,
    pub theta: Vec<f64>,
    pub psi: f64,
    pub n_samples: usize,
    pub smoothing: f64,
}

impl ThetaCoordinates {
    pub fn get(&self, mask: usize) -> f64 {
        self.theta[mask]
    }
}

/// Expectation parameters; `eta[0] = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaCoordinates {
    pub subset: NeuronSet,
    pub eta: Vec<f64>,
}

impl EtaCoordinates {
    pub fn get(&self, mask: usize) -> f64 {
        self.eta[mask]
    }
}

/// Mask over `subset` positions for a set of neurons contained in it.
pub fn local_mask(subset: &NeuronSet, neurons: &NeuronSet) -> Result<usize> {
    neurons.indices().iter().try_fold(0usize, |m, i| {
        subset
            .indices()
            .binary_search(i)
            .map(|b| m | 1 << b)
            .map_err(|_| Error::InvalidInput(format!("neuron {} is not in {subset}", i + 1)))
    })
}

/// Pattern frequencies over `subset`, with `smoothing` added to every
/// pattern count before normalizing.
pub fn empirical(code: &CodeMatrix, subset: &NeuronSet, smoothing: f64) -> Result<EmpiricalDistribution> {
    if subset.is_empty() {
        return Err(Error::InvalidInput("empty neuron subset".into()));
    }
    if subset.len() > MAX_SUBSET {
        return Err(Error::SubsetSize {
            size: subset.len(),
            limit: MAX_SUBSET,
        });
    }
    if let Some(&i) = subset.indices().iter().find(|&&i| i >= code.n_neurons()) {
        return Err(Error::InvalidInput(format!(
            "neuron {} out of range for a code of {} neurons",
            i + 1,
            code.n_neurons()
        )));
    }
    if !(smoothing >= 0.0 && smoothing.is_finite()) {
        return Err(Error::Config(format!("invalid smoothing {smoothing}")));
    }
    let size = 1usize << subset.len();
    let mut counts = vec![0usize; size];
    for (c, &k) in code.unique() {
        let idx = subset
            .indices()
            .iter()
            .enumerate()
            .fold(0, |m, (b, &i)| m | (usize::from(c.get(i)) << b));
        counts[idx] += k;
    }
    let n = code.n_samples();
    let total = n as f64 + smoothing * size as f64;
    Ok(EmpiricalDistribution {
        subset: subset.clone(),
        probs: counts.iter().map(|&k| (k as f64 + smoothing) / total).collect(),
        n_samples: n,
        smoothing,
    })
}

/// In-place Möbius inversion over the subset lattice:
/// `f(S) <- Σ_{T ⊆ S} (-1)^{|S \ T|} f(T)`.
pub(crate) fn mobius_subsets(f: &mut [f64]) {
    let n = f.len().trailing_zeros();
    for b in 0..n {
        let bit = 1 << b;
        for s in 0..f.len() {
            if s & bit != 0 {
                f[s] -= f[s ^ bit];
            }
        }
    }
}

/// `f(S) <- Σ_{T ⊆ S} f(T)`.
pub(crate) fn zeta_subsets(f: &mut [f64]) {
    let n = f.len().trailing_zeros();
    for b in 0..n {
        let bit = 1 << b;
        for s in 0..f.len() {
            if s & bit != 0 {
                f[s] += f[s ^ bit];
            }
        }
    }
}

/// `f(S) <- Σ_{T ⊇ S} f(T)`.
pub(crate) fn zeta_supersets(f: &mut [f64]) {
    let n = f.len().trailing_zeros();
    for b in 0..n {
        let bit = 1 << b;
        for s in 0..f.len() {
            if s & bit == 0 {
                f[s] += f[s | bit];
            }
        }
    }
}

pub fn theta_from_p(d: &EmpiricalDistribution) -> Result<ThetaCoordinates> {
    if let Some(k) = d.probs.iter().position(|&p| p <= 0.0) {
        return Err(Error::Numerical {
            message: format!(
                "pattern {k} of {} has zero probability; use a positive smoothing",
                d.subset
            ),
            condition: f64::INFINITY,
        });
    }
    let mut theta: Vec<f64> = d.probs.iter().map(|p| p.ln()).collect();
    mobius_subsets(&mut theta);
    let psi = -theta[0];
    theta[0] = 0.0;
    Ok(ThetaCoordinates {
        subset: d.subset.clone(),
        theta,
        psi,
        n_samples: d.n_samples,
        smoothing: d.smoothing,
    })
}

pub fn p_from_theta(t: &ThetaCoordinates) -> EmpiricalDistribution {
    let mut logp = t.theta.clone();
    logp[0] = 0.0;
    zeta_subsets(&mut logp);
    EmpiricalDistribution {
        subset: t.subset.clone(),
        probs: logp.iter().map(|l| (l - t.psi).exp()).collect(),
        n_samples: t.n_samples,
        smoothing: t.smoothing,
    }
}

pub fn eta_from_p(d: &EmpiricalDistribution) -> EtaCoordinates {
    let mut eta = d.probs.clone();
    zeta_supersets(&mut eta);
    EtaCoordinates {
        subset: d.subset.clone(),
        eta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dist(probs: &[f64]) -> EmpiricalDistribution {
        let order = probs.len().trailing_zeros() as usize;
        EmpiricalDistribution {
            subset: NeuronSet::new((0..order).collect()),
            probs: probs.to_vec(),
            n_samples: 0,
            smoothing: 0.0,
        }
    }

    // θ_S by the defining recursion in increasing |S|:
    // θ_S = log(P_S / (P_∅ Π_{∅≠S'⊊S} e^{θ_S'}))
    fn theta_recursive(p: &[f64]) -> Vec<f64> {
        let mut masks: Vec<usize> = (1..p.len()).collect();
        masks.sort_by_key(|m| m.count_ones());
        let mut theta = vec![0.0; p.len()];
        for s in masks {
            let lower: f64 = (1..s).filter(|t| t & s == *t).map(|t| theta[t]).sum();
            theta[s] = (p[s] / (p[0] * lower.exp())).ln();
        }
        theta
    }

    #[test]
    fn empirical_without_smoothing() {
        let c = CodeMatrix::from_strings(&["11", "11", "00", "00"]).unwrap();
        let d = empirical(&c, &NeuronSet::from([0, 1]), 0.0).unwrap();
        assert_eq!(d.probs, vec![0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn empirical_with_pseudocount() {
        let c = CodeMatrix::from_strings(&["10"]).unwrap();
        let d = empirical(&c, &NeuronSet::from([0, 1]), 0.5).unwrap();
        assert_abs_diff_eq!(d.prob(0b01), 1.5 / 3.0, epsilon = 1e-15);
        for k in [0b00, 0b10, 0b11] {
            assert_abs_diff_eq!(d.prob(k), 0.5 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn empirical_rejects_bad_subsets() {
        let c = CodeMatrix::from_supports(12, &[&[0]]).unwrap();
        assert!(empirical(&c, &NeuronSet::empty(), 0.5).is_err());
        let big = NeuronSet::new((0..11).collect());
        assert!(matches!(empirical(&c, &big, 0.5), Err(Error::SubsetSize { .. })));
    }

    #[test]
    fn uniform_has_vanishing_theta() {
        let t = theta_from_p(&dist(&[0.25; 4])).unwrap();
        assert!(t.theta.iter().all(|v| v.abs() < 1e-15));
        assert_abs_diff_eq!(t.psi, 4f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn two_neuron_theta_by_hand() {
        // P00=0.4 P10=0.3 P01=0.2 P11=0.1; mask bit 0 is neuron 1
        let p = [0.4, 0.3, 0.2, 0.1];
        let t = theta_from_p(&dist(&p)).unwrap();
        assert_abs_diff_eq!(t.get(0b01), (0.3f64 / 0.4).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(t.get(0b01), -0.2877, epsilon = 1e-4);
        assert_abs_diff_eq!(t.get(0b10), -std::f64::consts::LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(t.get(0b11), (0.1f64 * 0.4 / (0.3 * 0.2)).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(t.get(0b11), -0.4055, epsilon = 1e-4);
        let back = p_from_theta(&t);
        for (a, b) in back.probs.iter().zip(p) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn independent_product_has_no_interactions() {
        let (a, b, c) = (0.3, 0.6, 0.8);
        let p: Vec<f64> = (0..8)
            .map(|m| {
                let f = |bit: usize, q: f64| if m >> bit & 1 == 1 { q } else { 1.0 - q };
                f(0, a) * f(1, b) * f(2, c)
            })
            .collect();
        let t = theta_from_p(&dist(&p)).unwrap();
        for m in [0b011, 0b101, 0b110, 0b111] {
            assert!(t.get(m).abs() < 1e-9, "theta[{m:b}] = {}", t.get(m));
        }
    }

    #[test]
    fn fast_mobius_matches_recursive_definition() {
        let p = [0.05, 0.1, 0.15, 0.05, 0.2, 0.1, 0.25, 0.1];
        let t = theta_from_p(&dist(&p)).unwrap();
        for (a, b) in t.theta.iter().zip(theta_recursive(&p)) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn eta_by_hand() {
        let e = eta_from_p(&dist(&[0.4, 0.3, 0.2, 0.1]));
        assert_abs_diff_eq!(e.get(0b01), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(e.get(0b10), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(e.get(0b11), 0.1, epsilon = 1e-15);

        let e = eta_from_p(&dist(&[0.25; 4]));
        assert_eq!(e.eta, vec![1.0, 0.5, 0.5, 0.25]);

        let e = eta_from_p(&dist(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]));
        assert!(e.eta.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn zero_probability_is_a_numerical_error() {
        assert!(matches!(
            theta_from_p(&dist(&[0.5, 0.0, 0.0, 0.5])),
            Err(Error::Numerical { .. })
        ));
    }

    #[test]
    fn local_masks() {
        let m = NeuronSet::from([2, 5, 7]);
        assert_eq!(local_mask(&m, &NeuronSet::from([5, 7])).unwrap(), 0b110);
        assert!(local_mask(&m, &NeuronSet::from([1])).is_err());
    }
}
