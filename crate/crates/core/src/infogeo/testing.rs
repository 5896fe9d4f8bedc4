//! Interaction tests in mixed coordinates and the feature-level wrappers
//! built on them.

use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::coords::{empirical, eta_from_p, local_mask, theta_from_p, DEFAULT_SMOOTHING, MAX_SUBSET};
use super::fisher::{fisher_block, ordered_masks, regularized_inverse};
use crate::code::{CodeMatrix, NeuronSet};
use crate::error::{Error, Result};
use crate::topology::{betti, SimplicialComplex};

/// Which coordinate is pinned under the null hypothesis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullMode {
    /// `η_A = 0`: the neurons in `A` never fire together.
    #[default]
    Eta,
    /// `θ_A = 0`: no interaction of order `|A|` beyond lower orders.
    Theta,
}

impl fmt::Display for NullMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NullMode::Eta => "eta",
            NullMode::Theta => "theta",
        })
    }
}

impl FromStr for NullMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta" => Ok(NullMode::Eta),
            "theta" => Ok(NullMode::Theta),
            _ => Err(Error::Config(format!("unknown null mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Significant,
    NotSignificant,
}

impl Decision {
    pub fn from_bool(significant: bool) -> Self {
        if significant {
            Decision::Significant
        } else {
            Decision::NotSignificant
        }
    }

    pub fn is_significant(self) -> bool {
        self == Decision::Significant
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Significant => "significant",
            Decision::NotSignificant => "not-significant",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestOptions {
    pub alpha: f64,
    pub smoothing: f64,
    pub null_mode: NullMode,
    pub seed: u64,
    /// Random companion sets drawn when testing a mixed monomial.
    pub mixed_repeats: usize,
}

impl Default for TestOptions {
    fn default() -> Self {
        TestOptions {
            alpha: 0.05,
            smoothing: DEFAULT_SMOOTHING,
            null_mode: NullMode::Eta,
            seed: 0,
            mixed_repeats: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisResult {
    #[serde(rename = "A")]
    pub a: NeuronSet,
    #[serde(rename = "M")]
    pub m: NeuronSet,
    pub lambda: f64,
    #[serde(rename = "threshold")]
    pub chi2_threshold: f64,
    pub raw_p: f64,
    /// `η̂_A` or `θ̂_A`, depending on the null mode.
    pub effect: f64,
    /// Decision after correcting over `n_comparisons` tests.
    pub significant: bool,
    pub n_comparisons: usize,
    pub null_mode: NullMode,
    pub regularized: bool,
}

impl HypothesisResult {
    pub fn corrected_decision(&self) -> Decision {
        Decision::from_bool(self.significant)
    }
}

/// `max(q, 1 - q)` for the upper-α quantile `q` of χ²(1).
pub fn chi2_threshold(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let q = chi2().inverse_cdf(1.0 - alpha);
    Ok(q.max(1.0 - q))
}

fn chi2() -> ChiSquared {
    ChiSquared::new(1.0).expect("one degree of freedom")
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Test for an interaction among the neurons of `a` using the pattern
/// distribution over `m ⊇ a`.
///
/// With `|A| = k` the statistic is `λ = N g^ζ_AA (η⁰_A - η̂_A)²` with
/// `η⁰_A = 0` in the cut `ζ_k`, or `λ = N g^ζ_AA θ̂_A²` in the cut
/// `ζ_{k-1}` when the null pins `θ_A`.
pub fn test_interaction(
    code: &CodeMatrix,
    a: &NeuronSet,
    m: &NeuronSet,
    opts: &TestOptions,
) -> Result<HypothesisResult> {
    if a.is_empty() || !a.is_subset(m) {
        return Err(Error::InvalidInput(format!("{a} must be a nonempty subset of {m}")));
    }
    let threshold = chi2_threshold(opts.alpha)?;
    let dist = empirical(code, m, opts.smoothing)?;
    let theta = theta_from_p(&dist)?;
    let eta = eta_from_p(&dist).eta;
    let amask = local_mask(m, a)?;
    let n = dist.n_samples as f64;

    let k = match opts.null_mode {
        NullMode::Eta => a.len(),
        NullMode::Theta => a.len() - 1,
    };
    let low: Vec<usize> = ordered_masks(eta.len() - 1)
        .into_iter()
        .take_while(|h| h.count_ones() as usize <= k)
        .collect();

    let (g, effect, regularized) = match opts.null_mode {
        NullMode::Eta => {
            let inv = regularized_inverse(&fisher_block(&eta, &low, &low))?;
            let pos = low.iter().position(|&h| h == amask).expect("A lies in the low block");
            (inv.matrix[(pos, pos)], eta[amask], inv.regularized)
        }
        NullMode::Theta => {
            // (D_η^{-1})_AA is the Schur complement of A_θ in G(θ)
            let g_aa = eta[amask] - eta[amask] * eta[amask];
            if low.is_empty() {
                (g_aa, theta.get(amask), false)
            } else {
                let inv = regularized_inverse(&fisher_block(&eta, &low, &low))?;
                let b = fisher_block(&eta, &low, &[amask]);
                let correction = (b.transpose() * &inv.matrix * &b)[(0, 0)];
                (g_aa - correction, theta.get(amask), inv.regularized)
            }
        }
    };
    let lambda = n * g * effect * effect;
    if !lambda.is_finite() {
        return Err(Error::Numerical {
            message: format!("non-finite test statistic for {a} within {m}"),
            condition: f64::INFINITY,
        });
    }
    let significant = lambda.abs() >= threshold;
    Ok(HypothesisResult {
        a: a.clone(),
        m: m.clone(),
        lambda,
        chi2_threshold: threshold,
        raw_p: chi2().sf(lambda.abs()),
        effect,
        significant,
        n_comparisons: 1,
        null_mode: opts.null_mode,
        regularized,
    })
}

/// Holm's step-down procedure: which hypotheses are rejected at `alpha`.
pub fn holm(p_values: &[f64], alpha: f64) -> Vec<bool> {
    let mut order: Vec<usize> = (0..p_values.len()).collect();
    order.sort_by(|&x, &y| p_values[x].total_cmp(&p_values[y]));
    let n = p_values.len();
    let mut reject = vec![false; n];
    for (rank, &i) in order.iter().enumerate() {
        if p_values[i] > alpha / (n - rank) as f64 {
            break;
        }
        reject[i] = true;
    }
    reject
}

/// Subsets `M ⊇ A` of size [`MAX_SUBSET`] covering every other neuron.
/// The remaining neurons are shuffled and cut into groups; a short last
/// group is padded with neurons drawn from the earlier ones.
pub fn subset_draws(n_neurons: usize, a: &NeuronSet, rng: &mut ChaCha8Rng) -> Result<Vec<NeuronSet>> {
    if a.is_empty() {
        return Err(Error::InvalidInput("empty neuron set under test".into()));
    }
    if a.len() >= MAX_SUBSET {
        return Err(Error::SubsetSize {
            size: a.len(),
            limit: MAX_SUBSET - 1,
        });
    }
    if let Some(&i) = a.indices().iter().find(|&&i| i >= n_neurons) {
        return Err(Error::InvalidInput(format!("neuron {} out of range", i + 1)));
    }
    if n_neurons < MAX_SUBSET {
        return Ok(vec![NeuronSet::new((0..n_neurons).collect())]);
    }
    let mut others: Vec<usize> = (0..n_neurons).filter(|&i| !a.contains(i)).collect();
    others.shuffle(rng);
    let width = MAX_SUBSET - a.len();
    let mut draws = Vec::new();
    for (g, group) in others.chunks(width).enumerate() {
        let mut m = a.union(&NeuronSet::new(group.to_vec()));
        if group.len() < width {
            let pool: Vec<usize> = others[..g * width].to_vec();
            for &i in pool.choose_multiple(rng, width - group.len()) {
                m = m.with(i);
            }
        }
        draws.push(m);
    }
    Ok(draws)
}

/// Results for one feature, corrected together.
#[derive(Clone, Debug, Serialize)]
pub struct FeatureReport {
    pub feature: String,
    #[serde(rename = "A")]
    pub a: NeuronSet,
    pub tests: Vec<HypothesisResult>,
    pub correction: &'static str,
    pub alpha: f64,
    pub null_mode: NullMode,
    pub decision: Decision,
    pub seed: u64,
}

/// Run all `(A, M)` tests, order them, and apply Holm across the batch.
fn run_batch(
    code: &CodeMatrix,
    jobs: Vec<(NeuronSet, NeuronSet)>,
    opts: &TestOptions,
) -> Result<Vec<HypothesisResult>> {
    let mut results: Vec<HypothesisResult> = jobs
        .par_iter()
        .map(|(a, m)| test_interaction(code, a, m, opts))
        .collect::<Result<_>>()?;
    results.sort_by(|x, y| x.a.cmp(&y.a).then_with(|| x.m.cmp(&y.m)));
    let p: Vec<f64> = results.iter().map(|r| r.raw_p).collect();
    let n = results.len();
    for (r, keep) in results.iter_mut().zip(holm(&p, opts.alpha)) {
        r.significant = keep;
        r.n_comparisons = n;
    }
    Ok(results)
}

/// Test `a` within every subset drawn by [`subset_draws`], with Holm
/// correction across the draws.
pub fn subset_protocol(code: &CodeMatrix, a: &NeuronSet, opts: &TestOptions) -> Result<FeatureReport> {
    check_alpha(opts.alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let jobs = subset_draws(code.n_neurons(), a, &mut rng)?
        .into_iter()
        .map(|m| (a.clone(), m))
        .collect();
    let tests = run_batch(code, jobs, opts)?;
    Ok(FeatureReport {
        feature: format!("interaction {a}"),
        a: a.clone(),
        decision: Decision::from_bool(tests.iter().any(|t| t.significant)),
        tests,
        correction: "holm",
        alpha: opts.alpha,
        null_mode: opts.null_mode,
        seed: opts.seed,
    })
}

fn pair(code: &CodeMatrix, i: usize, j: usize) -> Result<NeuronSet> {
    if i == j || i.max(j) >= code.n_neurons() {
        return Err(Error::InvalidInput(format!(
            "neurons {} and {} must be distinct and at most {}",
            i + 1,
            j + 1,
            code.n_neurons()
        )));
    }
    Ok(NeuronSet::from([i, j]))
}

/// Pairwise test for a monomial `x_i x_j` (neurons that never fire together).
pub fn test_monomial(code: &CodeMatrix, i: usize, j: usize, opts: &TestOptions) -> Result<FeatureReport> {
    let a = pair(code, i, j)?;
    let mut report = subset_protocol(code, &a, opts)?;
    report.feature = format!("monomial {} {}", i + 1, j + 1);
    Ok(report)
}

/// Test for a mixed monomial `x_i(1 - x_j)`: the pair `{i, j}` plus
/// `opts.mixed_repeats` pairs of `i` with a random other neuron, all
/// corrected together. Significant when a `{i, j}` test survives.
pub fn test_mixed_monomial(code: &CodeMatrix, i: usize, j: usize, opts: &TestOptions) -> Result<FeatureReport> {
    check_alpha(opts.alpha)?;
    let a = pair(code, i, j)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut jobs: Vec<(NeuronSet, NeuronSet)> = subset_draws(code.n_neurons(), &a, &mut rng)?
        .into_iter()
        .map(|m| (a.clone(), m))
        .collect();
    let companions: Vec<usize> = (0..code.n_neurons()).filter(|&r| r != i && r != j).collect();
    for _ in 0..opts.mixed_repeats {
        let Some(&r) = companions.choose(&mut rng) else { break };
        let b = NeuronSet::from([i, r]);
        for m in subset_draws(code.n_neurons(), &b, &mut rng)? {
            jobs.push((b.clone(), m));
        }
    }
    let tests = run_batch(code, jobs, opts)?;
    Ok(FeatureReport {
        feature: format!("mixed {} {}", i + 1, j + 1),
        decision: Decision::from_bool(tests.iter().any(|t| t.a == a && t.significant)),
        a,
        tests,
        correction: "holm",
        alpha: opts.alpha,
        null_mode: opts.null_mode,
        seed: opts.seed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HoleCandidate {
    pub simplex: NeuronSet,
    pub test: HypothesisResult,
    /// The candidate's absence is a significant co-firing deficit, so it
    /// stays empty.
    pub confirmed_empty: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HoleReport {
    pub dim: usize,
    /// `β_m` of the complex as given.
    pub betti_before: usize,
    /// Edges removed because their vertices fire together significantly
    /// less often than independent cells would.
    pub pruned_edges: usize,
    /// Faces of dimension 2 to `m + 1` dropped for lack of significant
    /// joint firing.
    pub unsupported_faces: usize,
    /// `β_m` of the cleaned complex, before candidates are tested.
    pub betti_cleaned: usize,
    /// `β_m` after filling every candidate whose emptiness is not significant.
    pub significant_holes: usize,
    pub candidates: Vec<HoleCandidate>,
    pub note: Option<&'static str>,
    pub correction: &'static str,
    pub alpha: f64,
    pub decision: Decision,
}

/// Significance of the `m`-dimensional holes in the code behind `cx`.
///
/// The complex is first cleaned of chance structure. An edge is removed when
/// its pair fires together significantly less often than under
/// independence (θ-null, negative effect): overlapping tails of distant
/// fields produce such edges. Higher faces, from dimension 2 up to `m + 1`,
/// are kept only when all their facets survive and their joint firing is
/// significant in the η-null test.
///
/// Every `(m+1)`-simplex missing from the cleaned complex whose facets are
/// all present is then a candidate for closing a hole. It stays empty only
/// when its deficit of joint firing is significant (θ-null, negative effect)
/// after Holm correction across candidates; all others are filled and `β_m`
/// recomputed. Each test uses the simplex's own vertices as `M`.
pub fn test_hole(code: &CodeMatrix, cx: &SimplicialComplex, m: usize, opts: &TestOptions) -> Result<HoleReport> {
    check_alpha(opts.alpha)?;
    if m >= cx.max_dim() {
        return Err(Error::InvalidInput(format!(
            "holes of dimension {m} need a complex stored beyond dimension {}",
            cx.max_dim()
        )));
    }
    let theta_opts = TestOptions {
        null_mode: NullMode::Theta,
        ..*opts
    };
    let eta_opts = TestOptions {
        null_mode: NullMode::Eta,
        ..*opts
    };
    let own = |s: &NeuronSet, o: &TestOptions| test_interaction(code, s, s, o);

    let edges = cx.simplices(1);
    let edge_tests: Vec<HypothesisResult> = edges.par_iter().map(|e| own(e, &theta_opts)).collect::<Result<_>>()?;
    let kept: Vec<NeuronSet> = edges
        .iter()
        .zip(&edge_tests)
        .filter(|(_, t)| !(t.significant && t.effect < 0.0))
        .map(|(e, _)| e.clone())
        .collect();
    let pruned_edges = edges.len() - kept.len();
    let mut cleaned =
        SimplicialComplex::from_faces(code.n_neurons(), cx.simplices(0).iter().cloned().chain(kept), m + 1);

    let mut unsupported_faces = 0;
    for d in 2..=m + 1 {
        let present: Vec<NeuronSet> = cleaned
            .empty_simplices(d - 1)
            .into_iter()
            .filter(|s| cx.contains(s))
            .collect();
        let supported: Vec<bool> = present
            .par_iter()
            .map(|s| own(s, &eta_opts).map(|t| t.significant))
            .collect::<Result<_>>()?;
        unsupported_faces += supported.iter().filter(|&&k| !k).count();
        cleaned = cleaned.with_faces(present.into_iter().zip(supported).filter(|(_, k)| *k).map(|(s, _)| s));
    }

    let betti_cleaned = betti(&cleaned).get(m);
    let mut report = HoleReport {
        dim: m,
        betti_before: betti(cx).get(m),
        pruned_edges,
        unsupported_faces,
        betti_cleaned,
        significant_holes: betti_cleaned,
        candidates: Vec::new(),
        note: None,
        correction: "holm",
        alpha: opts.alpha,
        decision: Decision::from_bool(betti_cleaned > 0),
    };
    if betti_cleaned == 0 {
        report.note = Some("no-hole");
        return Ok(report);
    }
    let candidates = cleaned.empty_simplices(m);
    if candidates.is_empty() {
        report.note = Some("no-closing-candidates");
        return Ok(report);
    }
    let jobs = candidates.iter().map(|s| (s.clone(), s.clone())).collect();
    report.candidates = run_batch(code, jobs, &theta_opts)?
        .into_iter()
        .map(|t| HoleCandidate {
            simplex: t.a.clone(),
            confirmed_empty: t.significant && t.effect < 0.0,
            test: t,
        })
        .collect();
    let filled = report
        .candidates
        .iter()
        .filter(|c| !c.confirmed_empty)
        .map(|c| c.simplex.clone());
    report.significant_holes = betti(&cleaned.with_faces(filled)).get(m);
    report.decision = Decision::from_bool(report.significant_holes > 0);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::Codeword;
    use crate::topology::build_complex;
    use approx::assert_abs_diff_eq;

    fn pairs(n11: usize, n10: usize, n01: usize, n00: usize) -> CodeMatrix {
        let mut rows = Vec::new();
        for (count, bits) in [(n11, [1, 1]), (n10, [1, 0]), (n01, [0, 1]), (n00, [0, 0])] {
            rows.extend(std::iter::repeat_n(bits, count));
        }
        CodeMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn threshold_is_upper_quantile() {
        assert_abs_diff_eq!(chi2_threshold(0.05).unwrap(), 3.841458820694124, epsilon = 1e-9);
        assert!(chi2_threshold(1.5).is_err());
    }

    #[test]
    fn holm_step_down() {
        assert_eq!(holm(&[0.01, 0.04, 0.03], 0.05), vec![true, false, false]);
        assert_eq!(holm(&[0.01, 0.02, 0.04], 0.05), vec![true, true, true]);
        assert_eq!(holm(&[0.04], 0.05), vec![true]);
        assert!(holm(&[], 0.05).is_empty());
    }

    #[test]
    fn coupled_pair_is_significant() {
        let code = pairs(500, 0, 0, 500);
        let a = NeuronSet::from([0, 1]);
        for null_mode in [NullMode::Eta, NullMode::Theta] {
            let opts = TestOptions {
                null_mode,
                ..Default::default()
            };
            let r = test_interaction(&code, &a, &a, &opts).unwrap();
            assert!(r.significant, "{null_mode}: {r:?}");
        }
    }

    #[test]
    fn silent_neuron_is_not_significant() {
        let code = pairs(0, 0, 300, 700);
        let a = NeuronSet::from([0, 1]);
        let r = test_interaction(&code, &a, &a, &TestOptions::default()).unwrap();
        assert!(r.lambda < 1.0, "{r:?}");
        assert!(!r.significant);
    }

    #[test]
    fn theta_statistic_is_log_linear_wald() {
        let code = pairs(30, 70, 20, 80);
        let a = NeuronSet::from([0, 1]);
        let opts = TestOptions {
            null_mode: NullMode::Theta,
            smoothing: 0.0,
            ..Default::default()
        };
        let r = test_interaction(&code, &a, &a, &opts).unwrap();
        let log_or = (30.0f64 * 80.0 / (70.0 * 20.0)).ln();
        let var = 1.0 / 30.0 + 1.0 / 70.0 + 1.0 / 20.0 + 1.0 / 80.0;
        assert_abs_diff_eq!(r.effect, log_or, epsilon = 1e-12);
        assert_abs_diff_eq!(r.lambda, log_or * log_or / var, epsilon = 1e-9);
    }

    #[test]
    fn protocol_draw_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = NeuronSet::from([0, 1]);
        let draws = subset_draws(40, &a, &mut rng).unwrap();
        assert_eq!(draws.len(), 5);
        let mut seen = NeuronSet::empty();
        for m in &draws {
            assert_eq!(m.len(), 10);
            assert!(a.is_subset(m));
            seen = seen.union(m);
        }
        assert_eq!(seen.len(), 40);
        assert_eq!(subset_draws(10, &a, &mut rng).unwrap().len(), 1);
        assert_eq!(
            subset_draws(9, &a, &mut rng).unwrap(),
            vec![NeuronSet::new((0..9).collect())]
        );
        assert!(subset_draws(40, &NeuronSet::new((0..10).collect()), &mut rng).is_err());
    }

    #[test]
    fn ten_neurons_use_identity_correction() {
        let rows: Vec<Codeword> = (0..200)
            .map(|t| Codeword::from_support(10, &[t % 10, (t * 7 + 3) % 10]))
            .collect();
        let code = CodeMatrix::from_codewords(10, rows).unwrap();
        let r = subset_protocol(&code, &NeuronSet::from([0, 1]), &TestOptions::default()).unwrap();
        assert_eq!(r.tests.len(), 1);
        assert_eq!(r.tests[0].n_comparisons, 1);
    }

    #[test]
    fn protocol_is_reproducible() {
        let rows: Vec<Codeword> = (0..500)
            .map(|t| Codeword::from_support(24, &[t % 24, (t * 5 + 1) % 24, (t * 11 + 7) % 24]))
            .collect();
        let code = CodeMatrix::from_codewords(24, rows).unwrap();
        let opts = TestOptions {
            seed: 42,
            ..Default::default()
        };
        let a = NeuronSet::from([2, 3]);
        let x = subset_protocol(&code, &a, &opts).unwrap();
        let y = subset_protocol(&code, &a, &opts).unwrap();
        assert_eq!(x.tests, y.tests);
        assert_eq!(x.tests.len(), 3);
    }

    #[test]
    fn mixed_monomial_batches_random_companions() {
        let rows: Vec<Codeword> = (0..400)
            .map(|t| match t % 4 {
                0 => Codeword::from_support(6, &[0, 1]),
                1 => Codeword::from_support(6, &[1, 2]),
                2 => Codeword::from_support(6, &[3 + t % 3]),
                _ => Codeword::from_support(6, &[]),
            })
            .collect();
        let code = CodeMatrix::from_codewords(6, rows).unwrap();
        let r = test_mixed_monomial(&code, 0, 1, &TestOptions::default()).unwrap();
        assert_eq!(r.tests.len(), 6);
        assert!(r.tests.iter().all(|t| t.n_comparisons == 6));
        assert!(r.decision.is_significant());
    }

    #[test]
    fn filled_triangle_has_no_hole_to_test() {
        let mut rows = vec!["111"; 200];
        rows.extend(vec!["000"; 200]);
        let code = CodeMatrix::from_strings(&rows).unwrap();
        let cx = build_complex(&code, 2);
        let r = test_hole(&code, &cx, 1, &TestOptions::default()).unwrap();
        assert_eq!(r.note, Some("no-hole"));
        assert_eq!(r.decision, Decision::NotSignificant);
    }

    #[test]
    fn distant_pair_edge_is_pruned() {
        // a four-cycle of strongly coupled pairs plus one chord that fires
        // together far less often than chance
        let mut rows: Vec<Codeword> = Vec::new();
        let mut push = |bits: &[usize], k: usize| {
            for _ in 0..k {
                rows.push(Codeword::from_support(4, bits));
            }
        };
        push(&[0, 1], 300);
        push(&[1, 2], 300);
        push(&[2, 3], 300);
        push(&[0, 3], 300);
        push(&[0, 2], 2);
        push(&[], 300);
        let code = CodeMatrix::from_codewords(4, rows).unwrap();
        let cx = build_complex(&code, 2);
        assert_eq!(betti(&cx).get(1), 2);
        let r = test_hole(&code, &cx, 1, &TestOptions::default()).unwrap();
        assert_eq!(r.pruned_edges, 1);
        assert_eq!(r.betti_cleaned, 1);
        assert_eq!(r.note, Some("no-closing-candidates"));
        assert_eq!(r.significant_holes, 1);
        assert_eq!(r.decision, Decision::Significant);
    }

    #[test]
    fn hollow_square_has_no_closing_candidates() {
        let code = CodeMatrix::from_supports(4, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]).unwrap();
        let cx = build_complex(&code, 2);
        let r = test_hole(&code, &cx, 1, &TestOptions::default()).unwrap();
        assert_eq!(r.note, Some("no-closing-candidates"));
        assert_eq!(r.significant_holes, 1);
    }
}
