use nalgebra::DMatrix;
use neurotopo::infogeo::{
    empirical, eta_from_p, fisher_theta, mixed_fisher, p_from_theta, test_interaction, theta_from_p,
    EmpiricalDistribution, NullMode, TestOptions,
};
use neurotopo::{CodeMatrix, Codeword, NeuronSet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn distribution_strategy() -> impl Strategy<Value = EmpiricalDistribution> {
    (1usize..=6).prop_flat_map(|k| {
        prop::collection::vec(1e-4f64..1.0, 1 << k).prop_map(move |w| {
            let total: f64 = w.iter().sum();
            EmpiricalDistribution {
                subset: NeuronSet::new((0..k).collect()),
                probs: w.into_iter().map(|x| x / total).collect(),
                n_samples: 0,
                smoothing: 0.0,
            }
        })
    })
}

fn code_strategy() -> impl Strategy<Value = CodeMatrix> {
    (1usize..=6).prop_flat_map(|n| {
        prop::collection::vec(0u64..(1 << n), 1..200).prop_map(move |words| {
            let rows = words
                .into_iter()
                .map(|w| Codeword::from_bits(&(0..n).map(|i| w >> i & 1 == 1).collect::<Vec<_>>()))
                .collect();
            CodeMatrix::from_codewords(n, rows).unwrap()
        })
    })
}

/// Closed form of the η-coordinate metric:
/// `g^{AD} = (-1)^{|A|+|D|} Σ_{B ⊆ A∩D} 1/p_B`.
fn g_eta_oracle(d: &EmpiricalDistribution, index: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(index.len(), index.len(), |r, c| {
        let (a, b) = (index[r], index[c]);
        let common = a & b;
        let mut sum = 0.0;
        let mut sub = common;
        loop {
            sum += 1.0 / d.probs[sub];
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & common;
        }
        let sign = if (a.count_ones() + b.count_ones()) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        sign * sum
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn theta_round_trip(d in distribution_strategy()) {
        let back = p_from_theta(&theta_from_p(&d).unwrap());
        for (x, y) in d.probs.iter().zip(&back.probs) {
            prop_assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn smoothed_codes_round_trip(code in code_strategy()) {
        let all = NeuronSet::new((0..code.n_neurons()).collect());
        let d = empirical(&code, &all, 0.5).unwrap();
        let back = p_from_theta(&theta_from_p(&d).unwrap());
        for (x, y) in d.probs.iter().zip(&back.probs) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn eta_decreases_under_inclusion(d in distribution_strategy()) {
        let eta = eta_from_p(&d).eta;
        prop_assert!((eta[0] - 1.0).abs() < 1e-12);
        for a in 0..eta.len() {
            for b in 0..eta.len() {
                if a & b == a {
                    prop_assert!(eta[a] >= eta[b] - 1e-12);
                }
            }
        }
    }

    #[test]
    fn fisher_metric_is_symmetric_psd_and_inverted_by_closed_form(d in distribution_strategy()) {
        let g = fisher_theta(&theta_from_p(&d).unwrap());
        prop_assert!(g.is_symmetric(1e-12));
        prop_assert!(g.min_eigenvalue() > -1e-9);
        let oracle = g_eta_oracle(&d, &g.index);
        let id = DMatrix::<f64>::identity(g.dim(), g.dim());
        let scale = oracle.abs().max().max(1.0);
        prop_assert!((&oracle * &g.entries - &id).abs().max() < 1e-6 * scale);
        // the library's own inverse agrees with the closed form
        let lib = mixed_fisher(&g, 1).unwrap().g_eta.entries;
        prop_assert!((lib - oracle).abs().max() < 1e-6 * scale);
    }
}

/// Pairs with `P(x1) = 0.3` and `P(x2 | x1) = 0.4`, `P(x2 | not x1) = 0.3`.
fn weakly_coupled(n: usize, rng: &mut ChaCha8Rng) -> CodeMatrix {
    let rows: Vec<Codeword> = (0..n)
        .map(|_| {
            let a = rng.random_bool(0.3);
            let b = rng.random_bool(if a { 0.4 } else { 0.3 });
            Codeword::from_bits(&[a, b])
        })
        .collect();
    CodeMatrix::from_codewords(2, rows).unwrap()
}

#[test]
fn power_grows_with_sample_size() {
    let a = NeuronSet::from([0, 1]);
    let opts = TestOptions {
        null_mode: NullMode::Theta,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let rates: Vec<f64> = [100, 1000, 10_000]
        .iter()
        .map(|&n| {
            let reps = 500;
            let hits = (0..reps)
                .filter(|_| {
                    test_interaction(&weakly_coupled(n, &mut rng), &a, &a, &opts)
                        .unwrap()
                        .significant
                })
                .count();
            hits as f64 / reps as f64
        })
        .collect();
    assert!(rates.windows(2).all(|w| w[0] <= w[1]), "{rates:?}");
    assert!(rates[2] > 0.95, "{rates:?}");
}
