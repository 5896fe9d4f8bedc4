use std::collections::BTreeSet;

use neurotopo::ideal::{
    brute_force_cf, compute_generators, higher_monomials, pairwise_relations, relations_report, PseudoMonomial,
};
use neurotopo::{CodeMatrix, Codeword, NeuronSet};
use proptest::prelude::*;

/// Distinct codewords on `n <= 6` neurons.
fn code_strategy() -> impl Strategy<Value = CodeMatrix> {
    (1usize..=6).prop_flat_map(|n| {
        prop::collection::btree_set(0u64..(1 << n), 1..=(1usize << n)).prop_map(move |words| {
            let rows = words
                .into_iter()
                .map(|w| Codeword::from_bits(&(0..n).map(|i| w >> i & 1 == 1).collect::<Vec<_>>()))
                .collect();
            CodeMatrix::from_codewords(n, rows).unwrap()
        })
    })
}

fn vanishes(f: &PseudoMonomial, code: &CodeMatrix) -> bool {
    code.unique().keys().all(|c| !f.evaluate(c))
}

/// Minimal vanishing pseudo-monomials of degree one or two, from scratch:
/// a relation is kept when no proper divisor also vanishes. Products
/// `(1 - x_i)(1 - x_j)` are left out, as they are not receptive-field
/// relations between two neurons.
fn degree_two_oracle(code: &CodeMatrix) -> BTreeSet<PseudoMonomial> {
    let n = code.n_neurons();
    let pm =
        |s: &[usize], t: &[usize]| PseudoMonomial::new(NeuronSet::new(s.to_vec()), NeuronSet::new(t.to_vec())).unwrap();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for f in [pm(&[i], &[]), pm(&[], &[i])] {
            if vanishes(&f, code) {
                out.insert(f);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut cands = vec![pm(&[i], &[j])];
            if i < j {
                cands.push(pm(&[i, j], &[]));
            }
            for f in cands {
                let divisors = [f.sigma().indices(), f.tau().indices()]
                    .concat()
                    .into_iter()
                    .map(|v| {
                        if f.sigma().contains(v) {
                            pm(&[v], &[])
                        } else {
                            pm(&[], &[v])
                        }
                    })
                    .collect::<Vec<_>>();
                if vanishes(&f, code) && !divisors.iter().any(|d| vanishes(d, code)) {
                    out.insert(f);
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn generators_match_the_canonical_form(code in code_strategy()) {
        let cf = brute_force_cf(&code).unwrap();
        let gens = pairwise_relations(&compute_generators(&code));
        prop_assert_eq!(&cf.pairwise_part(), &gens);
        prop_assert_eq!(&degree_two_oracle(&code), &gens);
    }

    #[test]
    fn reported_relations_vanish_on_the_code(code in code_strategy()) {
        let report = relations_report(&compute_generators(&code), 4);
        for f in report.pseudomonomials() {
            prop_assert!(vanishes(&f, &code), "{f} is non-zero on the code");
        }
    }

    #[test]
    fn canonical_form_is_sound_and_minimal(code in code_strategy()) {
        let cf = brute_force_cf(&code).unwrap();
        let all: Vec<PseudoMonomial> = cf.pseudomonomials.iter().cloned().collect();
        for f in &all {
            prop_assert!(vanishes(f, &code));
            prop_assert!(!all.iter().any(|g| g != f && g.divides(f)));
        }
    }

    #[test]
    fn higher_monomials_are_disjoint_sets(code in code_strategy()) {
        let gens = compute_generators(&code);
        for s in higher_monomials(&gens.minimal_disjoint_pairs(), 4) {
            let f = PseudoMonomial::monomial(s);
            prop_assert!(vanishes(&f, &code));
        }
    }
}

#[test]
fn hollow_triangle_triple_is_missed_by_pairwise_scan() {
    // x1 x2 x3 is in the canonical form, but no pair is disjoint
    let code = CodeMatrix::from_strings(&["110", "011", "101"]).unwrap();
    let cf = brute_force_cf(&code).unwrap();
    assert!(cf.contains(&PseudoMonomial::monomial(NeuronSet::from([0, 1, 2]))));
    let gens = compute_generators(&code);
    assert!(gens.minimal_disjoint_pairs().is_empty());
    assert!(higher_monomials(&gens.minimal_disjoint_pairs(), 3).is_empty());
}

#[test]
fn containment_follows_the_arithmetic() {
    // neuron 1 fires only together with neuron 2: U_1 ⊆ U_2
    let code = CodeMatrix::from_strings(&["11", "01", "00"]).unwrap();
    let gens = compute_generators(&code);
    assert_eq!(gens.containments, vec![(0, 1)]);
    let report = relations_report(&gens, 3);
    assert_eq!(report.mixed, vec![(0, 1)]);
}
