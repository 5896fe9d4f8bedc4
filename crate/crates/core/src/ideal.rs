//! Receptive-field relations of a code through its neural ideal.
//!
//! [`compute_generators`] scans every ordered pair of neuron columns once,
//! which is quadratic in the number of neurons and linear in the number of
//! distinct codewords. [`brute_force_cf`] builds the full canonical form
//! codeword by codeword and is kept as a small-`n` oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::code::{CodeMatrix, Codeword, NeuronSet};
use crate::error::{Error, Result};

/// Largest code width accepted by [`brute_force_cf`].
pub const BRUTE_FORCE_MAX_NEURONS: usize = 12;

/// `prod_{i in sigma} x_i * prod_{j in tau} (1 - x_j)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PseudoMonomial {
    sigma: NeuronSet,
    tau: NeuronSet,
}

impl PseudoMonomial {
    pub fn new(sigma: NeuronSet, tau: NeuronSet) -> Result<Self> {
        if !sigma.is_disjoint(&tau) {
            return Err(Error::InvalidInput(format!("sigma {sigma} and tau {tau} overlap")));
        }
        if sigma.is_empty() && tau.is_empty() {
            return Err(Error::InvalidInput("empty pseudo-monomial".into()));
        }
        Ok(PseudoMonomial { sigma, tau })
    }

    pub fn monomial(sigma: NeuronSet) -> Self {
        PseudoMonomial::new(sigma, NeuronSet::empty()).expect("non-empty monomial")
    }

    /// `x_i (1 - x_j)`.
    pub fn mixed(i: usize, j: usize) -> Self {
        PseudoMonomial::new(NeuronSet::from([i]), NeuronSet::from([j])).expect("i != j")
    }

    pub fn negative(j: usize) -> Self {
        PseudoMonomial::new(NeuronSet::empty(), NeuronSet::from([j])).expect("non-empty")
    }

    fn from_masks(sigma: u64, tau: u64) -> Self {
        PseudoMonomial {
            sigma: NeuronSet::from_mask(sigma),
            tau: NeuronSet::from_mask(tau),
        }
    }

    pub fn sigma(&self) -> &NeuronSet {
        &self.sigma
    }

    pub fn tau(&self) -> &NeuronSet {
        &self.tau
    }

    pub fn degree(&self) -> usize {
        self.sigma.len() + self.tau.len()
    }

    /// Value of the polynomial at a codeword (0 or 1).
    pub fn evaluate(&self, c: &Codeword) -> bool {
        self.sigma.indices().iter().all(|&i| c.get(i)) && self.tau.indices().iter().all(|&j| !c.get(j))
    }

    pub fn divides(&self, other: &PseudoMonomial) -> bool {
        self.sigma.is_subset(&other.sigma) && self.tau.is_subset(&other.tau)
    }
}

impl fmt::Display for PseudoMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in self.sigma.indices() {
            write!(f, "x{}", i + 1)?;
        }
        for j in self.tau.indices() {
            write!(f, "(1-x{})", j + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PseudoMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Output of the pairwise column scan.
///
/// Pairs are 0-based. `containments` holds `(i, j)` with `U_i ⊆ U_j`, i.e.
/// `x_i (1 - x_j)` vanishes on the code; `reverse_containments` holds the same
/// tuples flipped. Tuples are kept as constructors and never expanded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneratorSet {
    pub n_neurons: usize,
    pub disjoint_pairs: Vec<(usize, usize)>,
    pub containments: Vec<(usize, usize)>,
    pub reverse_containments: Vec<(usize, usize)>,
    pub silent_neurons: NeuronSet,
    pub always_on_neurons: NeuronSet,
    pub all_ones_present: bool,
}

impl GeneratorSet {
    /// Disjoint pairs in which neither neuron is silent. A silent neuron
    /// already contributes `x_i`, which divides every `x_i x_j`.
    pub fn minimal_disjoint_pairs(&self) -> Vec<(usize, usize)> {
        self.disjoint_pairs
            .iter()
            .copied()
            .filter(|&(i, j)| !self.silent_neurons.contains(i) && !self.silent_neurons.contains(j))
            .collect()
    }

    /// Containments whose target is not always on; otherwise `(1 - x_j)`
    /// divides `x_i (1 - x_j)`.
    pub fn minimal_containments(&self) -> Vec<(usize, usize)> {
        self.containments
            .iter()
            .copied()
            .filter(|&(_, j)| !self.always_on_neurons.contains(j))
            .collect()
    }
}

/// Pairwise column scan over the distinct codewords.
pub fn compute_generators(code: &CodeMatrix) -> GeneratorSet {
    let n = code.n_neurons();
    let m = code.n_unique();
    let cols = code.unique_columns();
    let weights: Vec<usize> = cols
        .iter()
        .map(|c| c.iter().map(|w| w.count_ones() as usize).sum())
        .collect();

    let mut gens = GeneratorSet {
        n_neurons: n,
        silent_neurons: NeuronSet::new((0..n).filter(|&i| weights[i] == 0).collect()),
        always_on_neurons: NeuronSet::new((0..n).filter(|&i| weights[i] == m).collect()),
        all_ones_present: code.unique().keys().any(Codeword::is_all_ones),
        ..Default::default()
    };

    for (i, ci) in cols.iter().enumerate() {
        for (j, cj) in cols.iter().enumerate() {
            if i == j {
                continue;
            }
            let co_active: u32 = ci.iter().zip(cj).map(|(a, b)| (a & b).count_ones()).sum();
            if co_active == 0 {
                if i < j {
                    gens.disjoint_pairs.push((i, j));
                }
                continue;
            }
            // samples where i fires and j does not
            let escapes = ci.iter().zip(cj).any(|(a, b)| a & !b != 0);
            if !escapes {
                gens.containments.push((i, j));
                gens.reverse_containments.push((j, i));
            }
        }
    }
    gens
}

/// Monomials of order 3 to `max_order` built from disjoint pairs: vertex
/// sets whose induced disjointness graph is connected, so every pair inside
/// shares a neuron with another pair inside.
pub fn higher_monomials(pairs: &[(usize, usize)], max_order: usize) -> BTreeSet<NeuronSet> {
    let mut adjacency: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(a, b) in pairs {
        if a != b {
            adjacency.entry(a).or_default().insert(b);
            adjacency.entry(b).or_default().insert(a);
        }
    }
    let mut level: BTreeSet<NeuronSet> = pairs
        .iter()
        .filter(|(a, b)| a != b)
        .map(|&(a, b)| NeuronSet::from([a, b]))
        .collect();
    let mut out = BTreeSet::new();
    for _ in 3..=max_order {
        let mut next = BTreeSet::new();
        for set in &level {
            for &v in set.indices() {
                for &u in &adjacency[&v] {
                    if !set.contains(u) {
                        next.insert(set.with(u));
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        level = next;
        if level.is_empty() {
            break;
        }
    }
    out
}

/// Minimal pseudo-monomials of degree at most two implied by the generators.
pub fn pairwise_relations(gens: &GeneratorSet) -> BTreeSet<PseudoMonomial> {
    let mut out = BTreeSet::new();
    for &i in gens.silent_neurons.indices() {
        out.insert(PseudoMonomial::monomial(NeuronSet::from([i])));
    }
    for &j in gens.always_on_neurons.indices() {
        out.insert(PseudoMonomial::negative(j));
    }
    for (i, j) in gens.minimal_disjoint_pairs() {
        out.insert(PseudoMonomial::monomial(NeuronSet::from([i, j])));
    }
    for (i, j) in gens.minimal_containments() {
        out.insert(PseudoMonomial::mixed(i, j));
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CanonicalForm {
    pub pseudomonomials: BTreeSet<PseudoMonomial>,
}

impl CanonicalForm {
    pub fn len(&self) -> usize {
        self.pseudomonomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pseudomonomials.is_empty()
    }

    pub fn contains(&self, f: &PseudoMonomial) -> bool {
        self.pseudomonomials.contains(f)
    }

    /// The elements a pairwise column scan can express: degree one,
    /// or degree two with at least one `x_i` factor.
    pub fn pairwise_part(&self) -> BTreeSet<PseudoMonomial> {
        self.pseudomonomials
            .iter()
            .filter(|f| f.degree() == 1 || (f.degree() == 2 && !f.sigma().is_empty()))
            .cloned()
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
struct Pm {
    sigma: u64,
    tau: u64,
}

impl Pm {
    #[inline]
    fn vanishes_at(self, c: u64) -> bool {
        self.sigma & !c != 0 || self.tau & c != 0
    }

    #[inline]
    fn divides(self, other: Pm) -> bool {
        self.sigma & !other.sigma == 0 && self.tau & !other.tau == 0
    }
}

/// Canonical form by the codeword-by-codeword recursion, for codes of at
/// most [`BRUTE_FORCE_MAX_NEURONS`] neurons.
pub fn brute_force_cf(code: &CodeMatrix) -> Result<CanonicalForm> {
    if code.n_neurons() > BRUTE_FORCE_MAX_NEURONS {
        return Err(Error::DimensionGuard {
            n: code.n_neurons(),
            limit: BRUTE_FORCE_MAX_NEURONS,
        });
    }
    brute_force_cf_with_budget(code, None)
}

/// Same recursion without the width guard (up to 64 neurons), aborting with
/// [`Error::Timeout`] once `budget` has elapsed.
pub fn brute_force_cf_with_budget(code: &CodeMatrix, budget: Option<Duration>) -> Result<CanonicalForm> {
    let n = code.n_neurons();
    if n > 64 {
        return Err(Error::DimensionGuard { n, limit: 64 });
    }
    let start = Instant::now();
    let over_budget = || budget.is_some_and(|b| start.elapsed() > b);
    let codewords: Vec<u64> = code
        .unique()
        .keys()
        .map(|c| c.iter_ones().fold(0u64, |m, i| m | 1 << i))
        .collect();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    let first = codewords[0];
    let mut cf: Vec<Pm> = (0..n)
        .map(|i| {
            if first >> i & 1 == 1 {
                Pm { sigma: 0, tau: 1 << i }
            } else {
                Pm { sigma: 1 << i, tau: 0 }
            }
        })
        .collect();

    for &c in &codewords[1..] {
        if over_budget() {
            return Err(Error::Timeout(budget.unwrap_or_default()));
        }
        let (keep, fail): (Vec<Pm>, Vec<Pm>) = cf.into_iter().partition(|f| f.vanishes_at(c));
        let mut grown: Vec<Pm> = Vec::new();
        for f in &fail {
            let mut free = full & !(f.sigma | f.tau);
            while free != 0 {
                let bit = free & free.wrapping_neg();
                free &= free - 1;
                // multiply by (x_j - c_j), which vanishes at c
                let g = if c & bit != 0 {
                    Pm {
                        sigma: f.sigma,
                        tau: f.tau | bit,
                    }
                } else {
                    Pm {
                        sigma: f.sigma | bit,
                        tau: f.tau,
                    }
                };
                if !keep.iter().any(|k| k.divides(g)) {
                    grown.push(g);
                }
            }
            if over_budget() {
                return Err(Error::Timeout(budget.unwrap_or_default()));
            }
        }
        grown.sort_unstable();
        grown.dedup();
        let minimal: Vec<Pm> = grown
            .iter()
            .copied()
            .filter(|&g| !grown.iter().any(|&h| h != g && h.divides(g)))
            .collect();
        cf = keep;
        cf.extend(minimal);
    }

    Ok(CanonicalForm {
        pseudomonomials: cf
            .into_iter()
            .map(|p| PseudoMonomial::from_masks(p.sigma, p.tau))
            .collect(),
    })
}

fn serialize_pairs<S: serde::Serializer>(pairs: &[(usize, usize)], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<[usize; 2]> = pairs.iter().map(|&(i, j)| [i + 1, j + 1]).collect();
    v.serialize(s)
}

/// Receptive-field relations grouped by polynomial type.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    /// Monomials keyed by order ("1", "2", ...).
    pub monomials: BTreeMap<String, Vec<NeuronSet>>,
    /// `(i, j)` meaning `x_i (1 - x_j)`: the field of `i` lies inside that of `j`.
    #[serde(serialize_with = "serialize_pairs")]
    pub mixed: Vec<(usize, usize)>,
    pub all_ones_present: bool,
    pub always_on: NeuronSet,
}

impl RelationReport {
    /// Counts per order starting at order 1, trailing zeros dropped.
    pub fn monomial_tuple(&self) -> Vec<usize> {
        let max = self
            .monomials
            .keys()
            .filter_map(|k| k.parse::<usize>().ok())
            .max()
            .unwrap_or(0);
        let mut counts: Vec<usize> = (1..=max)
            .map(|k| self.monomials.get(&k.to_string()).map_or(0, Vec::len))
            .collect();
        while counts.last() == Some(&0) {
            counts.pop();
        }
        counts
    }

    /// Tuple rendered as in summary tables, e.g. `(5,3)`, or `-` when empty.
    pub fn monomial_tuple_label(&self) -> String {
        let t = self.monomial_tuple();
        if t.is_empty() {
            "-".into()
        } else {
            let parts: Vec<String> = t.iter().map(usize::to_string).collect();
            format!("({})", parts.join(","))
        }
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.values().all(Vec::is_empty) && self.mixed.is_empty() && self.always_on.is_empty()
    }

    /// Every relation as a pseudo-monomial.
    pub fn pseudomonomials(&self) -> Vec<PseudoMonomial> {
        let mut out: Vec<PseudoMonomial> = self
            .monomials
            .values()
            .flatten()
            .cloned()
            .map(PseudoMonomial::monomial)
            .collect();
        out.extend(self.mixed.iter().map(|&(i, j)| PseudoMonomial::mixed(i, j)));
        out.extend(self.always_on.indices().iter().map(|&j| PseudoMonomial::negative(j)));
        out
    }
}

/// Relations implied by the generators, monomials up to `max_order`.
pub fn relations_report(gens: &GeneratorSet, max_order: usize) -> RelationReport {
    let mut monomials = BTreeMap::new();
    let singles: Vec<NeuronSet> = gens
        .silent_neurons
        .indices()
        .iter()
        .map(|&i| NeuronSet::from([i]))
        .collect();
    if !singles.is_empty() {
        monomials.insert("1".to_string(), singles);
    }
    let pairs = gens.minimal_disjoint_pairs();
    if max_order >= 2 && !pairs.is_empty() {
        monomials.insert(
            "2".to_string(),
            pairs.iter().map(|&(i, j)| NeuronSet::from([i, j])).collect(),
        );
    }
    let mut by_order: BTreeMap<usize, Vec<NeuronSet>> = BTreeMap::new();
    for s in higher_monomials(&pairs, max_order) {
        by_order.entry(s.len()).or_default().push(s);
    }
    for (k, v) in by_order {
        monomials.insert(k.to_string(), v);
    }
    RelationReport {
        monomials,
        mixed: gens.minimal_containments(),
        all_ones_present: gens.all_ones_present,
        always_on: gens.always_on_neurons.clone(),
    }
}
