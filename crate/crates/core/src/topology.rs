//! Simplicial complex of a code and its mod-2 homology.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::code::{code_support, CodeMatrix, Codeword, NeuronSet};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Default number of intersections examined by [`local_obstruction_scan`].
pub const OBSTRUCTION_CANDIDATE_CAP: usize = 100_000;

/// Downward-closed set family, stored up to `max_dim`.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    max_dim: usize,
    n_vertices: usize,
    simplices: Vec<Vec<NeuronSet>>,
    index: Vec<HashMap<NeuronSet, usize>>,
    maximal_faces: Vec<NeuronSet>,
}

fn to_bits(n: usize, s: &NeuronSet) -> Codeword {
    Codeword::from_support(n, s.indices())
}

fn is_subset_bits(a: &Codeword, b: &Codeword) -> bool {
    a.words().iter().zip(b.words()).all(|(x, y)| x & !y == 0)
}

/// Inclusion-maximal members of a family. An empty set survives only when
/// it is the sole member.
fn maximal_sets(n: usize, family: impl IntoIterator<Item = NeuronSet>) -> Vec<NeuronSet> {
    let mut sets: Vec<NeuronSet> = family.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    if sets.is_empty() {
        return sets;
    }
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut kept: Vec<(NeuronSet, Codeword)> = Vec::new();
    for s in sets {
        let bits = to_bits(n, &s);
        if !kept.iter().any(|(_, k)| is_subset_bits(&bits, k)) {
            kept.push((s, bits));
        }
    }
    let mut out: Vec<NeuronSet> = kept.into_iter().map(|(s, _)| s).collect();
    out.sort();
    out
}

fn for_each_subset(set: &[usize], k: usize, f: &mut impl FnMut(Vec<usize>)) {
    fn rec(set: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(Vec<usize>)) {
        if cur.len() == k {
            f(cur.clone());
            return;
        }
        for i in start..set.len() {
            if set.len() - i < k - cur.len() {
                break;
            }
            cur.push(set[i]);
            rec(set, k, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(set, k, 0, &mut Vec::with_capacity(k), f);
}

impl SimplicialComplex {
    /// Downward closure of `faces`, truncated to simplices of dimension at
    /// most `max_dim`.
    pub fn from_faces(n_vertices: usize, faces: impl IntoIterator<Item = NeuronSet>, max_dim: usize) -> Self {
        let faces: Vec<NeuronSet> = faces.into_iter().collect();
        let n_vertices = faces
            .iter()
            .flat_map(|f| f.indices().last().copied())
            .map(|v| v + 1)
            .max()
            .unwrap_or(0)
            .max(n_vertices);
        let maximal_faces = maximal_sets(n_vertices, faces);
        let mut sets: Vec<HashSet<NeuronSet>> = vec![HashSet::new(); max_dim + 1];
        for f in &maximal_faces {
            let top = max_dim.min(f.len().saturating_sub(1));
            for (d, set) in sets.iter_mut().enumerate().take(top + 1) {
                if f.is_empty() {
                    break;
                }
                for_each_subset(f.indices(), d + 1, &mut |s| {
                    set.insert(NeuronSet::new(s));
                });
            }
        }
        let mut simplices = Vec::with_capacity(max_dim + 1);
        let mut index = Vec::with_capacity(max_dim + 1);
        for set in sets {
            let mut v: Vec<NeuronSet> = set.into_iter().collect();
            v.sort();
            index.push(v.iter().cloned().enumerate().map(|(k, s)| (s, k)).collect());
            simplices.push(v);
        }
        SimplicialComplex {
            max_dim,
            n_vertices,
            simplices,
            index,
            maximal_faces,
        }
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Simplices of dimension `m` (cardinality `m + 1`), sorted.
    pub fn simplices(&self, m: usize) -> &[NeuronSet] {
        self.simplices.get(m).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, m: usize) -> usize {
        self.simplices(m).len()
    }

    pub fn maximal_faces(&self) -> &[NeuronSet] {
        &self.maximal_faces
    }

    /// No faces at all, not even the empty one.
    pub fn is_void(&self) -> bool {
        self.maximal_faces.is_empty()
    }

    /// No vertices.
    pub fn is_empty(&self) -> bool {
        self.count(0) == 0
    }

    /// Largest dimension of any face, including those above `max_dim`.
    pub fn top_dim(&self) -> Option<usize> {
        self.maximal_faces
            .iter()
            .map(NeuronSet::len)
            .max()
            .filter(|&l| l > 0)
            .map(|l| l - 1)
    }

    /// Whether faces above `max_dim` were left out.
    pub fn is_truncated(&self) -> bool {
        self.top_dim().is_some_and(|d| d > self.max_dim)
    }

    pub fn contains(&self, s: &NeuronSet) -> bool {
        if s.is_empty() {
            return !self.is_void();
        }
        let d = s.len() - 1;
        if d <= self.max_dim {
            self.index[d].contains_key(s)
        } else {
            self.maximal_faces.iter().any(|f| s.is_subset(f))
        }
    }

    fn position(&self, s: &NeuronSet) -> Option<usize> {
        self.index.get(s.len().checked_sub(1)?)?.get(s).copied()
    }

    /// `(m + 1)`-subsets absent from the complex whose every `m`-face is
    /// present: the empty simplices that could fill an `m`-dimensional hole.
    pub fn empty_simplices(&self, m: usize) -> Vec<NeuronSet> {
        let mut out = BTreeSet::new();
        for tau in self.simplices(m) {
            let top = *tau.indices().last().expect("non-empty simplex");
            for v in top + 1..self.n_vertices {
                let cand = tau.with(v);
                if self.contains(&cand) {
                    continue;
                }
                let boundary_present = cand
                    .indices()
                    .iter()
                    .all(|&u| self.position(&cand.without(u)).is_some());
                if boundary_present {
                    out.insert(cand);
                }
            }
        }
        out.into_iter().collect()
    }

    /// The complex with extra faces glued in.
    pub fn with_faces(&self, extra: impl IntoIterator<Item = NeuronSet>) -> SimplicialComplex {
        let faces = self.maximal_faces.iter().cloned().chain(extra);
        SimplicialComplex::from_faces(self.n_vertices, faces, self.max_dim)
    }
}

/// `Δ(C)`: every subset of a codeword support, up to `max_dim`.
pub fn build_complex(code: &CodeMatrix, max_dim: usize) -> SimplicialComplex {
    let supports = code_support(code).into_iter().filter(|s| !s.is_empty());
    let mut cx = SimplicialComplex::from_faces(code.n_neurons(), supports, max_dim);
    if cx.maximal_faces.is_empty() && code.n_samples() > 0 {
        // only the all-zero codeword: the complex is {∅}
        cx.maximal_faces.push(NeuronSet::empty());
    }
    cx
}

/// Sparse mod-2 incidence matrix `∂_m : C_m → C_{m-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMatrix {
    pub n_rows: usize,
    /// Row indices of the non-zero entries of each column.
    pub columns: Vec<Vec<usize>>,
}

impl BoundaryMatrix {
    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn to_bits(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.n_rows, self.columns.len());
        for (c, rows) in self.columns.iter().enumerate() {
            for &r in rows {
                m.set(r, c, true);
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        if self.n_rows == 0 || self.columns.is_empty() {
            return 0;
        }
        // eliminate along the shorter side
        if self.n_rows <= self.columns.len() {
            self.to_bits().rank()
        } else {
            let mut t = BitMatrix::zeros(self.columns.len(), self.n_rows);
            for (c, rows) in self.columns.iter().enumerate() {
                for &r in rows {
                    t.set(c, r, true);
                }
            }
            t.rank()
        }
    }
}

pub fn boundary_matrix(cx: &SimplicialComplex, m: usize) -> BoundaryMatrix {
    assert!(m >= 1, "boundary maps start at dimension 1");
    let columns = cx
        .simplices(m)
        .iter()
        .map(|s| {
            let mut rows: Vec<usize> = s
                .indices()
                .iter()
                .map(|&v| {
                    cx.position(&s.without(v))
                        .expect("complex is closed under taking faces")
                })
                .collect();
            rows.sort_unstable();
            rows
        })
        .collect();
    BoundaryMatrix {
        n_rows: cx.count(m - 1),
        columns,
    }
}

/// `β_0 .. β_{max_dim-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiVector {
    pub betti: Vec<usize>,
    /// Faces above the stored dimension exist, so Betti numbers from
    /// `max_dim` upward were not computed.
    pub truncated: bool,
}

impl BettiVector {
    pub fn get(&self, m: usize) -> usize {
        self.betti.get(m).copied().unwrap_or(0)
    }
}

/// Ranks of `∂_1 ..= ∂_max_dim`, indexed by dimension (entry 0 is zero).
fn boundary_ranks(cx: &SimplicialComplex) -> Vec<usize> {
    let mut ranks = vec![0; cx.max_dim + 2];
    for (m, r) in ranks.iter_mut().enumerate().take(cx.max_dim + 1).skip(1) {
        *r = boundary_matrix(cx, m).rank();
    }
    ranks
}

pub fn betti(cx: &SimplicialComplex) -> BettiVector {
    let ranks = boundary_ranks(cx);
    let betti = (0..cx.max_dim).map(|m| cx.count(m) - ranks[m] - ranks[m + 1]).collect();
    BettiVector {
        betti,
        truncated: cx.is_truncated(),
    }
}

/// `{τ : τ ∩ σ = ∅, τ ∪ σ ∈ Δ}`, stored to the same dimension cap.
pub fn link(cx: &SimplicialComplex, sigma: &NeuronSet) -> Result<SimplicialComplex> {
    if !cx.contains(sigma) {
        return Err(Error::NotASimplex(sigma.to_string()));
    }
    let faces: Vec<NeuronSet> = cx
        .maximal_faces
        .iter()
        .filter(|f| sigma.is_subset(f))
        .map(|f| f.difference(sigma))
        .collect();
    let mut lk = SimplicialComplex::from_faces(cx.n_vertices, faces.iter().cloned(), cx.max_dim);
    if lk.maximal_faces.is_empty() {
        lk.maximal_faces.push(NeuronSet::empty());
    }
    Ok(lk)
}

/// Reduced mod-2 Betti numbers `β̃_{-1} ..= β̃_k` of the complex spanned by
/// `faces`; entry 0 is dimension -1.
fn reduced_betti(n_vertices: usize, faces: &[NeuronSet], k: usize) -> Vec<usize> {
    let cx = SimplicialComplex::from_faces(n_vertices, faces.iter().cloned(), k + 1);
    let mut out = vec![0; k + 2];
    if cx.is_empty() {
        // {∅}: only the empty face, reduced homology in dimension -1
        out[0] = usize::from(!faces.is_empty());
        return out;
    }
    let ranks = boundary_ranks(&cx);
    for m in 0..=k {
        out[m + 1] = cx.count(m) - ranks[m] - ranks[m + 1];
    }
    out[1] -= 1;
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObstructionStatus {
    /// A missing intersection whose link has non-trivial reduced homology.
    Detected { witness: NeuronSet },
    /// Every examined link is acyclic up to dimension `depth`.
    NoneDetected { depth: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionReport {
    pub status: ObstructionStatus,
    pub candidates_checked: usize,
    /// The intersection enumeration hit its cap before closing.
    pub capped: bool,
}

impl ObstructionReport {
    pub fn detected(&self) -> bool {
        matches!(self.status, ObstructionStatus::Detected { .. })
    }

    pub fn label(&self) -> String {
        match &self.status {
            ObstructionStatus::Detected { .. } => "detected".into(),
            ObstructionStatus::NoneDetected { depth } => format!("none-detected-up-to-{depth}"),
        }
    }
}

/// Non-empty intersections of maximal faces, closed under further
/// intersection, stopping after `cap` sets.
fn intersections_of(maximal: &[NeuronSet], cap: usize) -> (BTreeSet<NeuronSet>, bool) {
    let mut seen: BTreeSet<NeuronSet> = maximal.iter().cloned().collect();
    let mut frontier: Vec<NeuronSet> = maximal.to_vec();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in &frontier {
            for f in maximal {
                let x = s.intersection(f);
                if !x.is_empty() && seen.insert(x.clone()) {
                    if seen.len() >= cap {
                        return (seen, true);
                    }
                    next.push(x);
                }
            }
        }
        frontier = next;
    }
    (seen, false)
}

/// Looks for local obstructions to convexity: a non-empty intersection of
/// maximal faces, missing from the code, whose link has non-zero reduced
/// homology up to dimension `max_dim - 1`.
pub fn local_obstruction_scan(code: &CodeMatrix, cx: &SimplicialComplex) -> ObstructionReport {
    local_obstruction_scan_capped(code, cx, OBSTRUCTION_CANDIDATE_CAP)
}

pub fn local_obstruction_scan_capped(code: &CodeMatrix, cx: &SimplicialComplex, cap: usize) -> ObstructionReport {
    let depth = cx.max_dim.saturating_sub(1);
    let supports = code_support(code);
    let (cands, capped) = intersections_of(&cx.maximal_faces, cap);
    let mut checked = 0;
    for sigma in cands.iter().filter(|s| !s.is_empty() && !supports.contains(*s)) {
        checked += 1;
        let lk: Vec<NeuronSet> = cx
            .maximal_faces
            .iter()
            .filter(|f| sigma.is_subset(f))
            .map(|f| f.difference(sigma))
            .collect();
        if reduced_betti(cx.n_vertices, &lk, depth).iter().any(|&b| b > 0) {
            return ObstructionReport {
                status: ObstructionStatus::Detected { witness: sigma.clone() },
                candidates_checked: checked,
                capped,
            };
        }
    }
    ObstructionReport {
        status: ObstructionStatus::NoneDetected { depth },
        candidates_checked: checked,
        capped,
    }
}

/// Closed under non-empty pairwise intersection of supports.
pub fn intersection_complete(code: &CodeMatrix) -> bool {
    let n = code.n_neurons();
    let supports: Vec<Codeword> = code.unique().keys().filter(|c| c.count_ones() > 0).cloned().collect();
    let present: HashSet<&[u64]> = supports.iter().map(Codeword::words).collect();
    let mut buf = vec![0u64; Codeword::zeros(n).words().len()];
    for (a, sa) in supports.iter().enumerate() {
        for sb in &supports[a + 1..] {
            let mut any = 0;
            for ((d, x), y) in buf.iter_mut().zip(sa.words()).zip(sb.words()) {
                *d = x & y;
                any |= *d;
            }
            if any != 0 && !present.contains(buf.as_slice()) {
                return false;
            }
        }
    }
    true
}

/// Convex realizations in `R^d` have nerves with no homology from
/// dimension `d` up, so `β_m > 0` forces `d >= m + 1`.
pub fn dimension_lower_bound(bv: &BettiVector) -> usize {
    bv.betti
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &b)| b > 0)
        .map(|(m, _)| m + 1)
        .max()
        .unwrap_or(1)
        .max(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TopologyReport {
    pub betti: Vec<usize>,
    pub truncated: bool,
    pub dim_lower_bound: usize,
    pub intersection_complete: bool,
    pub local_obstruction: String,
}

pub fn topology_report(code: &CodeMatrix, cx: &SimplicialComplex) -> TopologyReport {
    let bv = betti(cx);
    TopologyReport {
        dim_lower_bound: dimension_lower_bound(&bv),
        intersection_complete: intersection_complete(code),
        local_obstruction: local_obstruction_scan(code, cx).label(),
        truncated: bv.truncated,
        betti: bv.betti,
    }
}
