//! Combinatorial neural codes: codewords, supports, and CSV ingestion.
//!
//! A [`CodeMatrix`] keeps every row (time bin or stimulus sample) in input
//! order together with a multiplicity table of the distinct codewords. The
//! algebraic and topological routines only look at the distinct supports;
//! the information-geometric routines need the multiplicities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A fixed-width binary vector packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Codeword {
    words: Vec<u64>,
    len: usize,
}

impl Codeword {
    pub fn zeros(len: usize) -> Self {
        Codeword {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut c = Codeword::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                c.set(i, true);
            }
        }
        c
    }

    /// Builds a codeword of width `len` with ones at the given 0-based positions.
    pub fn from_support(len: usize, active: &[usize]) -> Self {
        let mut c = Codeword::zeros(len);
        for &i in active {
            c.set(i, true);
        }
        c
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for width {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_all_ones(&self) -> bool {
        self.count_ones() == self.len
    }

    pub fn support(&self) -> NeuronSet {
        support(self)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A strictly increasing set of 0-based neuron indices.
///
/// Displayed and serialized 1-based (`{1,3}`), which is how neurons are
/// numbered in reports and on the command line.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NeuronSet(Vec<usize>);

impl NeuronSet {
    pub fn empty() -> Self {
        NeuronSet(Vec::new())
    }

    /// Sorts and deduplicates.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        NeuronSet(indices)
    }

    /// Builds from 1-based indices as written in reports and CLI arguments.
    pub fn from_one_based(indices: &[usize]) -> Result<Self> {
        if indices.contains(&0) {
            return Err(Error::InvalidInput("neuron indices are 1-based; got 0".into()));
        }
        Ok(NeuronSet::new(indices.iter().map(|i| i - 1).collect()))
    }

    pub fn from_mask(mask: u64) -> Self {
        let mut v = Vec::with_capacity(mask.count_ones() as usize);
        let mut m = mask;
        while m != 0 {
            v.push(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        NeuronSet(v)
    }

    /// Bit mask of the set; every index must be below 64.
    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &i| {
            assert!(i < 64, "neuron index {i} does not fit a 64-bit mask");
            m | 1 << i
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &NeuronSet) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|x| it.any(|y| y == x))
    }

    pub fn is_disjoint(&self, other: &NeuronSet) -> bool {
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() && b < other.0.len() {
            match self.0[a].cmp(&other.0[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn intersection(&self, other: &NeuronSet) -> NeuronSet {
        NeuronSet(self.0.iter().copied().filter(|i| other.contains(*i)).collect())
    }

    pub fn union(&self, other: &NeuronSet) -> NeuronSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        NeuronSet::new(v)
    }

    pub fn difference(&self, other: &NeuronSet) -> NeuronSet {
        NeuronSet(self.0.iter().copied().filter(|i| !other.contains(*i)).collect())
    }

    pub fn with(&self, i: usize) -> NeuronSet {
        let mut v = self.0.clone();
        v.push(i);
        NeuronSet::new(v)
    }

    pub fn without(&self, i: usize) -> NeuronSet {
        NeuronSet(self.0.iter().copied().filter(|&x| x != i).collect())
    }

    /// 1-based indices, as used in reports.
    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }
}

impl From<Vec<usize>> for NeuronSet {
    fn from(v: Vec<usize>) -> Self {
        NeuronSet::new(v)
    }
}

impl<const N: usize> From<[usize; N]> for NeuronSet {
    fn from(v: [usize; N]) -> Self {
        NeuronSet::new(v.to_vec())
    }
}

impl fmt::Debug for NeuronSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for NeuronSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

impl Serialize for NeuronSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

pub fn support(c: &Codeword) -> NeuronSet {
    NeuronSet(c.iter_ones().collect())
}

/// A binary code: one row per time bin or stimulus sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeMatrix {
    n_neurons: usize,
    rows: Vec<Codeword>,
    unique: BTreeMap<Codeword, usize>,
}

impl CodeMatrix {
    pub fn from_codewords(n_neurons: usize, rows: Vec<Codeword>) -> Result<Self> {
        if n_neurons == 0 {
            return Err(Error::InvalidInput("a code needs at least one neuron".into()));
        }
        if rows.is_empty() {
            return Err(Error::Empty);
        }
        let mut unique = BTreeMap::new();
        for (k, r) in rows.iter().enumerate() {
            if r.len() != n_neurons {
                return Err(Error::InvalidInput(format!(
                    "row {} has {} entries, expected {n_neurons}",
                    k + 1,
                    r.len()
                )));
            }
            *unique.entry(r.clone()).or_insert(0) += 1;
        }
        Ok(CodeMatrix {
            n_neurons,
            rows,
            unique,
        })
    }

    /// Rows of 0/1 entries.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.first().map(|r| r.as_ref().len()).ok_or(Error::Empty)?;
        let mut words = Vec::with_capacity(rows.len());
        for (k, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::InvalidInput(format!(
                    "row {} has {} entries, expected {n}",
                    k + 1,
                    r.len()
                )));
            }
            let mut c = Codeword::zeros(n);
            for (i, &b) in r.iter().enumerate() {
                match b {
                    0 => {}
                    1 => c.set(i, true),
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "row {} holds non-binary entry {other}",
                            k + 1
                        )))
                    }
                }
            }
            words.push(c);
        }
        CodeMatrix::from_codewords(n, words)
    }

    /// Rows written as bit strings, e.g. `["110", "011"]`.
    pub fn from_strings(rows: &[&str]) -> Result<Self> {
        let parsed: Vec<Vec<u8>> = rows
            .iter()
            .map(|s| s.bytes().map(|b| b.wrapping_sub(b'0')).collect())
            .collect();
        CodeMatrix::from_rows(&parsed)
    }

    /// Rows given by 0-based supports.
    pub fn from_supports(n_neurons: usize, supports: &[&[usize]]) -> Result<Self> {
        let rows = supports.iter().map(|s| Codeword::from_support(n_neurons, s)).collect();
        CodeMatrix::from_codewords(n_neurons, rows)
    }

    pub fn n_neurons(&self) -> usize {
        self.n_neurons
    }

    pub fn n_samples(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Codeword] {
        &self.rows
    }

    /// Distinct codewords with their occurrence counts, in codeword order.
    pub fn unique(&self) -> &BTreeMap<Codeword, usize> {
        &self.unique
    }

    pub fn n_unique(&self) -> usize {
        self.unique.len()
    }

    /// Column-packed view of the distinct codewords: one bit vector per
    /// neuron with one bit per distinct codeword.
    pub fn unique_columns(&self) -> Vec<Vec<u64>> {
        let m = self.unique.len();
        let mut cols = vec![vec![0u64; words_for(m)]; self.n_neurons];
        for (k, c) in self.unique.keys().enumerate() {
            for i in c.iter_ones() {
                cols[i][k / WORD] |= 1 << (k % WORD);
            }
        }
        cols
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut line = String::with_capacity(2 * self.n_neurons);
        for r in &self.rows {
            line.clear();
            for i in 0..self.n_neurons {
                if i > 0 {
                    line.push(',');
                }
                line.push(if r.get(i) { '1' } else { '0' });
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

/// Parses a headerless CSV of 0/1 entries, one codeword per line.
pub fn parse_code_csv(path: impl AsRef<Path>) -> Result<CodeMatrix> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    read_code_csv(file, path)
}

pub fn read_code_csv<R: Read>(reader: R, path: &Path) -> Result<CodeMatrix> {
    let mut rows = Vec::new();
    let mut width = None;
    for (k, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = k + 1;
        let fmt_err = |message: String| Error::Format {
            path: path.to_path_buf(),
            line: lineno,
            message,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(fmt_err(format!("expected {w} entries, found {}", fields.len())))
            }
            _ => {}
        }
        let mut c = Codeword::zeros(fields.len());
        for (i, f) in fields.iter().enumerate() {
            match *f {
                "0" => {}
                "1" => c.set(i, true),
                other => return Err(fmt_err(format!("non-binary entry {other:?}"))),
            }
        }
        rows.push(c);
    }
    let n = width.ok_or(Error::Empty)?;
    CodeMatrix::from_codewords(n, rows)
}

/// Real-valued activations, samples by neurons.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivationMatrix {
    n_neurons: usize,
    values: Vec<f64>,
}

impl ActivationMatrix {
    pub fn new(n_neurons: usize, values: Vec<f64>) -> Result<Self> {
        if n_neurons == 0 || values.is_empty() || !values.len().is_multiple_of(n_neurons) {
            return Err(Error::InvalidInput(format!(
                "{} values do not form rows of {n_neurons} neurons",
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite activation at sample {}, neuron {}",
                k / n_neurons + 1,
                k % n_neurons + 1
            )));
        }
        Ok(ActivationMatrix { n_neurons, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.first().map(Vec::len).ok_or(Error::Empty)?;
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("ragged activation rows".into()));
        }
        ActivationMatrix::new(n, rows.concat())
    }

    pub fn n_neurons(&self) -> usize {
        self.n_neurons
    }

    pub fn n_samples(&self) -> usize {
        self.values.len() / self.n_neurons
    }

    pub fn get(&self, sample: usize, neuron: usize) -> f64 {
        self.values[sample * self.n_neurons + neuron]
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_neurons];
        for row in self.values.chunks_exact(self.n_neurons) {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        let m = self.n_samples() as f64;
        sums.into_iter().map(|s| s / m).collect()
    }
}

/// Activation CSV: comma-separated reals, one sample per line. A first line
/// that does not parse as numbers is taken as a header and skipped.
pub fn parse_activation_csv(path: impl AsRef<Path>) -> Result<ActivationMatrix> {
    let path = path.as_ref();
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(r) => {
                if let Some(first) = rows.first() {
                    if first.len() != r.len() {
                        return Err(Error::Format {
                            path: path.to_path_buf(),
                            line: k + 1,
                            message: format!("expected {} entries, found {}", first.len(), r.len()),
                        });
                    }
                }
                rows.push(r)
            }
            Err(_) if k == 0 => continue,
            Err(e) => {
                return Err(Error::Format {
                    path: path.to_path_buf(),
                    line: k + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    ActivationMatrix::from_rows(&rows)
}

/// Bit is set iff the activation lies strictly above its column mean.
pub fn binarize(act: &ActivationMatrix) -> CodeMatrix {
    let means = act.column_means();
    let n = act.n_neurons();
    let rows = (0..act.n_samples())
        .map(|s| {
            let mut c = Codeword::zeros(n);
            for (i, mean) in means.iter().enumerate() {
                if act.get(s, i) > *mean {
                    c.set(i, true);
                }
            }
            c
        })
        .collect();
    CodeMatrix::from_codewords(n, rows).expect("activation matrix is non-empty")
}

pub fn code_support(code: &CodeMatrix) -> BTreeSet<NeuronSet> {
    code.unique().keys().map(support).collect()
}
