//! End-to-end analysis of one code: receptive-field relations, topology of
//! the code complex, and significance of the detected features.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::code::{binarize, parse_activation_csv, parse_code_csv, CodeMatrix};
use crate::error::{Error, Result};
use crate::ideal::{compute_generators, relations_report, RelationReport};
use crate::infogeo::{
    test_hole, test_mixed_monomial, test_monomial, Decision, FeatureReport, HoleReport, HypothesisResult, NullMode,
    TestOptions,
};
use crate::topology::{build_complex, topology_report, TopologyReport};

/// Version of the JSON layout in `schema/analysis-report.schema.json`.
pub const SCHEMA_VERSION: &str = "1.0.0";

/// The published JSON schema for [`AnalysisReport`].
pub const REPORT_SCHEMA: &str = include_str!("../schema/analysis-report.schema.json");

const DIM_BOUND_RULE: &str = "homological: beta_m > 0 implies dimension >= m + 1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputMeta {
    pub source: String,
    /// Neurons.
    pub n: usize,
    /// Samples (rows).
    pub m: usize,
    pub unique_codewords: usize,
    pub binarized: bool,
}

/// Reads a 0/1 code CSV, or an activation CSV thresholded at column means.
pub fn load_code(path: impl AsRef<Path>, activations: bool) -> Result<(CodeMatrix, InputMeta)> {
    let path = path.as_ref();
    let code = if activations {
        binarize(&parse_activation_csv(path)?)
    } else {
        parse_code_csv(path)?
    };
    let meta = describe(&code, path.display().to_string(), activations);
    Ok((code, meta))
}

pub fn describe(code: &CodeMatrix, source: String, binarized: bool) -> InputMeta {
    InputMeta {
        source,
        n: code.n_neurons(),
        m: code.n_samples(),
        unique_codewords: code.n_unique(),
        binarized,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyzeOptions {
    pub max_dim: usize,
    /// Highest monomial order enumerated from the pairwise relations.
    pub max_order: usize,
    pub tests: TestOptions,
    pub timings: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            max_dim: 2,
            max_order: 3,
            tests: TestOptions::default(),
            timings: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorSummary {
    /// Monomial counts by order, starting at order 1.
    pub monomials: Vec<usize>,
    pub monomials_label: String,
    pub mixed: usize,
    pub all_ones_present: bool,
    pub relations: RelationReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct TopologySummary {
    #[serde(flatten)]
    pub report: TopologyReport,
    pub max_dim: usize,
    /// Simplices per dimension, up to `max_dim`.
    pub simplex_counts: Vec<usize>,
    pub dim_lower_bound_rule: &'static str,
    /// Set when faces above `max_dim` were dropped, so the top Betti
    /// number is only an upper bound.
    pub caveat: Option<&'static str>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SignificantCounts {
    pub monomials: usize,
    pub mixed: usize,
    pub holes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SignificanceSummary {
    pub null_mode: NullMode,
    pub alpha: f64,
    pub smoothing: f64,
    pub seed: u64,
    pub correction: &'static str,
    pub monomials: Vec<FeatureReport>,
    pub mixed: Vec<FeatureReport>,
    pub holes: Vec<HoleReport>,
    pub significant: SignificantCounts,
}

/// Wall-clock time per stage in milliseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub generators: f64,
    pub topology: f64,
    pub significance: f64,
    pub total: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema_version: &'static str,
    pub input: InputMeta,
    pub generators: GeneratorSummary,
    pub topology: TopologySummary,
    pub significance: SignificanceSummary,
    #[serde(rename = "timings_ms", skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Runs every stage on `code`. Errors carry the stage that raised them.
pub fn analyze(code: &CodeMatrix, input: InputMeta, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    if opts.max_dim == 0 {
        return Err(Error::Config("max_dim must be at least 1".into()));
    }
    let start = Instant::now();

    let t = Instant::now();
    let gens = compute_generators(code);
    let relations = relations_report(&gens, opts.max_order);
    let generators = GeneratorSummary {
        monomials: relations.monomial_tuple(),
        monomials_label: relations.monomial_tuple_label(),
        mixed: relations.mixed.len(),
        all_ones_present: relations.all_ones_present,
        relations,
    };
    let t_gen = ms(t);

    let t = Instant::now();
    let cx = build_complex(code, opts.max_dim);
    let report = topology_report(code, &cx);
    let topology = TopologySummary {
        caveat: report.truncated.then_some("upper-truncation"),
        max_dim: opts.max_dim,
        simplex_counts: (0..=opts.max_dim).map(|d| cx.count(d)).collect(),
        dim_lower_bound_rule: DIM_BOUND_RULE,
        report,
    };
    let t_top = ms(t);

    let t = Instant::now();
    let o = &opts.tests;
    let monomials = generators
        .relations
        .monomials
        .get("2")
        .map(|pairs| {
            pairs
                .iter()
                .map(|s| test_monomial(code, s.indices()[0], s.indices()[1], o))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()
        .map_err(|e| e.at("significance"))?
        .unwrap_or_default();
    let mixed = generators
        .relations
        .mixed
        .iter()
        .map(|&(i, j)| test_mixed_monomial(code, i, j, o))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at("significance"))?;
    let holes = (1..opts.max_dim)
        .map(|m| test_hole(code, &cx, m, o))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at("significance"))?;
    let count = |v: &[FeatureReport]| v.iter().filter(|f| f.decision == Decision::Significant).count();
    let significant = SignificantCounts {
        monomials: count(&monomials),
        mixed: count(&mixed),
        holes: holes.iter().map(|h| h.significant_holes).sum(),
    };
    let significance = SignificanceSummary {
        null_mode: o.null_mode,
        alpha: o.alpha,
        smoothing: o.smoothing,
        seed: o.seed,
        correction: "holm",
        monomials,
        mixed,
        holes,
        significant,
    };
    let t_sig = ms(t);

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        input,
        generators,
        topology,
        significance,
        timings: opts.timings.then(|| Timings {
            generators: t_gen,
            topology: t_top,
            significance: t_sig,
            total: ms(start),
        }),
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn tuple(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(usize::to_string).collect();
    format!("({})", parts.join(","))
}

impl AnalysisReport {
    /// One header line and one summary row.
    pub fn to_csv(&self) -> String {
        let mut header = vec![
            "source",
            "n",
            "m",
            "monomials",
            "mixed",
            "all_ones_present",
            "betti",
            "dim_lower_bound",
            "intersection_complete",
            "local_obstruction",
            "significant_monomials",
            "significant_mixed",
            "significant_holes",
        ];
        let s = &self.significance.significant;
        let mut row = vec![
            csv_field(&self.input.source),
            self.input.n.to_string(),
            self.input.m.to_string(),
            csv_field(&self.generators.monomials_label),
            self.generators.mixed.to_string(),
            self.generators.all_ones_present.to_string(),
            csv_field(&tuple(&self.topology.report.betti)),
            self.topology.report.dim_lower_bound.to_string(),
            self.topology.report.intersection_complete.to_string(),
            self.topology.report.local_obstruction.clone(),
            s.monomials.to_string(),
            s.mixed.to_string(),
            s.holes.to_string(),
        ];
        if let Some(t) = &self.timings {
            header.extend(["t_generators_ms", "t_topology_ms", "t_significance_ms", "t_total_ms"]);
            row.extend([t.generators, t.topology, t.significance, t.total].map(|x| format!("{x:.3}")));
        }
        format!("{}\n{}\n", header.join(","), row.join(","))
    }
}

/// A feature named on the command line, neurons 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Feature {
    Monomial(usize, usize),
    Mixed(usize, usize),
    Hole(usize),
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let num = |k: usize| -> Result<usize> {
            parts
                .get(k)
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::Config(format!("bad feature {s:?}")))
        };
        let neuron = |k: usize| -> Result<usize> {
            num(k)?
                .checked_sub(1)
                .ok_or_else(|| Error::Config(format!("neurons are numbered from 1 in {s:?}")))
        };
        let feature = match parts.first().copied() {
            Some("monomial") if parts.len() == 3 => Feature::Monomial(neuron(1)?, neuron(2)?),
            Some("mixed") if parts.len() == 3 => Feature::Mixed(neuron(1)?, neuron(2)?),
            Some("hole") if parts.len() == 2 => Feature::Hole(num(1)?),
            _ => {
                return Err(Error::Config(format!(
                    "unknown feature {s:?}; expected \"monomial i j\", \"mixed i j\" or \"hole m\""
                )))
            }
        };
        Ok(feature)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum TestReport {
    Feature(FeatureReport),
    Hole(HoleReport),
}

impl TestReport {
    pub fn decision(&self) -> Decision {
        match self {
            TestReport::Feature(f) => f.decision,
            TestReport::Hole(h) => h.decision,
        }
    }

    fn tests(&self) -> Vec<&HypothesisResult> {
        match self {
            TestReport::Feature(f) => f.tests.iter().collect(),
            TestReport::Hole(h) => h.candidates.iter().map(|c| &c.test).collect(),
        }
    }

    /// One row per underlying test.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("A,M,lambda,threshold,raw_p,effect,significant\n");
        let set = |s: &crate::code::NeuronSet| {
            let v: Vec<String> = s.one_based().iter().map(usize::to_string).collect();
            v.join(" ")
        };
        for t in self.tests() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                set(&t.a),
                set(&t.m),
                t.lambda,
                t.chi2_threshold,
                t.raw_p,
                t.effect,
                t.significant
            );
        }
        out
    }
}

/// Tests one named feature of `code`.
pub fn run_feature(code: &CodeMatrix, feature: Feature, max_dim: usize, opts: &TestOptions) -> Result<TestReport> {
    let r = match feature {
        Feature::Monomial(i, j) => TestReport::Feature(test_monomial(code, i, j, opts)?),
        Feature::Mixed(i, j) => TestReport::Feature(test_mixed_monomial(code, i, j, opts)?),
        Feature::Hole(m) => {
            let cx = build_complex(code, max_dim.max(m + 1));
            TestReport::Hole(test_hole(code, &cx, m, opts)?)
        }
    };
    Ok(r)
}
