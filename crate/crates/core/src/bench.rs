//! Timing of the pairwise generator scan against the recursive canonical
//! form on synthetic codes.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::hint::black_box;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::code::{CodeMatrix, Codeword};
use crate::error::{Error, Result};
use crate::ideal::{brute_force_cf_with_budget, compute_generators, pairwise_relations};

/// `m` distinct random codewords on `n` neurons, each bit on with
/// probability `density`.
pub fn random_code(n: usize, m: usize, density: f64, seed: u64) -> Result<CodeMatrix> {
    if n == 0 || m == 0 || !(0.0..=1.0).contains(&density) {
        return Err(Error::Config(format!(
            "bad synthetic code shape n={n}, m={m}, density={density}"
        )));
    }
    if n < 64 && m as u128 > 1u128 << n {
        return Err(Error::Config(format!(
            "{m} distinct codewords do not fit on {n} neurons"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut rows = Vec::with_capacity(m);
    let mut tries = 0usize;
    while rows.len() < m {
        tries += 1;
        if tries > 1000 * m + 10_000 {
            return Err(Error::Config(format!(
                "could not draw {m} distinct codewords at density {density}"
            )));
        }
        let bits: Vec<bool> = (0..n).map(|_| rng.random_bool(density)).collect();
        let c = Codeword::from_bits(&bits);
        if seen.insert(c.clone()) {
            rows.push(c);
        }
    }
    CodeMatrix::from_codewords(n, rows)
}

/// Mean seconds per call of `compute_generators`, repeating for at least
/// `min_time` and three calls.
pub fn time_generators(code: &CodeMatrix, min_time: Duration) -> f64 {
    let start = Instant::now();
    let mut calls = 0u32;
    while calls < 3 || start.elapsed() < min_time {
        black_box(compute_generators(black_box(code)));
        calls += 1;
    }
    start.elapsed().as_secs_f64() / f64::from(calls)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CfStatus {
    Finished,
    Timeout,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    /// Seconds per call.
    pub t_gen: f64,
    /// Seconds; the cap when the oracle timed out.
    pub t_cf: Option<f64>,
    pub cf_status: CfStatus,
    /// Whether both agree on the relations among at most two neurons.
    pub agree: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchOptions {
    pub sizes: Vec<usize>,
    pub m: usize,
    pub density: f64,
    /// Time budget for the canonical form; `None` skips it.
    pub cf_cap: Option<Duration>,
    pub min_time: Duration,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            sizes: vec![8, 16, 32, 64, 128],
            m: 46,
            density: 0.2,
            cf_cap: Some(Duration::from_secs(60)),
            min_time: Duration::from_millis(200),
            seed: 0,
        }
    }
}

pub fn bench_one(code: &CodeMatrix, opts: &BenchOptions) -> Result<BenchRow> {
    let t_gen = time_generators(code, opts.min_time);
    let (t_cf, cf_status, agree) = match opts.cf_cap {
        Some(cap) if code.n_neurons() <= 64 => {
            let start = Instant::now();
            match brute_force_cf_with_budget(code, Some(cap)) {
                Ok(cf) => {
                    let t = start.elapsed().as_secs_f64();
                    let same = cf.pairwise_part() == pairwise_relations(&compute_generators(code));
                    (Some(t), CfStatus::Finished, Some(same))
                }
                Err(Error::Timeout(_)) => (Some(cap.as_secs_f64()), CfStatus::Timeout, None),
                Err(e) => return Err(e),
            }
        }
        _ => (None, CfStatus::Skipped, None),
    };
    Ok(BenchRow {
        n: code.n_neurons(),
        m: code.n_samples(),
        t_gen,
        t_cf,
        cf_status,
        agree,
    })
}

/// One row per size in `opts.sizes`, codes drawn with consecutive seeds.
pub fn run_bench(opts: &BenchOptions) -> Result<Vec<BenchRow>> {
    opts.sizes
        .iter()
        .enumerate()
        .map(|(k, &n)| bench_one(&random_code(n, opts.m, opts.density, opts.seed + k as u64)?, opts))
        .collect()
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("n,m,t_gen,t_cf,cf_status\n");
    for r in rows {
        let t_cf = r.t_cf.map(|t| format!("{t:.6e}")).unwrap_or_default();
        let status = match r.cf_status {
            CfStatus::Finished => "finished",
            CfStatus::Timeout => "timeout",
            CfStatus::Skipped => "skipped",
        };
        let _ = writeln!(out, "{},{},{:.6e},{},{}", r.n, r.m, r.t_gen, t_cf, status);
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
