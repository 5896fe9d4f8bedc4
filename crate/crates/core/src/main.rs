use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use neurotopo::bench::{rows_to_csv, run_bench, BenchOptions};
use neurotopo::infogeo::{Decision, NullMode, TestOptions, DEFAULT_SMOOTHING};
use neurotopo::placecell::{simulate, write_positions, SimConfig};
use neurotopo::report::{analyze, load_code, run_feature, AnalyzeOptions, Feature};
use neurotopo::{Error, Result};

#[derive(Parser)]
#[command(
    name = "neurotopo",
    version,
    about = "Receptive-field structure of combinatorial neural codes"
)]
struct Cli {
    /// Worker threads for the parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relations, topology and significance for one code.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        input_opts: InputOpts,
        #[command(flatten)]
        stats: StatOpts,
        /// Complex dimension; holes are tested below it.
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        /// Highest monomial order built from disjoint pairs.
        #[arg(long, default_value_t = 3)]
        max_order: usize,
        /// Leave out stage timings so repeated runs are byte-identical.
        #[arg(long)]
        no_timings: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Test one feature: "monomial i j", "mixed i j" or "hole m".
    Test {
        input: PathBuf,
        #[arg(long)]
        feature: String,
        #[command(flatten)]
        input_opts: InputOpts,
        #[command(flatten)]
        stats: StatOpts,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Simulate place cells along a random walk and write the code as CSV.
    Simulate {
        /// TOML file with simulation parameters; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        holes: Option<usize>,
        #[arg(long)]
        cells: Option<usize>,
        /// Walk length in minutes.
        #[arg(long)]
        minutes: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the trajectory (t, x, y) here.
        #[arg(long)]
        positions: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the generator scan against the canonical-form recursion.
    Bench {
        /// Neuron counts.
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128")]
        sizes: Vec<usize>,
        /// Distinct codewords per code.
        #[arg(long, default_value_t = 46)]
        m: usize,
        #[arg(long, default_value_t = 0.2)]
        density: f64,
        /// Seconds allowed for each canonical-form run.
        #[arg(long, default_value_t = 60.0)]
        cf_cap: f64,
        /// Time only the generator scan.
        #[arg(long)]
        no_cf: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputOpts {
    /// Input holds real activations; threshold each column at its mean.
    #[arg(long)]
    binarize: bool,
}

#[derive(Args)]
struct StatOpts {
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pseudocount added to every pattern count.
    #[arg(long, default_value_t = DEFAULT_SMOOTHING)]
    smoothing: f64,
    #[arg(long, value_enum, default_value_t = Null::Eta)]
    null_mode: Null,
}

impl StatOpts {
    fn test_options(&self) -> TestOptions {
        TestOptions {
            alpha: self.alpha,
            smoothing: self.smoothing,
            seed: self.seed,
            null_mode: match self.null_mode {
                Null::Eta => NullMode::Eta,
                Null::Theta => NullMode::Theta,
            },
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct OutputOpts {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Null {
    Eta,
    Theta,
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Analyze {
            input,
            input_opts,
            stats,
            max_dim,
            max_order,
            no_timings,
            output,
        } => {
            let (code, meta) = load_code(&input, input_opts.binarize).map_err(|e| e.at("input"))?;
            let opts = AnalyzeOptions {
                max_dim,
                max_order,
                tests: stats.test_options(),
                timings: !no_timings,
            };
            let report = analyze(&code, meta, &opts)?;
            let text = match output.format {
                Format::Json => json(&report),
                Format::Csv => report.to_csv(),
            };
            emit(&text, output.out.as_deref())
        }
        Command::Test {
            input,
            feature,
            input_opts,
            stats,
            max_dim,
            output,
        } => {
            let feature: Feature = feature.parse()?;
            let (code, _) = load_code(&input, input_opts.binarize).map_err(|e| e.at("input"))?;
            let report =
                run_feature(&code, feature, max_dim, &stats.test_options()).map_err(|e| e.at("significance"))?;
            let text = match output.format {
                Format::Json => json(&report),
                Format::Csv => report.to_csv(),
            };
            emit(&text, output.out.as_deref())?;
            if report.decision() == Decision::Significant {
                eprintln!("significant");
            } else {
                eprintln!("not significant");
            }
            Ok(())
        }
        Command::Simulate {
            config,
            holes,
            cells,
            minutes,
            seed,
            positions,
            out,
        } => {
            let mut cfg = match config {
                Some(p) => SimConfig::load(p)?,
                None => SimConfig::default(),
            };
            if let Some(h) = holes {
                cfg.n_holes = h;
            }
            if let Some(c) = cells {
                cfg.n_cells = c;
            }
            if let Some(m) = minutes {
                cfg.trajectory.duration = m * 60.0;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let sim = simulate(&cfg)?;
            if let Some(p) = positions {
                write_positions(
                    &sim.positions,
                    sim.dt,
                    std::io::BufWriter::new(std::fs::File::create(p)?),
                )?;
            }
            let mut buf = Vec::new();
            sim.code.write_csv(&mut buf)?;
            emit(&String::from_utf8(buf).expect("CSV is ASCII"), out.as_deref())
        }
        Command::Bench {
            sizes,
            m,
            density,
            cf_cap,
            no_cf,
            seed,
            format,
            out,
        } => {
            if cf_cap.is_nan() || cf_cap <= 0.0 {
                return Err(Error::Config(format!("cf-cap must be positive, got {cf_cap}")));
            }
            let opts = BenchOptions {
                sizes,
                m,
                density,
                cf_cap: (!no_cf).then(|| Duration::from_secs_f64(cf_cap)),
                seed,
                ..Default::default()
            };
            let rows = run_bench(&opts)?;
            let text = match format {
                Format::Json => json(&rows),
                Format::Csv => rows_to_csv(&rows),
            };
            emit(&text, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
