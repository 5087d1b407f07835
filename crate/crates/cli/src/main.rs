//! `gpe`: permutation profiles, entropies, window sweeps and experiments.

mod cache;
mod io;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use gpe_core::analysis::{
    default_sweep_range, estimate_half_period, evaluate, window_size_sweep,
    windowed_entropy_strided, DelayChoice, EntropyParams,
};
use gpe_core::cornertree::BASIS_VERSION;
use gpe_core::entropy::{CtpeOptions, EntropyKind};
use gpe_core::experiments::config::parse_list;
use gpe_core::experiments::ramp::realizations;
use gpe_core::experiments::rng::RNG_ALGORITHM;
use gpe_core::experiments::ExperimentConfig;
use gpe_core::profile::{profile, MethodChoice, ProfileOptions, DEFAULT_GUARD};
use gpe_core::{TimeSeries, WindowSpec};
use serde_json::json;

/// A validation failure outside the core library (bad input file, bad flag value).
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

#[derive(Parser)]
#[command(name = "gpe", about = "Global permutation entropy and friends")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full k-profile of a series.
    Profile(ProfileArgs),
    /// One entropy value for a whole series.
    Entropy(EntropyArgs),
    /// Sliding-window entropy series.
    Sweep(SweepArgs),
    /// Mean entropy against window width, and the half-period estimate.
    Windowsize(WindowsizeArgs),
    /// Run a seeded experiment from a config file.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Fast,
    Fallback,
    Oracle,
}

impl From<Method> for MethodChoice {
    fn from(m: Method) -> Self {
        match m {
            Method::Auto => MethodChoice::Auto,
            Method::Fast => MethodChoice::Fast,
            Method::Fallback => MethodChoice::Fallback,
            Method::Oracle => MethodChoice::Oracle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gpe,
    Pe,
    Peavg,
    Ctpe,
}

impl From<Kind> for EntropyKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Gpe => EntropyKind::Gpe,
            Kind::Pe => EntropyKind::Pe,
            Kind::Peavg => EntropyKind::PeAvg,
            Kind::Ctpe => EntropyKind::Ctpe,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Counting {
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
    /// Largest C(n,k) the enumeration fallback accepts.
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard: u128,
}

impl Counting {
    fn options(&self) -> ProfileOptions {
        ProfileOptions {
            method: self.method.into(),
            guard: self.guard,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct ProfileArgs {
    /// Numeric CSV (`-` for stdin).
    input: PathBuf,
    #[arg(short = 'k', long)]
    order: usize,
    #[command(flatten)]
    counting: Counting,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Measure {
    #[arg(long, value_enum, default_value = "gpe")]
    kind: Kind,
    #[arg(short = 'k', long)]
    order: usize,
    /// PE delay (default 1).
    #[arg(long, conflicts_with = "delays")]
    delay: Option<usize>,
    /// PEavg delay set, e.g. `1..10` or `1,2,5` (default: all feasible).
    #[arg(long)]
    delays: Option<String>,
    #[command(flatten)]
    counting: Counting,
}

impl Measure {
    fn params(&self) -> Result<EntropyParams> {
        let delay = match (self.delay, &self.delays) {
            (Some(t), _) => DelayChoice::Single(t),
            (None, Some(s)) => {
                DelayChoice::Set(parse_list(s).map_err(|m| Invalid(format!("--delays: {m}")))?)
            }
            (None, None) => DelayChoice::Default,
        };
        Ok(EntropyParams {
            delay,
            profile: self.counting.options(),
            ctpe: CtpeOptions::default(),
        })
    }
}

#[derive(Args)]
struct EntropyArgs {
    input: PathBuf,
    #[command(flatten)]
    measure: Measure,
}

#[derive(Args)]
struct SweepArgs {
    input: PathBuf,
    #[command(flatten)]
    measure: Measure,
    #[arg(short, long)]
    window: usize,
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// CSV destination (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct WindowsizeArgs {
    /// One file per realization.
    #[arg(required_unless_present = "ramp_period")]
    inputs: Vec<PathBuf>,
    /// Generate ramp-noise realizations with this period instead of reading files.
    #[arg(long, conflicts_with = "inputs")]
    ramp_period: Option<usize>,
    #[arg(long, default_value_t = 1.0, requires = "ramp_period")]
    variance: f64,
    #[arg(long, default_value_t = 100, requires = "ramp_period")]
    realizations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    measure: Measure,
    #[arg(long = "min")]
    w_min: Option<usize>,
    #[arg(long = "max")]
    w_max: Option<usize>,
    /// Sweep curve CSV destination.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn version_text() -> String {
    format!(
        "{}\nbasis version {BASIS_VERSION}\nrng {RNG_ALGORITHM}",
        env!("CARGO_PKG_VERSION")
    )
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let version: &'static str = Box::leak(version_text().into_boxed_str());
    let matches = Cli::command().version(version).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(core) = e.downcast_ref::<gpe_core::Error>() {
        if core.is_guard() {
            3
        } else if core.is_internal() {
            1
        } else {
            2
        }
    } else if e.downcast_ref::<Invalid>().is_some() {
        2
    } else {
        1
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Invalid("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    cache::load_or_build()?;
    match cli.command {
        Command::Profile(a) => cmd_profile(a),
        Command::Entropy(a) => cmd_entropy(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Windowsize(a) => cmd_windowsize(a),
        Command::Experiment(a) => cmd_experiment(a),
    }
}

fn to_json_bytes(v: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn cmd_profile(a: ProfileArgs) -> Result<()> {
    let ts = io::read_series(&a.input)?;
    let p = profile(&ts.ranks(), a.order, &a.counting.options())?;
    let bytes = match a.format {
        Format::Json => to_json_bytes(&p.to_json()),
        Format::Csv => {
            let mut s = String::from("pattern,count\n");
            for (pat, c) in p.iter() {
                s.push_str(&format!("{pat},{c}\n"));
            }
            s.into_bytes()
        }
    };
    io::emit(a.output.as_deref(), &bytes)
}

fn cmd_entropy(a: EntropyArgs) -> Result<()> {
    let ts = io::read_series(&a.input)?;
    let m = &a.measure;
    let params = m.params()?;
    let kind = m.kind.into();
    let delay = params.resolve_delay(kind, m.order, ts.len())?;
    let v = evaluate(&ts.ranks(), kind, m.order, &delay, &params)?;
    io::emit(None, &to_json_bytes(&v.to_json()))
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let ts = io::read_series(&a.input)?;
    let m = &a.measure;
    let spec = WindowSpec::new(a.window, a.stride);
    let series = windowed_entropy_strided(&ts, m.kind.into(), m.order, spec, &m.params()?)?;
    let mut buf = vec![];
    series.write_csv(&mut buf)?;
    io::emit(a.output.as_deref(), &buf)
}

fn cmd_windowsize(a: WindowsizeArgs) -> Result<()> {
    let reals: Vec<TimeSeries> = match a.ramp_period {
        Some(p) => realizations(p, a.variance, a.realizations, a.seed)?,
        None => a
            .inputs
            .iter()
            .map(|p| io::read_series(p))
            .collect::<Result<_>>()?,
    };
    let m = &a.measure;
    let shortest = reals.iter().map(TimeSeries::len).min().unwrap_or(0);
    let range = match (a.w_min, a.w_max) {
        (Some(lo), Some(hi)) => lo..=hi,
        (lo, hi) => {
            let d = default_sweep_range(shortest, m.order)?;
            lo.unwrap_or(*d.start())..=hi.unwrap_or(*d.end())
        }
    };
    if range.is_empty() {
        return Err(Invalid(format!(
            "empty window range {}..={}",
            range.start(),
            range.end()
        ))
        .into());
    }
    let curve = window_size_sweep(&reals, m.kind.into(), m.order, range, &m.params()?)?;
    let est = estimate_half_period(&curve)?;
    if let Some(path) = &a.output {
        let mut buf = vec![];
        curve.write_csv(&mut buf)?;
        io::write_atomic(path, &buf)?;
        log::info!("sweep curve written to {}", path.display());
    }
    let record = json!({
        "kind": EntropyKind::from(m.kind).as_str(),
        "order": m.order,
        "realizations": reals.len(),
        "windows": [curve.windows.first(), curve.windows.last()],
        "argmin": est.window,
        "recommended": [est.range.0, est.range.1],
        "interior_minimum": est.interior,
        "curve": a.output.as_ref().map(|p| p.display().to_string()),
    });
    io::emit(None, &to_json_bytes(&record))
}

fn cmd_experiment(a: ExperimentArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.config)
        .map_err(|e| Invalid(format!("cannot read {}: {e}", a.config.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(seed) = a.seed {
        cfg.set_seed(seed);
    }
    let report = cfg.run()?;
    // nothing is written until every output has been computed
    let files = report.files();
    for (name, contents) in &files {
        let path = a.out_dir.join(name);
        io::write_atomic(&path, contents.as_bytes())?;
        println!("{}", path.display());
    }
    Ok(())
}
