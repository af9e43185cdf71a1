//! `sphere-qmc` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid arguments or input, 2 runtime failure.
//! Errors go to stderr as `error[validation]: ...` or `error[runtime]: ...`.

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sphere_qmc::experiments::{
    evaluate_metric, load, render_table, render_tsv, run_batch, summarize, ExperimentPlan, MetricSpec,
};
use sphere_qmc::metrics::WceRoute;
use sphere_qmc::samplers::{SamplerKind, SamplerSpec};
use sphere_qmc::spectral::BoundReport;
use sphere_qmc::{Configuration, Error, RngStream};

#[derive(Debug, Parser)]
#[command(name = "sphere-qmc", version, about = "Spherical ensemble sampling, worst-case errors and concentration bounds")]
struct Cli {
    /// Master seed for every random stream
    #[arg(long, global = true, help_heading = "Global options", default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: one per core)
    #[arg(long, global = true, help_heading = "Global options", value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Output directory or file, depending on the subcommand
    #[arg(long, global = true, help_heading = "Global options")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw point configurations, one CSV (x,y,z) per replica plus manifest.json
    Sample(SampleArgs),
    /// Score a configuration CSV and print a JSON record
    Score(ScoreArgs),
    /// Print the concentration and explicit confidence bounds as JSON
    Bounds(BoundsArgs),
    /// Run a JSON experiment plan; writes records.csv and summary.json
    Experiment(ExperimentArgs),
    /// Summarize a records CSV as a text table and a plot-ready TSV
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    SphericalEig,
    SphericalDpp,
    IidUniform,
    EqualAreaJitter,
    Fibonacci,
}

impl From<KindArg> for SamplerKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::SphericalEig => SamplerKind::SphericalEig,
            KindArg::SphericalDpp => SamplerKind::SphericalDpp,
            KindArg::IidUniform => SamplerKind::IidUniform,
            KindArg::EqualAreaJitter => SamplerKind::EqualAreaJitter,
            KindArg::Fibonacci => SamplerKind::Fibonacci,
        }
    }
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Sampler
    #[arg(long)]
    kind: KindArg,
    /// Points per configuration
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Number of configurations; replica r uses stream id r
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=u32::MAX as u64))]
    replicas: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Wce,
    Gt,
    #[value(name = "capL2")]
    CapL2,
    #[value(name = "capLinf")]
    CapLinf,
    Gensum,
    Energy,
    Sumz,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RouteArg {
    Legendre,
    HeatKernel,
    DistanceS32,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// Configuration CSV with header x,y,z
    #[arg(long = "in")]
    input: PathBuf,
    /// Functional to evaluate
    #[arg(long)]
    metric: MetricArg,
    /// Smoothness for wce (> 1) or exponent for gensum (1 < s < 2)
    #[arg(long)]
    s: Option<f64>,
    /// Heat time for gt (> 0)
    #[arg(long)]
    t: Option<f64>,
    /// Absolute tolerance on wce² or g(t)
    #[arg(long, default_value = "1e-8")]
    tol: f64,
    /// Evaluation route for wce
    #[arg(long, default_value = "legendre")]
    route: RouteArg,
    /// Monte-Carlo caps for capL2
    #[arg(long, default_value_t = 4096)]
    caps: usize,
    /// Random starts for capLinf; exact enumeration when omitted (N <= 300)
    #[arg(long)]
    starts: Option<usize>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Number of points (>= 3 with --eta)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Explicit-confidence parameter; selects ε = 1/log N and 8πR² = 1 + η
    #[arg(long, conflicts_with_all = ["eps", "delta"], required_unless_present_all = ["eps", "delta"])]
    eta: Option<f64>,
    /// Smoothness excess ε of the norm H^{-(2+ε)}
    #[arg(long, requires = "delta")]
    eps: Option<f64>,
    /// Deviation threshold δ
    #[arg(long, requires = "eps")]
    delta: Option<f64>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Plan file (JSON, schema version 1)
    #[arg(long)]
    plan: PathBuf,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Records CSV written by `experiment`
    #[arg(long = "in")]
    input: PathBuf,
    /// η of the bound curve column
    #[arg(long, default_value_t = 3.0)]
    eta: f64,
}

enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Domain(_) | Error::Inadmissible(_) | Error::Parse { .. } => {
                Failure::Validation(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let msg = rendered.trim_start_matches("error: ");
            eprint!("error[validation]: {msg}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error[validation]: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error[runtime]: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    match cli.command {
        Command::Sample(a) => sample(a, cli.seed, cli.out),
        Command::Score(a) => score(a, cli.seed),
        Command::Bounds(a) => bounds(a),
        Command::Experiment(a) => experiment(a, cli.out),
        Command::Report(a) => report(a, cli.out),
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn sample(a: SampleArgs, seed: u64, out: Option<PathBuf>) -> Result<(), Failure> {
    let kind = SamplerKind::from(a.kind);
    let dir = out.unwrap_or_else(|| PathBuf::from("."));
    let n = usize::try_from(a.n).map_err(|_| Failure::Validation("n does not fit in memory".into()))?;
    fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    for r in 0..a.replicas {
        let spec = SamplerSpec::new(kind, n, RngStream::new(seed, r))?;
        let c = spec.sample()?;
        let name = format!("{kind}-n{n}-r{r}.csv");
        c.write_csv(File::create(dir.join(&name))?)?;
        files.push(json!({"stream_id": r, "file": name}));
    }
    let manifest = json!({
        "kind": kind,
        "n": n,
        "seed": seed,
        "replicas": a.replicas,
        "stream_ids": (0..a.replicas).collect::<Vec<_>>(),
        "files": files,
    });
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    print_json(&manifest)
}

fn score(a: ScoreArgs, seed: u64) -> Result<(), Failure> {
    let need = |v: Option<f64>, flag: &str| {
        let name = a.metric.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default();
        v.ok_or_else(|| Failure::Validation(format!("--{flag} is required for --metric {name}")))
    };
    let spec = match a.metric {
        MetricArg::Wce => MetricSpec::Wce {
            s: need(a.s, "s")?,
            tol: a.tol,
            route: match a.route {
                RouteArg::Legendre => WceRoute::Legendre,
                RouteArg::HeatKernel => WceRoute::HeatKernel,
                RouteArg::DistanceS32 => WceRoute::DistanceS32,
            },
        },
        MetricArg::Gt => MetricSpec::Gt {
            t: need(a.t, "t")?,
            tol: a.tol,
        },
        MetricArg::CapL2 => MetricSpec::CapL2 { caps: a.caps },
        MetricArg::CapLinf => MetricSpec::CapLinf { starts: a.starts },
        MetricArg::Gensum => MetricSpec::Gensum { s: need(a.s, "s")? },
        MetricArg::Energy => MetricSpec::Energy,
        MetricArg::Sumz => MetricSpec::SumZ,
    };
    spec.validate()?;
    let c = read_configuration(&a.input)?;
    let v = evaluate_metric(&c, &spec, &RngStream::new(seed, 0))?;
    let mut params = serde_json::to_value(&spec)?;
    if let Some(obj) = params.as_object_mut() {
        obj.remove("metric");
        obj.insert("n".into(), json!(c.len()));
    }
    print_json(&ScoreRecord {
        metric: v.metric,
        value: v.value,
        tail_bound: v.tail_bound,
        params,
    })
}

#[derive(serde::Serialize)]
struct ScoreRecord {
    metric: String,
    value: f64,
    tail_bound: f64,
    params: serde_json::Value,
}

fn read_configuration(path: &Path) -> Result<Configuration, Failure> {
    let f = File::open(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    Ok(Configuration::read_csv(BufReader::new(f))?)
}

fn bounds(a: BoundsArgs) -> Result<(), Failure> {
    let report = match (a.eta, a.eps, a.delta) {
        (Some(eta), _, _) => BoundReport::for_eta(a.n, eta)?,
        (None, Some(eps), Some(delta)) => BoundReport::for_delta(a.n, eps, delta)?,
        _ => return Err(Failure::Validation("give --eta, or both --eps and --delta".into())),
    };
    print_json(&report)
}

fn experiment(a: ExperimentArgs, out: Option<PathBuf>) -> Result<(), Failure> {
    let text = fs::read_to_string(&a.plan).map_err(|e| Failure::Validation(format!("{}: {e}", a.plan.display())))?;
    let mut plan: ExperimentPlan =
        serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", a.plan.display())))?;
    if out.is_some() {
        plan.output_dir = out;
    }
    if plan.output_dir.is_none() {
        plan.output_dir = Some(PathBuf::from("."));
    }
    plan.validate()?;
    let outcome = run_batch(&plan)?;
    print!("{}", render_table(&outcome.summary));
    if outcome.failures > 0 {
        eprintln!("warning: {} of {} replicas failed; see summary.json", outcome.failures, outcome.records.len());
    }
    Ok(())
}

fn report(a: ReportArgs, out: Option<PathBuf>) -> Result<(), Failure> {
    let records = load(&a.input)?;
    let cells = summarize(&records);
    print!("{}", render_table(&cells));
    let tsv_path = out.unwrap_or_else(|| a.input.with_file_name("report.tsv"));
    fs::write(&tsv_path, render_tsv(&cells, a.eta))?;
    eprintln!("wrote {}", tsv_path.display());
    Ok(())
}
