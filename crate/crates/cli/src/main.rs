use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use specmix::report::EnumerationMode;
use specmix::run::{config_from_report, execute_with_workers, Command, GenKind, RunConfig, RunOutcome};
use specmix::Error;

#[derive(Parser)]
#[command(name = "specmix", version, about = "Spectral and discrepancy mixing checks for complexes and hypergraphs")]
struct Cli {
    /// Worker threads (defaults to one per core). Results do not depend on it.
    #[arg(long, global = true, env = "SPECMIX_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Top,
}

#[derive(Subcommand)]
enum Top {
    /// Generate a complex or hypergraph object file.
    #[command(subcommand)]
    Gen(Gen),
    /// Operator norms and spectral estimates.
    Spectrum(Opts),
    /// Discrepancy of a complex or hypergraph.
    Discrepancy(Opts),
    /// Verify a mixing statement.
    #[command(subcommand)]
    Verify(Verify),
    /// Batch experiments.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Re-execute the config embedded in a report.
    Rerun {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Gen {
    Complex(Opts),
    Hypergraph(Opts),
}

#[derive(Subcommand)]
enum Verify {
    Mixing(Opts),
    Inverse(Opts),
    Fw(Opts),
    Lemmas(Opts),
    BiluLinial(Opts),
}

#[derive(Subcommand)]
enum Experiment {
    RandomRho(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Complete,
    Empty,
    LinialMeshulam,
    Gnp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    SingletonTail,
    SingletonWitness,
    Sample,
}

#[derive(Args)]
struct Opts {
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long = "out")]
    output: Option<PathBuf>,
    /// Per-seed CSV for experiment batches.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Facet probability for linial-meshulam.
    #[arg(long)]
    p: Option<f64>,
    /// Density parameter; also the edge probability for gnp.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Tuple count for --mode sample.
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of seeds for experiment batches.
    #[arg(long)]
    seeds: Option<u64>,
    /// Maximum enumeration states before refusing.
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    /// Enumerate even when the budget is exceeded.
    #[arg(long)]
    force: bool,
    #[arg(long, default_value_t = 32)]
    starts: usize,
    #[arg(long, default_value_t = 5000)]
    iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

impl Opts {
    fn into_config(self, command: Command) -> RunConfig {
        let mut cfg = RunConfig::new(command);
        cfg.input = self.input;
        cfg.output = self.output;
        cfg.csv = self.csv;
        cfg.kind = self.kind.map(|k| match k {
            Kind::Complete => GenKind::Complete,
            Kind::Empty => GenKind::Empty,
            Kind::LinialMeshulam => GenKind::LinialMeshulam,
            Kind::Gnp => GenKind::Gnp,
        });
        cfg.n = self.n;
        cfg.d = self.d;
        cfg.k = self.k;
        cfg.p = self.p;
        cfg.alpha = self.alpha;
        cfg.delta = self.delta;
        cfg.mode = self.mode.map(|m| match m {
            Mode::Exhaustive => EnumerationMode::Exhaustive,
            Mode::SingletonTail => EnumerationMode::SingletonTail,
            Mode::SingletonWitness => EnumerationMode::SingletonWitness,
            Mode::Sample => EnumerationMode::Sample { count: self.samples, seed: self.seed },
        });
        cfg.seed = self.seed;
        cfg.seeds = self.seeds;
        cfg.budget = self.budget;
        cfg.force = self.force;
        cfg.starts = self.starts;
        cfg.iters = self.iters;
        cfg.tol = self.tol;
        cfg
    }
}

fn write_outputs(outcome: &RunOutcome, out: Option<&PathBuf>, csv: Option<&PathBuf>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(&outcome.document)? + "\n";
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(rows)) = (csv, &outcome.csv) {
        fs::write(path, rows)?;
    }
    Ok(())
}

fn summary(outcome: &RunOutcome) -> Option<String> {
    let report = outcome.document.get("report")?;
    let report = report.get("summary").unwrap_or(report);
    let statement = report.get("statement")?.as_str()?;
    let failed: Vec<&str> = report
        .get("checks")
        .and_then(Value::as_array)
        .into_iter()
        .flatten()
        .filter(|c| c["passed"] == false)
        .filter_map(|c| c["name"].as_str())
        .collect();
    Some(match failed.as_slice() {
        [] => format!("{statement}: all checks passed"),
        names => format!("{statement}: failed {}", names.join(", ")),
    })
}

fn run(cli: Cli) -> Result<i32, Error> {
    let (cfg, out, csv) = match cli.command {
        Top::Rerun { input, output, csv } => {
            let document: Value = serde_json::from_str(&fs::read_to_string(&input)?)?;
            (config_from_report(&document)?, output, csv)
        }
        top => {
            let (opts, command) = match top {
                Top::Gen(Gen::Complex(o)) => (o, Command::GenComplex),
                Top::Gen(Gen::Hypergraph(o)) => (o, Command::GenHypergraph),
                Top::Spectrum(o) => (o, Command::Spectrum),
                Top::Discrepancy(o) => (o, Command::Discrepancy),
                Top::Verify(Verify::Mixing(o)) => (o, Command::VerifyMixing),
                Top::Verify(Verify::Inverse(o)) => (o, Command::VerifyInverse),
                Top::Verify(Verify::Fw(o)) => (o, Command::VerifyFw),
                Top::Verify(Verify::Lemmas(o)) => (o, Command::VerifyLemmas),
                Top::Verify(Verify::BiluLinial(o)) => (o, Command::VerifyBiluLinial),
                Top::Experiment(Experiment::RandomRho(o)) => (o, Command::ExperimentRandomRho),
                Top::Rerun { .. } => unreachable!(),
            };
            let cfg = opts.into_config(command);
            let (out, csv) = (cfg.output.clone(), cfg.csv.clone());
            (cfg, out, csv)
        }
    };
    let outcome = execute_with_workers(&cfg, cli.workers)?;
    write_outputs(&outcome, out.as_ref(), csv.as_ref())?;
    if let Some(line) = summary(&outcome) {
        eprintln!("{line}");
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
