//! Runs online constrained optimization experiments and writes per-round metrics as CSV.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use constrained_oco::harness::{self, AlgoSpec, ExperimentConfig, SweepAxis};
use constrained_oco::problems::ProblemParams;
use constrained_oco::{OcoError, Result};

#[derive(Parser, Debug)]
#[command(name = "oco-bench", version, about)]
struct Cli {
    /// Named preset: nra-paper, olr-paper, oqcqp-paper or smoke.
    #[arg(long)]
    preset: Option<String>,
    /// TOML experiment file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Problem with its default size: nra, olr or oqcqp.
    #[arg(long)]
    problem: Option<String>,
    /// Comma-separated algorithms, each run with its published settings.
    #[arg(long, value_delimiter = ',')]
    algo: Option<Vec<String>>,
    #[arg(long = "T")]
    horizon: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    tau: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    seed: Option<Vec<u64>>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol_inner: Option<f64>,
    #[arg(long)]
    tol_comparator: Option<f64>,
    /// Sweep one axis, e.g. `tau=0,10,20` or `T=1000,4000`.
    #[arg(long, value_name = "AXIS=V1,V2")]
    sweep: Option<String>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

fn default_problem(name: &str) -> Result<ProblemParams> {
    match name {
        "nra" => Ok(ProblemParams::Nra { mapping_nodes: 10, data_centers: 10 }),
        "olr" => Ok(ProblemParams::Olr { dim: 5, samples: 10, bound: 10.0 }),
        "oqcqp" => Ok(ProblemParams::Oqcqp { dim: 8, constraints: 3, radius: 10.0 }),
        other => Err(OcoError::Config(format!("unknown problem `{other}` (expected nra, olr or oqcqp)"))),
    }
}

fn parse_sweep(text: &str) -> Result<(SweepAxis, Vec<u64>)> {
    let (axis, values) = text
        .split_once('=')
        .ok_or_else(|| OcoError::Config(format!("sweep `{text}` is not of the form AXIS=V1,V2")))?;
    let values = values
        .split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| v.trim().parse().map_err(|_| OcoError::Config(format!("bad sweep value `{v}`"))))
        .collect::<Result<Vec<u64>>>()?;
    Ok((axis.parse()?, values))
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match (&cli.preset, &cli.config) {
        (Some(name), _) => ExperimentConfig::preset(name)?,
        (None, Some(path)) => ExperimentConfig::from_toml(&std::fs::read_to_string(path)?)?,
        (None, None) => {
            let mut cfg = ExperimentConfig::preset("smoke")?;
            if cli.problem.is_none() {
                return Err(OcoError::Config("give --preset, --config or --problem".into()));
            }
            cfg.horizons = vec![1000];
            cfg
        }
    };
    if let Some(name) = &cli.problem {
        let problem = default_problem(name)?;
        // A config file naming the same problem keeps its own sizes.
        if problem.name() != cfg.problem.name() || cli.config.is_none() {
            cfg.problem = problem;
        }
    }
    if let Some(algos) = &cli.algo {
        cfg.algos = algos.iter().map(|a| AlgoSpec::named(a)).collect();
    }
    if let Some(t) = cli.horizon {
        cfg.horizons = vec![t];
    }
    if let Some(taus) = &cli.tau {
        cfg.taus = taus.clone();
    }
    if let Some(seeds) = &cli.seed {
        cfg.seeds = seeds.clone();
    }
    if cli.out.is_some() {
        cfg.output = cli.out.clone();
    }
    if let Some(tol) = cli.tol_inner {
        cfg.tol_inner = tol;
    }
    if let Some(tol) = cli.tol_comparator {
        cfg.tol_comparator = tol;
    }
    if cli.preset.is_none() && cli.config.is_none() && cli.algo.is_none() {
        // Delayed baselines only make sense with a delay, the rest only without one.
        let delayed = cfg.taus.iter().any(|&t| t > 0);
        cfg.algos = if delayed { ["malm", "czp", "ny-delayed"] } else { ["malm", "cl", "ny"] }
            .iter()
            .map(|a| AlgoSpec::named(a))
            .collect();
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = build_config(cli)?;
    let sweep = cli.sweep.as_deref().map(parse_sweep).transpose()?;
    if cli.print_config {
        let shown = match &sweep {
            Some((axis, values)) => harness::with_axis(&cfg, *axis, values)?,
            None => cfg,
        };
        print!("{}", shown.to_toml()?);
        return Ok(());
    }
    let result = match &sweep {
        Some((axis, values)) => harness::sweep(&cfg, *axis, values)?,
        None => harness::run_experiment(&cfg)?,
    };
    harness::run_to_output(&cfg, &result)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(OcoError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("oco-bench: {e}");
            if e.is_numeric() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
