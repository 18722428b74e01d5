//! Experiment orchestration: every (horizon, delay, algorithm, seed) cell, run in parallel and
//! emitted in a fixed order.

mod config;
mod csv;

use std::fs::File;
use std::io::{BufWriter, Write};

use nalgebra::DVector;
use rayon::prelude::*;

pub use self::config::{malm_preset, resolve, with_axis, AlgoSpec, Algorithm, ExperimentConfig, SweepAxis};
pub use self::csv::{header, read_csv, write_csv, CellKey};

use crate::baselines::run_baseline;
use crate::error::Result;
use crate::malm::run_malm;
use crate::metrics::MetricsSeries;
use crate::offline::solve_comparator;
use crate::problems::ProblemInstance;
use crate::trajectory::Trajectory;

/// Metrics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub problem: String,
    pub algo: String,
    pub seed: u64,
    pub tau: usize,
    pub horizon: usize,
    pub series: MetricsSeries,
}

impl CellResult {
    pub fn key(&self, with_horizon: bool) -> CellKey {
        CellKey {
            problem: self.problem.clone(),
            algo: self.algo.clone(),
            seed: self.seed,
            tau: self.tau,
            horizon: with_horizon.then_some(self.horizon),
        }
    }
}

/// All cells of an experiment, ordered by horizon, delay, algorithm and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub cells: Vec<CellResult>,
    /// Whether the CSV carries a `horizon` column.
    pub with_horizon: bool,
}

impl ExperimentResult {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        write_csv(out, &self.cells, self.with_horizon)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV is ASCII"))
    }

    pub fn cell(&self, algo: &str, seed: u64, tau: usize, horizon: usize) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.algo == algo && c.seed == seed && c.tau == tau && c.horizon == horizon)
    }
}

/// Runs one algorithm on an instance.
pub fn run_algorithm(problem: &ProblemInstance, algo: &Algorithm, horizon: usize) -> Result<Trajectory> {
    match algo {
        Algorithm::Malm(cfg) => {
            let mut cfg = cfg.clone();
            cfg.horizon = horizon;
            run_malm(problem, &cfg)
        }
        Algorithm::Baseline(cfg) => run_baseline(problem, cfg, horizon),
    }
}

/// Runs one algorithm and computes its metrics against `x_star`.
pub fn run_cell(
    problem: &ProblemInstance,
    algo: &Algorithm,
    horizon: usize,
    x_star: &DVector<f64>,
) -> Result<CellResult> {
    let trajectory = run_algorithm(problem, algo, horizon)?;
    let tau = match algo {
        Algorithm::Malm(c) => c.tau,
        Algorithm::Baseline(c) => c.tau(),
    };
    Ok(CellResult {
        problem: problem.name().to_string(),
        algo: algo.name().to_string(),
        seed: problem.seed,
        tau,
        horizon,
        series: MetricsSeries::compute(&trajectory, problem, x_star),
    })
}

/// Runs every cell of `cfg`. The comparator is solved once per (horizon, seed).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let instances: Vec<(usize, u64)> = cfg
        .horizons
        .iter()
        .flat_map(|&t| cfg.seeds.iter().map(move |&s| (t, s)))
        .collect();
    let prepared = instances
        .par_iter()
        .map(|&(t, seed)| {
            let cell = format!("{} T={t} seed={seed}", cfg.problem.name());
            let problem = cfg.problem.generate(t, seed).map_err(|e| e.in_cell(&cell))?;
            let x_star = solve_comparator(&problem, cfg.tol_comparator)
                .map_err(|e| e.in_cell(format!("{cell} comparator")))?;
            Ok((problem, x_star))
        })
        .collect::<Result<Vec<_>>>()?;

    let inner = cfg.inner();
    let mut jobs = Vec::new();
    for (hi, &t) in cfg.horizons.iter().enumerate() {
        for &tau in &cfg.taus {
            for spec in &cfg.algos {
                let algo = resolve(spec, &cfg.problem, t, tau, inner)?;
                for si in 0..cfg.seeds.len() {
                    jobs.push((hi * cfg.seeds.len() + si, t, tau, algo.clone()));
                }
            }
        }
    }
    let cells = jobs
        .par_iter()
        .map(|(idx, t, tau, algo)| {
            let (problem, x_star) = &prepared[*idx];
            run_cell(problem, algo, *t, x_star).map_err(|e| {
                e.in_cell(format!(
                    "{} {} T={t} tau={tau} seed={}",
                    problem.name(),
                    algo.name(),
                    problem.seed
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult { cells, with_horizon: cfg.horizons.len() > 1 })
}

/// Replaces one axis of `cfg` with `values` and runs it; the CSV gains a `horizon` column
/// when sweeping the horizon.
pub fn sweep(cfg: &ExperimentConfig, axis: SweepAxis, values: &[u64]) -> Result<ExperimentResult> {
    let swept = with_axis(cfg, axis, values)?;
    let mut result = run_experiment(&swept)?;
    result.with_horizon |= axis == SweepAxis::Horizon;
    Ok(result)
}

/// Runs `cfg` and writes the CSV to its output path, or to stdout when none is set.
pub fn run_to_output(cfg: &ExperimentConfig, result: &ExperimentResult) -> Result<()> {
    match &cfg.output {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            result.write_csv(&mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            result.write_csv(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}
