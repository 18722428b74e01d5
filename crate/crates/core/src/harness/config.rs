//! Experiment configuration, TOML files and named presets.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::baselines::{BaselineConfig, BaselineKind};
use crate::error::{OcoError, Result};
use crate::inner::InnerSolverConfig;
use crate::malm::MalmConfig;
use crate::models::ModelKind;
use crate::offline;
use crate::problems::ProblemParams;

/// One algorithm of an experiment; unset parameters take the published settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgoSpec {
    /// `malm`, `mosp`, `cl`, `ny`, `czp` or `ny-delayed`.
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
}

impl AlgoSpec {
    pub fn named(name: &str) -> Self {
        AlgoSpec {
            name: name.to_string(),
            model: None,
            alpha: None,
            sigma: None,
            mu: None,
            eta: None,
            delta: None,
            nu: None,
        }
    }
}

/// A resolved algorithm, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm {
    Malm(MalmConfig),
    Baseline(BaselineConfig),
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Malm(_) => "malm",
            Algorithm::Baseline(b) => b.kind().name(),
        }
    }
}

/// Published MALM settings: the plain model with `alpha = 0.1 sqrt(T)`, `sigma = 100 / sqrt(T)`
/// on NRA; the linearized model with `alpha = 10 sqrt(T)`, `sigma = 10 / sqrt(T)` on OLR; and the
/// theorem stepsizes with the linearized model otherwise.
pub fn malm_preset(problem: &ProblemParams, horizon: usize, tau: usize) -> MalmConfig {
    let root = (horizon as f64).sqrt();
    match problem {
        ProblemParams::Nra { .. } => MalmConfig {
            alpha: 0.1 * root,
            sigma: 100.0 / root,
            model: ModelKind::Plain,
            ..MalmConfig::theorem(horizon, tau, ModelKind::Plain)
        },
        ProblemParams::Olr { .. } => MalmConfig {
            alpha: 10.0 * root,
            sigma: 10.0 / root,
            ..MalmConfig::theorem(horizon, tau, ModelKind::Linearized)
        },
        _ => MalmConfig::theorem(horizon, tau, ModelKind::Linearized),
    }
}

fn unused(spec: &AlgoSpec, fields: &[(&str, bool)]) -> Result<()> {
    for (field, set) in fields {
        if *set {
            return Err(OcoError::Config(format!("parameter `{field}` does not apply to {}", spec.name)));
        }
    }
    Ok(())
}

/// Resolves `spec` for one cell.
pub fn resolve(
    spec: &AlgoSpec,
    problem: &ProblemParams,
    horizon: usize,
    tau: usize,
    inner: InnerSolverConfig,
) -> Result<Algorithm> {
    if spec.name == "malm" {
        unused(spec, &[("mu", spec.mu.is_some()), ("eta", spec.eta.is_some()), ("delta", spec.delta.is_some()), ("nu", spec.nu.is_some())])?;
        let mut cfg = malm_preset(problem, horizon, tau);
        if let Some(model) = spec.model {
            cfg.model = model;
        }
        cfg.alpha = spec.alpha.unwrap_or(cfg.alpha);
        cfg.sigma = spec.sigma.unwrap_or(cfg.sigma);
        cfg.inner = inner;
        cfg.validate().map_err(|e| OcoError::Config(e.to_string()))?;
        return Ok(Algorithm::Malm(cfg));
    }
    let kind = BaselineKind::from_name(&spec.name)
        .ok_or_else(|| OcoError::Config(format!("unknown algorithm `{}`", spec.name)))?;
    unused(spec, &[("model", spec.model.is_some()), ("sigma", spec.sigma.is_some())])?;
    let mut cfg = BaselineConfig::published(kind, horizon, tau).map_err(|e| OcoError::Config(e.to_string()))?;
    match &mut cfg {
        BaselineConfig::Mosp { alpha, mu } => {
            unused(spec, &[("eta", spec.eta.is_some()), ("delta", spec.delta.is_some()), ("nu", spec.nu.is_some())])?;
            *alpha = spec.alpha.unwrap_or(*alpha);
            *mu = spec.mu.unwrap_or(*mu);
        }
        BaselineConfig::Cl { eta, delta } | BaselineConfig::Czp { eta, delta, .. } => {
            unused(spec, &[("alpha", spec.alpha.is_some()), ("mu", spec.mu.is_some()), ("nu", spec.nu.is_some())])?;
            *eta = spec.eta.unwrap_or(*eta);
            *delta = spec.delta.unwrap_or(*delta);
        }
        BaselineConfig::Ny { alpha, nu } | BaselineConfig::NyDelayed { alpha, nu, .. } => {
            unused(spec, &[("mu", spec.mu.is_some()), ("eta", spec.eta.is_some()), ("delta", spec.delta.is_some())])?;
            *alpha = spec.alpha.unwrap_or(*alpha);
            *nu = spec.nu.unwrap_or(*nu);
        }
    }
    cfg.validate().map_err(|e| OcoError::Config(e.to_string()))?;
    Ok(Algorithm::Baseline(cfg))
}

fn default_tol_comparator() -> f64 {
    offline::DEFAULT_TOL
}

fn default_tol_inner() -> f64 {
    InnerSolverConfig::default().tol
}

fn default_taus() -> Vec<usize> {
    vec![0]
}

/// A full experiment: every combination of horizon, delay, algorithm and seed is one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemParams,
    /// Horizons `T`; more than one adds a `horizon` column to the CSV.
    pub horizons: Vec<usize>,
    #[serde(default = "default_taus")]
    pub taus: Vec<usize>,
    pub seeds: Vec<u64>,
    #[serde(rename = "algo")]
    pub algos: Vec<AlgoSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default = "default_tol_comparator")]
    pub tol_comparator: f64,
    #[serde(default = "default_tol_inner")]
    pub tol_inner: f64,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| OcoError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| OcoError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizons.is_empty() || self.seeds.is_empty() || self.taus.is_empty() || self.algos.is_empty() {
            return Err(OcoError::Config(
                "an experiment needs at least one horizon, delay, seed and algorithm".into(),
            ));
        }
        if let ProblemParams::Custom = self.problem {
            return Err(OcoError::Config("custom problems cannot be configured from a file".into()));
        }
        let max_tau = *self.taus.iter().max().expect("nonempty");
        if let Some(&t) = self.horizons.iter().find(|&&t| t <= max_tau) {
            return Err(OcoError::Config(format!("horizon {t} must exceed every delay (largest {max_tau})")));
        }
        if !(self.tol_comparator > 0.0) || !(self.tol_inner > 0.0) {
            return Err(OcoError::Config("tolerances must be positive".into()));
        }
        let inner = self.inner();
        for spec in &self.algos {
            for &t in &self.horizons {
                for &tau in &self.taus {
                    resolve(spec, &self.problem, t, tau, inner)?;
                }
            }
        }
        Ok(())
    }

    pub fn inner(&self) -> InnerSolverConfig {
        InnerSolverConfig { tol: self.tol_inner, ..InnerSolverConfig::default() }
    }

    /// The named presets: `nra-paper`, `olr-paper`, `oqcqp-paper` and `smoke`.
    pub fn preset(name: &str) -> Result<Self> {
        let algos = |names: &[&str]| names.iter().map(|n| AlgoSpec::named(n)).collect();
        let cfg = match name {
            "nra-paper" => ExperimentConfig {
                problem: ProblemParams::Nra { mapping_nodes: 10, data_centers: 10 },
                horizons: vec![10_000],
                taus: vec![0],
                seeds: vec![1],
                algos: algos(&["malm", "mosp", "cl", "ny"]),
                output: None,
                tol_comparator: offline::DEFAULT_TOL,
                tol_inner: default_tol_inner(),
            },
            "olr-paper" => ExperimentConfig {
                problem: ProblemParams::Olr { dim: 5, samples: 10, bound: 10.0 },
                horizons: vec![5_000],
                taus: vec![0],
                seeds: vec![1],
                algos: algos(&["malm", "cl", "ny"]),
                output: None,
                tol_comparator: offline::DEFAULT_TOL,
                tol_inner: default_tol_inner(),
            },
            "oqcqp-paper" => ExperimentConfig {
                problem: ProblemParams::Oqcqp { dim: 8, constraints: 3, radius: 10.0 },
                horizons: vec![1_000],
                taus: vec![0, 10, 20, 50, 100],
                seeds: vec![1],
                algos: algos(&["malm", "czp", "ny-delayed"]),
                output: None,
                tol_comparator: offline::DEFAULT_TOL,
                tol_inner: default_tol_inner(),
            },
            "smoke" => ExperimentConfig {
                problem: ProblemParams::Oqcqp { dim: 8, constraints: 3, radius: 10.0 },
                horizons: vec![100],
                taus: vec![0],
                seeds: vec![1],
                algos: algos(&["malm", "cl", "ny", "czp", "ny-delayed"]),
                output: None,
                tol_comparator: offline::DEFAULT_TOL,
                tol_inner: default_tol_inner(),
            },
            other => return Err(OcoError::Config(format!("unknown preset `{other}`"))),
        };
        Ok(cfg)
    }

    pub const PRESETS: [&'static str; 4] = ["nra-paper", "olr-paper", "oqcqp-paper", "smoke"];
}

/// The axis of a one-dimensional sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Tau,
    Horizon,
    Seed,
}

impl std::str::FromStr for SweepAxis {
    type Err = OcoError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tau" => Ok(SweepAxis::Tau),
            "T" | "horizon" => Ok(SweepAxis::Horizon),
            "seed" => Ok(SweepAxis::Seed),
            other => Err(OcoError::Config(format!("unknown sweep axis `{other}` (expected tau, T or seed)"))),
        }
    }
}

/// Replaces the values of `axis` in `cfg` with `values`.
pub fn with_axis(cfg: &ExperimentConfig, axis: SweepAxis, values: &[u64]) -> Result<ExperimentConfig> {
    if values.is_empty() {
        return Err(OcoError::Config("a sweep needs at least one value".into()));
    }
    let mut out = cfg.clone();
    match axis {
        SweepAxis::Tau => out.taus = values.iter().map(|&v| v as usize).collect(),
        SweepAxis::Horizon => out.horizons = values.iter().map(|&v| v as usize).collect(),
        SweepAxis::Seed => out.seeds = values.to_vec(),
    }
    out.validate()?;
    Ok(out)
}
