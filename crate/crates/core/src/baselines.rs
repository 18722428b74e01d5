//! Online primal-dual baselines: MOSP, CL, NY, CZP and a delayed NY variant.
//!
//! Delayed methods share the schedule of the delayed augmented Lagrangian method: the
//! first `tau` decisions are played blind, then step `t` consumes the feedback of round
//! `t - tau` together with the stored `x_{t-tau}` and `lambda_{t-tau}`.

use std::collections::VecDeque;
use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{OcoError, Result};
use crate::oracle::{Decision, Multiplier, RoundOracle};
use crate::problems::ProblemInstance;
use crate::sets::FeasibleSet;
use crate::trajectory::Trajectory;

/// Algorithm and stepsizes of a baseline run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "kebab-case")]
pub enum BaselineConfig {
    Mosp { alpha: f64, mu: f64 },
    Cl { eta: f64, delta: f64 },
    Ny { alpha: f64, nu: f64 },
    Czp { eta: f64, delta: f64, tau: usize },
    NyDelayed { alpha: f64, nu: f64, tau: usize },
}

/// Baseline identifiers as used on the command line and in CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    Mosp,
    Cl,
    Ny,
    Czp,
    NyDelayed,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 5] = [
        BaselineKind::Mosp,
        BaselineKind::Cl,
        BaselineKind::Ny,
        BaselineKind::Czp,
        BaselineKind::NyDelayed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Mosp => "mosp",
            BaselineKind::Cl => "cl",
            BaselineKind::Ny => "ny",
            BaselineKind::Czp => "czp",
            BaselineKind::NyDelayed => "ny-delayed",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        BaselineKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// True for the methods that accept a feedback delay.
    pub fn supports_delay(self) -> bool {
        matches!(self, BaselineKind::Czp | BaselineKind::NyDelayed)
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl BaselineConfig {
    /// The published parameter settings for horizon `T` and delay `tau`.
    pub fn published(kind: BaselineKind, horizon: usize, tau: usize) -> Result<Self> {
        let t = horizon as f64;
        if !kind.supports_delay() && tau != 0 {
            return Err(OcoError::InvalidArgument(format!("{kind} does not support delayed feedback")));
        }
        let cfg = match kind {
            BaselineKind::Mosp => {
                let s = t.powf(-1.0 / 3.0);
                BaselineConfig::Mosp { alpha: s, mu: s }
            }
            BaselineKind::Cl => BaselineConfig::Cl { eta: 2.0 / t.sqrt(), delta: 0.01 },
            BaselineKind::Ny => BaselineConfig::Ny { alpha: t, nu: t.sqrt() },
            BaselineKind::Czp => {
                let scale = if tau >= 1 { tau as f64 * t } else { t };
                BaselineConfig::Czp { eta: 1.0 / scale.sqrt(), delta: 10.0, tau }
            }
            BaselineKind::NyDelayed => {
                let scale = if tau >= 1 { tau as f64 * t } else { t };
                BaselineConfig::NyDelayed { alpha: scale, nu: scale.sqrt(), tau }
            }
        };
        Ok(cfg)
    }

    pub fn kind(&self) -> BaselineKind {
        match self {
            BaselineConfig::Mosp { .. } => BaselineKind::Mosp,
            BaselineConfig::Cl { .. } => BaselineKind::Cl,
            BaselineConfig::Ny { .. } => BaselineKind::Ny,
            BaselineConfig::Czp { .. } => BaselineKind::Czp,
            BaselineConfig::NyDelayed { .. } => BaselineKind::NyDelayed,
        }
    }

    pub fn tau(&self) -> usize {
        match *self {
            BaselineConfig::Czp { tau, .. } | BaselineConfig::NyDelayed { tau, .. } => tau,
            _ => 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b, c) = match *self {
            BaselineConfig::Mosp { alpha, mu } => (alpha, mu, 0.0),
            BaselineConfig::Cl { eta, delta } | BaselineConfig::Czp { eta, delta, .. } => (eta, 1.0, delta),
            BaselineConfig::Ny { alpha, nu } | BaselineConfig::NyDelayed { alpha, nu, .. } => (alpha, nu, 0.0),
        };
        if !(a > 0.0) || !(b > 0.0) || !(c >= 0.0) || !c.is_finite() {
            return Err(OcoError::InvalidArgument(format!("invalid stepsizes in {self:?}")));
        }
        Ok(())
    }
}

/// Current decision and multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineState {
    pub x: Decision,
    pub lambda: Multiplier,
}

/// The stored quantities of round `t - tau` used by a delayed step.
#[derive(Debug, Clone, Copy)]
pub struct DelayedInput<'a> {
    pub x: &'a Decision,
    pub lambda: &'a Multiplier,
    pub oracle: &'a dyn RoundOracle,
}

fn positive_part(v: DVector<f64>) -> DVector<f64> {
    v.map(|c| c.max(0.0))
}

/// `grad f(x) + J(x) lambda`.
fn lagrangian_gradient(oracle: &dyn RoundOracle, x: &DVector<f64>, lambda: &DVector<f64>) -> DVector<f64> {
    oracle.loss_subgradient(x) + oracle.constraint_jacobian_mul(x, lambda)
}

pub fn mosp_step(
    state: &BaselineState,
    oracle: &dyn RoundOracle,
    set: &FeasibleSet,
    alpha: f64,
    mu: f64,
) -> Result<BaselineState> {
    if !oracle.constraints_affine() {
        return Err(OcoError::Unsupported("MOSP requires affine constraints".into()));
    }
    let grad = lagrangian_gradient(oracle, &state.x, &state.lambda);
    let x = set.project(&(&state.x - grad * alpha))?;
    let lambda = positive_part(&state.lambda + oracle.constraints(&x) * mu);
    Ok(BaselineState { x, lambda })
}

pub fn cl_step(
    state: &BaselineState,
    oracle: &dyn RoundOracle,
    set: &FeasibleSet,
    eta: f64,
    delta: f64,
) -> Result<BaselineState> {
    czp_step(
        state,
        DelayedInput { x: &state.x, lambda: &state.lambda, oracle },
        set,
        eta,
        delta,
    )
}

/// Undelayed NY step.
pub fn ny_step(
    state: &BaselineState,
    oracle: &dyn RoundOracle,
    set: &FeasibleSet,
    alpha: f64,
    nu: f64,
) -> Result<BaselineState> {
    let grad = oracle.loss_subgradient(&state.x) * nu + oracle.constraint_jacobian_mul(&state.x, &state.lambda);
    let x = set.project(&(&state.x - grad / (2.0 * alpha)))?;
    let lambda = positive_part(&state.lambda + oracle.constraints(&x));
    Ok(BaselineState { x, lambda })
}

pub fn czp_step(
    state: &BaselineState,
    delayed: DelayedInput<'_>,
    set: &FeasibleSet,
    eta: f64,
    delta: f64,
) -> Result<BaselineState> {
    let grad = lagrangian_gradient(delayed.oracle, delayed.x, delayed.lambda);
    let x = set.project(&(&state.x - grad * eta))?;
    let drift = delayed.oracle.constraints(delayed.x) - delayed.lambda * (delta * eta);
    let lambda = positive_part(&state.lambda + drift * eta);
    Ok(BaselineState { x, lambda })
}

/// Delayed NY step; the multiplier update uses the constraint linearized at `x_{t-tau}`.
pub fn ny_delayed_step(
    state: &BaselineState,
    delayed: DelayedInput<'_>,
    set: &FeasibleSet,
    alpha: f64,
    nu: f64,
) -> Result<BaselineState> {
    let oracle = delayed.oracle;
    let grad = oracle.loss_subgradient(delayed.x) * nu + oracle.constraint_jacobian_mul(delayed.x, delayed.lambda);
    let x = set.project(&(&state.x - grad / (2.0 * alpha)))?;
    let step = &x - delayed.x;
    let g = oracle.constraints(delayed.x);
    let lin = DVector::from_fn(g.len(), |i, _| g[i] + oracle.constraint_subgradient(delayed.x, i).dot(&step));
    let lambda = positive_part(&state.lambda + lin);
    Ok(BaselineState { x, lambda })
}

/// Round-by-round driver for any baseline.
#[derive(Debug, Clone)]
pub struct Baseline {
    cfg: BaselineConfig,
    set: FeasibleSet,
    state: BaselineState,
    /// `(x_s, lambda_s)` for the rounds whose feedback is still pending.
    history: VecDeque<(Decision, Multiplier)>,
    t: usize,
}

impl Baseline {
    /// Starts from the projection of the origin with a zero multiplier; with delay `tau`
    /// the first `tau` decisions repeat the start.
    pub fn new(cfg: BaselineConfig, set: FeasibleSet, num_constraints: usize) -> Result<Self> {
        cfg.validate()?;
        let x0 = set.project_unchecked(&DVector::zeros(set.dim()));
        let lambda0 = DVector::zeros(num_constraints);
        let tau = cfg.tau();
        let history = (0..tau).map(|_| (x0.clone(), lambda0.clone())).collect();
        Ok(Baseline {
            cfg,
            set,
            state: BaselineState { x: x0, lambda: lambda0 },
            history,
            t: tau,
        })
    }

    pub fn state(&self) -> &BaselineState {
        &self.state
    }

    /// Plays `x_t`, consumes the feedback of round `t - tau`, and advances.
    pub fn step(&mut self, oracle: &dyn RoundOracle) -> Result<()> {
        let t = self.t;
        self.history.push_back((self.state.x.clone(), self.state.lambda.clone()));
        let (x_old, lambda_old) = self.history.pop_front().expect("history holds round t - tau");
        let delayed = DelayedInput { x: &x_old, lambda: &lambda_old, oracle };
        let next = match self.cfg {
            BaselineConfig::Mosp { alpha, mu } => mosp_step(&self.state, oracle, &self.set, alpha, mu),
            BaselineConfig::Cl { eta, delta } => cl_step(&self.state, oracle, &self.set, eta, delta),
            BaselineConfig::Ny { alpha, nu } => ny_step(&self.state, oracle, &self.set, alpha, nu),
            BaselineConfig::Czp { eta, delta, .. } => czp_step(&self.state, delayed, &self.set, eta, delta),
            BaselineConfig::NyDelayed { alpha, nu, .. } => {
                ny_delayed_step(&self.state, delayed, &self.set, alpha, nu)
            }
        }
        .map_err(|e| e.at_round(t))?;
        if next.x.iter().chain(next.lambda.iter()).any(|v| !v.is_finite()) {
            return Err(OcoError::Numeric("non-finite iterate".into()).at_round(t));
        }
        self.state = next;
        self.t += 1;
        Ok(())
    }
}

/// Runs a baseline for `horizon` rounds of feedback.
///
/// The trajectory holds the `T` played decisions and the multipliers `lambda_0 .. lambda_{T+tau}`.
pub fn run_baseline(problem: &ProblemInstance, cfg: &BaselineConfig, horizon: usize) -> Result<Trajectory> {
    let tau = cfg.tau();
    if horizon <= tau {
        return Err(OcoError::InvalidArgument(format!("horizon {horizon} must exceed the delay {tau}")));
    }
    if problem.horizon() < horizon {
        return Err(OcoError::InvalidArgument(format!(
            "problem has {} rounds, configuration asks for {horizon}",
            problem.horizon()
        )));
    }
    let mut solver = Baseline::new(*cfg, problem.set.clone(), problem.num_constraints())?;
    let mut decisions = Vec::with_capacity(horizon + tau);
    let mut multipliers = Vec::with_capacity(horizon + tau + 1);
    for _ in 0..tau {
        decisions.push(solver.state().x.clone());
        multipliers.push(solver.state().lambda.clone());
    }
    for round in 0..horizon {
        decisions.push(solver.state().x.clone());
        multipliers.push(solver.state().lambda.clone());
        solver.step(problem.rounds[round].as_ref())?;
    }
    multipliers.push(solver.state().lambda.clone());
    decisions.truncate(horizon);
    Ok(Trajectory::new(cfg.kind().name(), tau, decisions, Some(multipliers)))
}
