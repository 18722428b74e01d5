//! Model-based augmented Lagrangian method, with and without feedback delay.
//!
//! Each round solves
//!
//! ```text
//! x_{t+1} = argmin_{x in C}  L_sigma(x, lambda_t) + alpha/2 ||x - x_{t-tau}||^2
//! lambda_{t+1} = [lambda_t + sigma G(x_{t+1})]_+
//! ```
//!
//! where `L_sigma(x, lambda) = F(x) + (||[lambda + sigma G(x)]_+||^2 - ||lambda||^2) / (2 sigma)`
//! and `(F, G)` is the model of round `t - tau` anchored at `x_{t-tau}`.

use std::collections::VecDeque;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{OcoError, Result};
use crate::inner::{self, InnerSolverConfig, SmoothObjective};
use crate::models::{self, ModelAt, ModelKind};
use crate::oracle::{Decision, Multiplier, SharedOracle};
use crate::problems::ProblemInstance;
use crate::sets::FeasibleSet;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MalmConfig {
    /// Proximal weight.
    pub alpha: f64,
    /// Penalty parameter.
    pub sigma: f64,
    /// Feedback delay in rounds.
    pub tau: usize,
    pub horizon: usize,
    pub model: ModelKind,
    pub inner: InnerSolverConfig,
    /// Initial decision; `None` means the projection of the origin.
    pub x0: Option<DVector<f64>>,
}

impl MalmConfig {
    /// Stepsizes `alpha = sqrt(T / (tau + 1))`, `sigma = sqrt((tau + 1) / T)`.
    pub fn theorem(horizon: usize, tau: usize, model: ModelKind) -> Self {
        let ratio = horizon as f64 / (tau as f64 + 1.0);
        MalmConfig {
            alpha: ratio.sqrt(),
            sigma: 1.0 / ratio.sqrt(),
            tau,
            horizon,
            model,
            inner: InnerSolverConfig::default(),
            x0: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !(self.sigma > 0.0) {
            return Err(OcoError::InvalidArgument(format!(
                "alpha and sigma must be positive, got alpha={} sigma={}",
                self.alpha, self.sigma
            )));
        }
        if self.horizon <= self.tau {
            return Err(OcoError::InvalidArgument(format!(
                "horizon {} must exceed the delay {}",
                self.horizon, self.tau
            )));
        }
        self.inner.validate()
    }
}

/// `F(x) + (||[lambda + sigma G(x)]_+||^2 - ||lambda||^2) / (2 sigma)`.
pub fn aug_lagrangian(model: &ModelAt, x: &DVector<f64>, lambda: &Multiplier, sigma: f64) -> f64 {
    let shifted = (lambda + model.eval_g(x) * sigma).map(|v| v.max(0.0));
    model.eval_f(x) + (shifted.norm_squared() - lambda.norm_squared()) / (2.0 * sigma)
}

/// `[lambda + sigma G(x_next)]_+`.
pub fn multiplier_update(lambda: &Multiplier, model: &ModelAt, x_next: &DVector<f64>, sigma: f64) -> Multiplier {
    (lambda + model.eval_g(x_next) * sigma).map(|v| v.max(0.0))
}

/// The proximal augmented Lagrangian subproblem objective. With `loss_weight = Some(theta)`
/// the loss model is replaced by `theta` times its tangent (used for the truncated model).
struct Subproblem<'a> {
    model: &'a ModelAt,
    center: &'a DVector<f64>,
    lambda: &'a Multiplier,
    alpha: f64,
    sigma: f64,
    loss_weight: Option<f64>,
}

impl Subproblem<'_> {
    fn loss_value(&self, x: &DVector<f64>) -> f64 {
        match self.loss_weight {
            None => self.model.eval_f(x),
            Some(theta) => theta * self.model.loss_tangent(x).expect("tangent model").0,
        }
    }

    fn loss_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        match self.loss_weight {
            None => self.model.subgrad_f(x),
            Some(theta) => self.model.loss_tangent(x).expect("tangent model").1 * theta,
        }
    }

    fn lipschitz_hint(&self) -> f64 {
        let jac = self.model.constraint_gradients(self.center);
        let mut hint = self.alpha + self.model.loss_curvature() + self.sigma * jac.norm_squared();
        let g = self.model.eval_g(self.center);
        for i in 0..self.model.num_constraints() {
            let curv = self.model.constraint_curvature(i);
            if curv > 0.0 {
                hint += curv * (self.lambda[i] + self.sigma * g[i]).max(0.0);
            }
        }
        hint
    }
}

impl SmoothObjective for Subproblem<'_> {
    fn value(&self, x: &DVector<f64>) -> f64 {
        let shifted = (self.lambda + self.model.eval_g(x) * self.sigma).map(|v| v.max(0.0));
        self.loss_value(x)
            + (shifted.norm_squared() - self.lambda.norm_squared()) / (2.0 * self.sigma)
            + 0.5 * self.alpha * (x - self.center).norm_squared()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let weights = (self.lambda + self.model.eval_g(x) * self.sigma).map(|v| v.max(0.0));
        let mut grad = self.loss_gradient(x);
        grad += self.model.jacobian_mul(x, &weights);
        grad.axpy(self.alpha, &(x - self.center), 1.0);
        grad
    }
}

/// Subproblem objective `L_sigma(x, lambda) + alpha/2 ||x - center||^2`.
pub fn subproblem_value(
    model: &ModelAt,
    center: &DVector<f64>,
    lambda: &Multiplier,
    alpha: f64,
    sigma: f64,
    x: &DVector<f64>,
) -> f64 {
    aug_lagrangian(model, x, lambda, sigma) + 0.5 * alpha * (x - center).norm_squared()
}

/// Projected-gradient residual of the subproblem at `x` (for the truncated model, the
/// smallest residual over the subdifferential of the hinge).
pub fn subproblem_residual(
    model: &ModelAt,
    center: &DVector<f64>,
    lambda: &Multiplier,
    alpha: f64,
    sigma: f64,
    set: &FeasibleSet,
    x: &DVector<f64>,
) -> f64 {
    let project = |v: &DVector<f64>| set.project_unchecked(v);
    if model.is_truncated() {
        let (value, slope) = model.loss_tangent(x).expect("tangent model");
        let kink = 1e-10 * (1.0 + slope.norm() * (1.0 + x.norm()));
        let with = |theta: f64| {
            let sp = Subproblem { model, center, lambda, alpha, sigma, loss_weight: Some(theta) };
            inner::gradient_map_residual(&project, x, &sp.gradient(x))
        };
        if value > kink {
            return with(1.0);
        }
        if value < -kink {
            return with(0.0);
        }
        // on the kink: minimize over theta in [0, 1] (the residual is convex in theta)
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..100 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if with(m1) <= with(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        return with(0.5 * (lo + hi));
    }
    let sp = Subproblem { model, center, lambda, alpha, sigma, loss_weight: None };
    inner::gradient_map_residual(&project, x, &sp.gradient(x))
}

/// Exact minimizer of `alpha/2 ||x||^2 + a'x + sigma/2 [b'x + gamma]_+^2` over R^n,
/// followed by projection onto `set`.
pub fn closed_form_linearized_p1(
    a: &DVector<f64>,
    b: &DVector<f64>,
    gamma: f64,
    alpha: f64,
    sigma: f64,
    set: &FeasibleSet,
) -> DVector<f64> {
    let xbar = if alpha * gamma <= a.dot(b) {
        -a / alpha
    } else {
        // (alpha I + sigma b b') x = -(a + sigma gamma b), by Sherman-Morrison
        let w = a + b * (sigma * gamma);
        let coef = sigma * b.dot(&w) / (alpha * (alpha + sigma * b.norm_squared()));
        -&w / alpha + b * coef
    };
    set.project_unchecked(&xbar)
}

/// Solves the proximal subproblem to `inner.tol`.
///
/// With one constraint and the linearized model the closed form is tried first and kept
/// whenever it already meets the tolerance; otherwise the accelerated projected-gradient
/// solver runs, warm-started from the best available point.
pub fn solve_subproblem(
    model: &ModelAt,
    prox_center: &DVector<f64>,
    lambda: &Multiplier,
    alpha: f64,
    sigma: f64,
    inner_cfg: &InnerSolverConfig,
    set: &FeasibleSet,
) -> Result<DVector<f64>> {
    let mut start = prox_center.clone();
    if model.kind() == ModelKind::Linearized && model.num_constraints() == 1 {
        let anchor = model.anchor();
        let u = model.subgrad_f(anchor);
        let v = model.subgrad_g(anchor, 0);
        let g0 = model.eval_g(anchor)[0];
        let a = -prox_center * alpha + u;
        let gamma = lambda[0] / sigma + g0 - v.dot(anchor);
        // the linear loss term is <u, x - anchor>; its constant part does not move the minimizer
        let candidate = closed_form_linearized_p1(&a, &v, gamma, alpha, sigma, set);
        let res = subproblem_residual(model, prox_center, lambda, alpha, sigma, set, &candidate);
        if res <= inner_cfg.tol {
            return Ok(candidate);
        }
        if subproblem_value(model, prox_center, lambda, alpha, sigma, &candidate)
            <= subproblem_value(model, prox_center, lambda, alpha, sigma, prox_center)
        {
            start = candidate;
        }
    }

    if model.is_truncated() {
        return solve_truncated(model, prox_center, lambda, alpha, sigma, inner_cfg, set);
    }
    if !model.is_smooth() {
        return Err(OcoError::Unsupported(format!(
            "the {} model of a nonsmooth round has no smooth subproblem",
            model.kind()
        )));
    }
    let sp = Subproblem { model, center: prox_center, lambda, alpha, sigma, loss_weight: None };
    let out = inner::minimize(&sp, |v| set.project_unchecked(v), &start, sp.lipschitz_hint(), inner_cfg)?;
    Ok(out.x)
}

/// Truncated model: `[l(x)]_+ = max_{theta in [0,1]} theta l(x)`; bisect the dual variable
/// on the sign of `l(x(theta))`, which is nonincreasing in `theta`.
fn solve_truncated(
    model: &ModelAt,
    center: &DVector<f64>,
    lambda: &Multiplier,
    alpha: f64,
    sigma: f64,
    inner_cfg: &InnerSolverConfig,
    set: &FeasibleSet,
) -> Result<DVector<f64>> {
    // a tighter inner tolerance: the bisection composes several inner solves
    let cfg = InnerSolverConfig { tol: inner_cfg.tol * 0.1, max_iters: inner_cfg.max_iters };
    let solve = |theta: f64, start: &DVector<f64>| -> Result<DVector<f64>> {
        let sp = Subproblem { model, center, lambda, alpha, sigma, loss_weight: Some(theta) };
        Ok(inner::minimize(&sp, |v| set.project_unchecked(v), start, sp.lipschitz_hint(), &cfg)?.x)
    };
    let tangent = |x: &DVector<f64>| model.loss_tangent(x).expect("tangent model").0;

    let x0 = solve(0.0, center)?;
    if tangent(&x0) <= 0.0 {
        return Ok(x0);
    }
    let x1 = solve(1.0, &x0)?;
    if tangent(&x1) >= 0.0 {
        return Ok(x1);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut best = x1;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let x = solve(mid, &best)?;
        let val = tangent(&x);
        best = x;
        if subproblem_residual(model, center, lambda, alpha, sigma, set, &best) <= inner_cfg.tol {
            break;
        }
        if val > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Solver state: current decision and multiplier plus the decisions still awaiting feedback.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub x: Decision,
    pub lambda: Multiplier,
    /// Submitted decisions whose feedback has not been processed yet (at most `tau + 1`).
    pub buffer: VecDeque<Decision>,
    /// Index of the current decision `x_t`.
    pub t: usize,
}

/// Round-by-round driver for the delayed method.
#[derive(Debug, Clone)]
pub struct Malm {
    cfg: MalmConfig,
    set: FeasibleSet,
    nu_g: f64,
    state: SolverState,
}

impl Malm {
    /// Initializes `x_0 = ... = x_tau` and `lambda_0 = ... = lambda_tau = 0`; the state starts at `t = tau`.
    pub fn new(cfg: MalmConfig, set: FeasibleSet, num_constraints: usize, nu_g: f64) -> Result<Self> {
        cfg.validate()?;
        let x0 = match &cfg.x0 {
            Some(x) => set.project(x)?,
            None => set.project_unchecked(&DVector::zeros(set.dim())),
        };
        let mut buffer = VecDeque::with_capacity(cfg.tau + 1);
        // x_0 .. x_{tau-1} have been submitted blindly; x_tau is submitted by the first step
        for _ in 0..cfg.tau {
            buffer.push_back(x0.clone());
        }
        let state = SolverState {
            x: x0,
            lambda: DVector::zeros(num_constraints),
            buffer,
            t: cfg.tau,
        };
        Ok(Malm { cfg, set, nu_g, state })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn config(&self) -> &MalmConfig {
        &self.cfg
    }

    /// Submits `x_t`, consumes the feedback of round `t - tau`, and advances to `x_{t+1}`, `lambda_{t+1}`.
    pub fn step(&mut self, delayed: &SharedOracle) -> Result<()> {
        let t = self.state.t;
        self.state.buffer.push_back(self.state.x.clone());
        let anchor = self
            .state
            .buffer
            .pop_front()
            .expect("buffer holds x_{t-tau} after submission");
        let model = models::build(self.cfg.model, delayed, &anchor)
            .map_err(|e| e.at_round(t))?
            .with_nu_g(self.nu_g);
        let x_next = solve_subproblem(
            &model,
            &anchor,
            &self.state.lambda,
            self.cfg.alpha,
            self.cfg.sigma,
            &self.cfg.inner,
            &self.set,
        )
        .map_err(|e| e.at_round(t))?;
        self.state.lambda = multiplier_update(&self.state.lambda, &model, &x_next, self.cfg.sigma);
        self.state.x = x_next;
        self.state.t += 1;
        Ok(())
    }
}

fn check_problem(problem: &ProblemInstance, cfg: &MalmConfig) -> Result<()> {
    if problem.horizon() < cfg.horizon {
        return Err(OcoError::InvalidArgument(format!(
            "problem has {} rounds, configuration asks for {}",
            problem.horizon(),
            cfg.horizon
        )));
    }
    Ok(())
}

/// Runs the delayed method for `cfg.horizon` rounds of feedback.
///
/// The returned trajectory holds the `T` played decisions `x_0 .. x_{T-1}` and every
/// multiplier `lambda_0 .. lambda_{T+tau}` produced.
pub fn run_malm(problem: &ProblemInstance, cfg: &MalmConfig) -> Result<Trajectory> {
    cfg.validate()?;
    check_problem(problem, cfg)?;
    let nu_g = problem.constants.nu_g(cfg.model);
    let mut solver = Malm::new(cfg.clone(), problem.set.clone(), problem.num_constraints(), nu_g)?;
    let horizon = cfg.horizon;
    let mut decisions = Vec::with_capacity(horizon);
    let mut multipliers = Vec::with_capacity(horizon + cfg.tau + 1);
    let x0 = solver.state().x.clone();
    let zero = solver.state().lambda.clone();
    for _ in 0..cfg.tau {
        decisions.push(x0.clone());
        multipliers.push(zero.clone());
    }
    for round in 0..horizon {
        decisions.push(solver.state().x.clone());
        multipliers.push(solver.state().lambda.clone());
        solver.step(&problem.rounds[round])?;
    }
    multipliers.push(solver.state().lambda.clone());
    decisions.truncate(horizon);
    Ok(Trajectory::new("malm", cfg.tau, decisions, Some(multipliers)))
}

/// The undelayed method written directly, without a feedback buffer.
pub fn run_malm_undelayed(problem: &ProblemInstance, cfg: &MalmConfig) -> Result<Trajectory> {
    if cfg.tau != 0 {
        return Err(OcoError::InvalidArgument("the undelayed method needs tau = 0".into()));
    }
    cfg.validate()?;
    check_problem(problem, cfg)?;
    let nu_g = problem.constants.nu_g(cfg.model);
    let set = &problem.set;
    let mut x = match &cfg.x0 {
        Some(x) => set.project(x)?,
        None => set.project_unchecked(&DVector::zeros(set.dim())),
    };
    let mut lambda: Multiplier = DVector::zeros(problem.num_constraints());
    let mut decisions = Vec::with_capacity(cfg.horizon);
    let mut multipliers = Vec::with_capacity(cfg.horizon + 1);
    for t in 0..cfg.horizon {
        decisions.push(x.clone());
        multipliers.push(lambda.clone());
        let model = models::build(cfg.model, &problem.rounds[t], &x)
            .map_err(|e| e.at_round(t))?
            .with_nu_g(nu_g);
        let x_next = solve_subproblem(&model, &x, &lambda, cfg.alpha, cfg.sigma, &cfg.inner, set)
            .map_err(|e| e.at_round(t))?;
        lambda = multiplier_update(&lambda, &model, &x_next, cfg.sigma);
        x = x_next;
    }
    multipliers.push(lambda);
    Ok(Trajectory::new("malm", 0, decisions, Some(multipliers)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_linearized, build_plain};
    use crate::oracle::FnOracle;
    use nalgebra::dvector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn linear_1d() -> SharedOracle {
        // f(x) = x, g(x) = x - 1
        Arc::new(
            FnOracle::new(
                0,
                1,
                1,
                |x| x[0],
                |_| dvector![1.0],
                |x| dvector![x[0] - 1.0],
                |_, _| dvector![1.0],
            )
            .affine_constraints(true),
        )
    }

    #[test]
    fn aug_lagrangian_values() {
        // p = 1, F = 2, G = 3, lambda = 1, sigma = 2 -> 2 + ((1 + 6)^2 - 1) / 4 = 14
        let o: SharedOracle = Arc::new(FnOracle::new(
            0,
            1,
            1,
            |_| 2.0,
            |_| dvector![0.0],
            |_| dvector![3.0],
            |_, _| dvector![0.0],
        ));
        let m = build_plain(&o, &dvector![0.0]);
        assert_eq!(aug_lagrangian(&m, &dvector![0.0], &dvector![1.0], 2.0), 14.0);

        // inactive hinge with zero multiplier
        let m = build_plain(&linear_1d(), &dvector![0.0]);
        assert_eq!(aug_lagrangian(&m, &dvector![0.5], &dvector![0.0], 3.0), 0.5);
        // G(x) = 0 leaves F
        assert_eq!(aug_lagrangian(&m, &dvector![1.0], &dvector![2.5], 0.7), 1.0);
    }

    #[test]
    fn plain_subproblem_one_dimensional() {
        // minimize x + x^2/2 on [-2, 2] with an inactive hinge: x = -1, then lambda stays 0
        let set = FeasibleSet::new_box(dvector![-2.0], dvector![2.0]).unwrap();
        let m = build_plain(&linear_1d(), &dvector![0.0]);
        let lambda = dvector![0.0];
        let x = solve_subproblem(&m, &dvector![0.0], &lambda, 1.0, 1.0, &InnerSolverConfig::default(), &set)
            .unwrap();
        assert!((x[0] + 1.0).abs() < 1e-9);
        assert_eq!(multiplier_update(&lambda, &m, &x, 1.0), dvector![0.0]);
    }

    #[test]
    fn tiny_penalty_keeps_prox_center() {
        let o: SharedOracle = Arc::new(FnOracle::new(
            0,
            2,
            1,
            |_| 3.0,
            |_| dvector![0.0, 0.0],
            |x| dvector![x[0] + x[1] - 10.0],
            |_, _| dvector![1.0, 1.0],
        ));
        let set = FeasibleSet::euclidean_ball(5.0, 2).unwrap();
        let center = dvector![0.3, -0.2];
        let m = build_plain(&o, &center);
        let x = solve_subproblem(&m, &center, &dvector![0.0], 1.0, 1e-12, &InnerSolverConfig::default(), &set)
            .unwrap();
        assert!((x - center).norm() < 1e-12);
    }

    #[test]
    fn closed_form_branches() {
        let big = FeasibleSet::euclidean_ball(1e6, 2).unwrap();
        // first branch
        let x = closed_form_linearized_p1(&dvector![1.0, 2.0], &dvector![1.0, 0.0], 0.5, 2.0, 1.0, &big);
        assert_eq!(x, dvector![-0.5, -1.0]);
        // second branch, hand-solved 2x2 system
        let x = closed_form_linearized_p1(&dvector![1.0, 0.0], &dvector![0.0, 1.0], 1.0, 1.0, 1.0, &big);
        assert!((x - dvector![-1.0, -0.5]).norm() < 1e-15);
    }

    #[test]
    fn closed_form_is_continuous_across_branches() {
        let big = FeasibleSet::euclidean_ball(1e6, 3).unwrap();
        let a = dvector![0.4, -1.0, 2.0];
        let b = dvector![1.5, 0.5, -0.25];
        let (alpha, sigma) = (1.7, 0.9);
        let gamma = a.dot(&b) / alpha;
        let left = closed_form_linearized_p1(&a, &b, gamma, alpha, sigma, &big);
        let right = closed_form_linearized_p1(&a, &b, gamma * (1.0 + 1e-15) + 1e-15, alpha, sigma, &big);
        assert!((&left - &right).norm() < 1e-12);
        assert!((b.dot(&left) + gamma).abs() < 1e-12);
    }

    #[test]
    fn linearized_p1_dispatch_matches_inner_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let set = FeasibleSet::sup_norm_ball(1.0, 3).unwrap();
        for _ in 0..50 {
            let c = DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
            let d = DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
            let e: f64 = rng.random_range(-1.0..0.5);
            let (c2, d2) = (c.clone(), d.clone());
            let o: SharedOracle = Arc::new(FnOracle::new(
                0,
                3,
                1,
                move |x| c.dot(x),
                move |_| c2.clone(),
                move |x| dvector![d.dot(x) + e],
                move |_, _| d2.clone(),
            ));
            let anchor = DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
            let lambda = dvector![rng.random_range(0.0..2.0)];
            let (alpha, sigma) = (rng.random_range(0.2..3.0), rng.random_range(0.2..3.0));
            let m = build_linearized(&o, &anchor);
            let tight = InnerSolverConfig { tol: 1e-12, max_iters: 100_000 };
            let x = solve_subproblem(&m, &anchor, &lambda, alpha, sigma, &tight, &set).unwrap();
            assert!(subproblem_residual(&m, &anchor, &lambda, alpha, sigma, &set, &x) <= 1e-12);
        }
    }

    #[test]
    fn multiplier_update_examples() {
        let o: SharedOracle = Arc::new(FnOracle::new(
            0,
            1,
            2,
            |_| 0.0,
            |_| dvector![0.0],
            |_| dvector![-1.0, 4.0],
            |_, _| dvector![0.0],
        ));
        let m = build_plain(&o, &dvector![0.0]);
        assert_eq!(multiplier_update(&dvector![1.0, 0.0], &m, &dvector![0.0], 0.5), dvector![0.5, 2.0]);
        let m1 = build_plain(&linear_1d(), &dvector![0.0]);
        assert_eq!(multiplier_update(&dvector![0.0], &m1, &dvector![0.0], 1.0), dvector![0.0]);
    }

    #[test]
    fn truncated_subproblem_is_optimal() {
        use crate::models::build_truncated;
        // f(x) = (x0 - 1)^2 + x1^2 >= 0; tangent at (2, 1)
        let o: SharedOracle = Arc::new(FnOracle::new(
            0,
            2,
            1,
            |x| (x[0] - 1.0).powi(2) + x[1] * x[1],
            |x| dvector![2.0 * (x[0] - 1.0), 2.0 * x[1]],
            |x| dvector![x[0] - 3.0],
            |_, _| dvector![1.0, 0.0],
        ));
        let set = FeasibleSet::euclidean_ball(3.0, 2).unwrap();
        let anchor = dvector![2.0, 1.0];
        let m = build_truncated(&o, &anchor);
        let lambda = dvector![0.2];
        for alpha in [0.5, 1.0, 4.0, 20.0] {
            let x = solve_subproblem(&m, &anchor, &lambda, alpha, 1.0, &InnerSolverConfig::default(), &set).unwrap();
            let res = subproblem_residual(&m, &anchor, &lambda, alpha, 1.0, &set, &x);
            assert!(res < 1e-8, "alpha {alpha}: residual {res}");
            // no sampled feasible point does better
            let best = subproblem_value(&m, &anchor, &lambda, alpha, 1.0, &x);
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..2000 {
                let y = crate::oracle::random_point(&set, &mut rng);
                assert!(subproblem_value(&m, &anchor, &lambda, alpha, 1.0, &y) >= best - 1e-9);
            }
        }
    }

    #[test]
    fn nonsmooth_plain_model_is_rejected() {
        let o: SharedOracle = Arc::new(
            FnOracle::new(
                0,
                1,
                1,
                |x| x[0],
                |_| dvector![1.0],
                |x| dvector![x[0].abs() - 1.0],
                |x, _| dvector![x[0].signum()],
            )
            .smooth(false),
        );
        let set = FeasibleSet::new_box(dvector![-2.0], dvector![2.0]).unwrap();
        let m = build_plain(&o, &dvector![0.5]);
        let err = solve_subproblem(&m, &dvector![0.5], &dvector![1.0], 1.0, 1.0, &InnerSolverConfig::default(), &set);
        assert!(matches!(err, Err(OcoError::Unsupported(_))));
    }

    #[test]
    fn invalid_configuration() {
        let mut cfg = MalmConfig::theorem(10, 0, ModelKind::Linearized);
        cfg.alpha = 0.0;
        assert!(cfg.validate().is_err());
        let cfg = MalmConfig::theorem(5, 5, ModelKind::Linearized);
        assert!(cfg.validate().is_err());
    }
}
