//! Best fixed decision in hindsight: `min sum_t f_t(x)` over `x in C` with `g_t(x) <= 0` for all `t`.
//!
//! The general route is an augmented-Lagrangian loop over every round's constraints with an
//! accelerated projected-gradient inner solve. Constraints that are inactive with a zero
//! multiplier contribute nothing to the augmented Lagrangian, so each inner solve only sees a
//! working set, and is repeated whenever an excluded constraint turns out violated.

use nalgebra::{DMatrix, DVector};

use crate::error::{OcoError, Result};
use crate::inner::{self, InnerSolverConfig, SmoothObjective};
use crate::oracle::SharedOracle;
use crate::problems::{NraData, OlrData, OqcqpData, ProblemInstance, Structure};
use crate::psd::spectral_norm_sym;
use crate::sets::FeasibleSet;

pub const DEFAULT_TOL: f64 = 1e-7;

const INITIAL_PENALTY: f64 = 10.0;
const MAX_PENALTY: f64 = 1e12;
const MAX_OUTER: usize = 200;
const INNER_MAX_ITERS: usize = 200_000;

/// A smooth convex program `min phi(x)` s.t. `c_j(x) <= 0`, with the objective already
/// divided by the horizon.
pub trait OfflineProgram {
    fn dim(&self) -> usize;
    fn objective(&self, x: &DVector<f64>) -> f64;
    fn objective_gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    /// Lipschitz constant of the objective gradient, if known.
    fn objective_curvature(&self) -> Option<f64>;
    fn num_constraints(&self) -> usize;
    fn constraint(&self, j: usize, x: &DVector<f64>) -> f64;
    fn constraint_gradient(&self, j: usize, x: &DVector<f64>) -> DVector<f64>;
    fn constraint_curvature(&self, j: usize) -> f64;

    /// `c_j(x)` for every `j` in `indices` (sorted ascending).
    fn constraint_values(&self, indices: &[usize], x: &DVector<f64>) -> Vec<f64> {
        indices.iter().map(|&j| self.constraint(j, x)).collect()
    }

    /// `g += sum_k weights[k] grad c_{indices[k]}(x)`.
    fn add_weighted_gradients(&self, indices: &[usize], weights: &[f64], x: &DVector<f64>, g: &mut DVector<f64>) {
        for (&j, &w) in indices.iter().zip(weights) {
            if w != 0.0 {
                g.axpy(w, &self.constraint_gradient(j, x), 1.0);
            }
        }
    }
}

/// `c(x) = 1/2 x'Cx + d'x + e`; `C = None` for affine constraints.
#[derive(Debug, Clone)]
pub struct QuadConstraint {
    pub c: Option<DMatrix<f64>>,
    pub d: DVector<f64>,
    pub e: f64,
    curvature: f64,
}

impl QuadConstraint {
    pub fn new(c: Option<DMatrix<f64>>, d: DVector<f64>, e: f64) -> Self {
        let curvature = c.as_ref().map_or(0.0, spectral_norm_sym);
        QuadConstraint { c, d, e, curvature }
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        let quad = self.c.as_ref().map_or(0.0, |c| 0.5 * x.dot(&(c * x)));
        quad + self.d.dot(x) + self.e
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.c {
            Some(c) => c * x + &self.d,
            None => self.d.clone(),
        }
    }
}

/// `min 1/2 x'Hx + c'x` subject to quadratic constraints.
#[derive(Debug, Clone)]
pub struct QcqpProgram {
    pub h: DMatrix<f64>,
    pub c: DVector<f64>,
    pub constraints: Vec<QuadConstraint>,
    curvature: f64,
}

impl QcqpProgram {
    pub fn new(h: DMatrix<f64>, c: DVector<f64>, constraints: Vec<QuadConstraint>) -> Self {
        let curvature = spectral_norm_sym(&h);
        QcqpProgram { h, c, constraints, curvature }
    }
}

impl OfflineProgram for QcqpProgram {
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn objective(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.h * x)) + self.c.dot(x)
    }
    fn objective_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.h * x + &self.c
    }
    fn objective_curvature(&self) -> Option<f64> {
        Some(self.curvature)
    }
    fn num_constraints(&self) -> usize {
        self.constraints.len()
    }
    fn constraint(&self, j: usize, x: &DVector<f64>) -> f64 {
        self.constraints[j].value(x)
    }
    fn constraint_gradient(&self, j: usize, x: &DVector<f64>) -> DVector<f64> {
        self.constraints[j].gradient(x)
    }
    fn constraint_curvature(&self, j: usize) -> f64 {
        self.constraints[j].curvature
    }
}

/// The program assembled directly from round oracles: objective `(1/T) sum_t f_t` and one
/// constraint per `(t, i)`.
#[derive(Debug, Clone)]
pub struct RoundsProgram {
    rounds: Vec<SharedOracle>,
    p: usize,
}

impl RoundsProgram {
    pub fn new(rounds: Vec<SharedOracle>) -> Result<Self> {
        let first = rounds
            .first()
            .ok_or_else(|| OcoError::InvalidArgument("no rounds to aggregate".into()))?;
        if rounds.iter().any(|r| !r.is_smooth()) {
            return Err(OcoError::Unsupported(
                "the general comparator needs smooth losses and constraints".into(),
            ));
        }
        let p = first.num_constraints();
        Ok(RoundsProgram { rounds, p })
    }
}

impl OfflineProgram for RoundsProgram {
    fn dim(&self) -> usize {
        self.rounds[0].dim()
    }
    fn objective(&self, x: &DVector<f64>) -> f64 {
        self.rounds.iter().map(|r| r.loss(x)).sum::<f64>() / self.rounds.len() as f64
    }
    fn objective_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.dim());
        for r in &self.rounds {
            g += r.loss_subgradient(x);
        }
        g / self.rounds.len() as f64
    }
    fn objective_curvature(&self) -> Option<f64> {
        let mut total = 0.0;
        for r in &self.rounds {
            total += r.loss_curvature()?;
        }
        Some(total / self.rounds.len() as f64)
    }
    fn num_constraints(&self) -> usize {
        self.rounds.len() * self.p
    }
    fn constraint(&self, j: usize, x: &DVector<f64>) -> f64 {
        self.rounds[j / self.p].constraints(x)[j % self.p]
    }
    fn constraint_gradient(&self, j: usize, x: &DVector<f64>) -> DVector<f64> {
        self.rounds[j / self.p].constraint_subgradient(x, j % self.p)
    }
    fn constraint_curvature(&self, j: usize) -> f64 {
        self.rounds[j / self.p].constraint_curvature(j % self.p)
    }

    fn constraint_values(&self, indices: &[usize], x: &DVector<f64>) -> Vec<f64> {
        let mut out = Vec::with_capacity(indices.len());
        let mut cached: Option<(usize, DVector<f64>)> = None;
        for &j in indices {
            let t = j / self.p;
            if cached.as_ref().is_none_or(|(ct, _)| *ct != t) {
                cached = Some((t, self.rounds[t].constraints(x)));
            }
            out.push(cached.as_ref().expect("cached round").1[j % self.p]);
        }
        out
    }

    fn add_weighted_gradients(&self, indices: &[usize], weights: &[f64], x: &DVector<f64>, g: &mut DVector<f64>) {
        let mut k = 0;
        while k < indices.len() {
            let t = indices[k] / self.p;
            let mut w = DVector::zeros(self.p);
            while k < indices.len() && indices[k] / self.p == t {
                w[indices[k] % self.p] = weights[k];
                k += 1;
            }
            if w.iter().any(|&v| v != 0.0) {
                *g += self.rounds[t].constraint_jacobian_mul(x, &w);
            }
        }
    }
}

/// Result of an offline solve.
#[derive(Debug, Clone)]
pub struct OfflineSolution {
    pub x: DVector<f64>,
    /// Objective of the program (already divided by the horizon).
    pub objective: f64,
    pub max_violation: f64,
    /// Projected-gradient residual of the final augmented Lagrangian.
    pub residual: f64,
    pub outer_iters: usize,
}

struct AugmentedLagrangian<'a, P: OfflineProgram + ?Sized> {
    program: &'a P,
    working: &'a [usize],
    mu: &'a [f64],
    rho: f64,
}

impl<P: OfflineProgram + ?Sized> AugmentedLagrangian<'_, P> {
    fn shifted(&self, x: &DVector<f64>) -> Vec<f64> {
        let values = self.program.constraint_values(self.working, x);
        self.working
            .iter()
            .zip(values)
            .map(|(&j, c)| (self.mu[j] + self.rho * c).max(0.0))
            .collect()
    }

    fn lipschitz_hint(&self, x: &DVector<f64>) -> f64 {
        let mut l = self.program.objective_curvature().unwrap_or(1.0);
        let shifted = self.shifted(x);
        for (&j, s) in self.working.iter().zip(shifted) {
            let grad = self.program.constraint_gradient(j, x);
            l += self.rho * grad.norm_squared() + s * self.program.constraint_curvature(j);
        }
        l
    }
}

impl<P: OfflineProgram + ?Sized> SmoothObjective for AugmentedLagrangian<'_, P> {
    fn value(&self, x: &DVector<f64>) -> f64 {
        let shifted = self.shifted(x);
        let penalty: f64 = self
            .working
            .iter()
            .zip(shifted)
            .map(|(&j, s)| s * s - self.mu[j] * self.mu[j])
            .sum();
        self.program.objective(x) + penalty / (2.0 * self.rho)
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = self.program.objective_gradient(x);
        let shifted = self.shifted(x);
        self.program.add_weighted_gradients(self.working, &shifted, x, &mut g);
        g
    }
}

/// Adds the excluded constraints violated by at least half the largest excluded violation;
/// returns false when no excluded constraint is violated. Redundant copies of a constraint
/// with smaller offsets usually never enter.
fn admit_violated(values: &[f64], in_working: &mut [bool], working: &mut Vec<usize>) -> bool {
    let worst = values
        .iter()
        .zip(in_working.iter())
        .filter(|(_, &w)| !w)
        .map(|(&v, _)| v)
        .fold(0.0, f64::max);
    if worst <= 0.0 {
        return false;
    }
    for (j, &v) in values.iter().enumerate() {
        if !in_working[j] && v >= 0.5 * worst {
            in_working[j] = true;
            working.push(j);
        }
    }
    working.sort_unstable();
    true
}

/// Solves `program` over `set` by the augmented-Lagrangian method, starting from `x0`.
pub fn solve_program<P: OfflineProgram + ?Sized>(
    program: &P,
    set: &FeasibleSet,
    x0: &DVector<f64>,
    tol: f64,
) -> Result<OfflineSolution> {
    if !(tol > 0.0) {
        return Err(OcoError::InvalidArgument(format!("comparator tolerance must be positive, got {tol}")));
    }
    if program.dim() != set.dim() {
        return Err(OcoError::DimensionMismatch { expected: set.dim(), got: program.dim() });
    }
    let m = program.num_constraints();
    let project = |v: &DVector<f64>| set.project_unchecked(v);
    let inner_cfg = InnerSolverConfig { tol: 0.1 * tol, max_iters: INNER_MAX_ITERS };

    let mut x = set.project(x0)?;
    let mut mu = vec![0.0; m];
    let mut in_working = vec![false; m];
    let mut working: Vec<usize> = Vec::new();
    let all: Vec<usize> = (0..m).collect();
    let mut values = program.constraint_values(&all, &x);
    admit_violated(&values, &mut in_working, &mut working);
    let mut rho = INITIAL_PENALTY;
    let mut last_measure = f64::INFINITY;
    let mut residual;

    for outer in 1..=MAX_OUTER {
        // inner solve on the working set, repeated until no excluded constraint is violated
        loop {
            let al = AugmentedLagrangian { program, working: &working, mu: &mu, rho };
            let out = inner::minimize(&al, project, &x, al.lipschitz_hint(&x), &inner_cfg)?;
            x = out.x;
            residual = out.residual;
            values = program.constraint_values(&all, &x);
            if !admit_violated(&values, &mut in_working, &mut working) {
                break;
            }
        }

        let mut measure = 0.0_f64;
        for &j in &working {
            measure = measure.max((-values[j]).min(mu[j] / rho).abs());
            mu[j] = (mu[j] + rho * values[j]).max(0.0);
        }
        let max_violation = values.iter().cloned().fold(0.0, f64::max);
        if measure <= tol && max_violation <= tol {
            return Ok(OfflineSolution {
                objective: program.objective(&x),
                x,
                max_violation,
                residual,
                outer_iters: outer,
            });
        }
        if measure > 0.5 * last_measure {
            rho *= 10.0;
            if rho > MAX_PENALTY {
                return Err(OcoError::Infeasible(format!(
                    "penalty reached {rho:e} with constraint residual {measure:e}"
                )));
            }
        }
        last_measure = measure;
    }
    Err(OcoError::Convergence { iters: MAX_OUTER, residual: last_measure })
}

/// Euclidean projection onto `{||x||_1 <= a} ∩ {||x||_inf <= bound}`.
///
/// The projection is `sign(p_i) clamp(|p_i| - theta, 0, bound)` with the smallest
/// `theta >= 0` meeting the l1 budget; the budget is piecewise linear in `theta`, so theta
/// is found exactly between sorted breakpoints.
pub fn project_l1_box(point: &DVector<f64>, a: f64, bound: f64) -> DVector<f64> {
    let shrink = |theta: f64| point.map(|v| v.signum() * (v.abs() - theta).clamp(0.0, bound));
    let mass = |theta: f64| point.iter().map(|v| (v.abs() - theta).clamp(0.0, bound)).sum::<f64>();
    if mass(0.0) <= a {
        return point.map(|v| v.clamp(-bound, bound));
    }
    if a <= 0.0 {
        return DVector::zeros(point.len());
    }
    let mut breaks: Vec<f64> = point
        .iter()
        .flat_map(|v| [v.abs(), v.abs() - bound])
        .filter(|&b| b > 0.0)
        .collect();
    breaks.push(0.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    // mass is nonincreasing; find consecutive breakpoints bracketing a
    let mut lo = 0.0;
    let mut mass_lo = mass(0.0);
    for &b in &breaks[1..] {
        let mass_b = mass(b);
        if mass_b <= a {
            let theta = lo + (b - lo) * (mass_lo - a) / (mass_lo - mass_b);
            return shrink(theta);
        }
        lo = b;
        mass_lo = mass_b;
    }
    DVector::zeros(point.len())
}

/// `(1/T) sum_t f_t(x)` for the NRA losses with aggregated weights.
fn nra_program(data: &NraData, horizon: usize) -> QcqpProgram {
    let n = data.dim();
    let mut weights = DVector::zeros(n);
    for t in 0..horizon {
        weights += data.loss_weights(t);
    }
    let h = DMatrix::from_diagonal(&(weights * (2.0 / horizon as f64)));
    let b_max = {
        let mut out = data.offsets[0].clone();
        for b in &data.offsets[1..horizon] {
            out.zip_apply(b, |o, v| *o = o.max(v));
        }
        out
    };
    let constraints = (0..data.incidence.nrows())
        .map(|i| QuadConstraint::new(None, data.incidence.row(i).transpose(), b_max[i]))
        .collect();
    QcqpProgram::new(h, DVector::zeros(n), constraints)
}

fn oqcqp_program(data: &OqcqpData, horizon: usize) -> QcqpProgram {
    let n = data.dim;
    let mut h = DMatrix::zeros(n, n);
    let mut c = DVector::zeros(n);
    for t in 0..horizon {
        h += &data.a[t];
        c += &data.b[t];
    }
    let scale = 1.0 / horizon as f64;
    let mut constraints = Vec::with_capacity(horizon * data.num_constraints());
    for t in 0..horizon {
        for i in 0..data.num_constraints() {
            constraints.push(QuadConstraint::new(Some(data.c[t][i].clone()), data.d[t][i].clone(), data.e[t][i]));
        }
    }
    QcqpProgram::new(h * scale, c * scale, constraints)
}

struct OlrObjective<'a> {
    data: &'a OlrData,
    rounds: &'a [SharedOracle],
}

impl SmoothObjective for OlrObjective<'_> {
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.rounds.iter().map(|r| r.loss(x)).sum::<f64>() / self.rounds.len() as f64
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.data.dim);
        for r in self.rounds {
            g += r.loss_subgradient(x);
        }
        g / self.rounds.len() as f64
    }
}

fn solve_olr(problem: &ProblemInstance, data: &OlrData, tol: f64) -> Result<DVector<f64>> {
    let budget = data.min_threshold();
    let bound = data.bound;
    let obj = OlrObjective { data, rounds: &problem.rounds };
    let curvature = problem
        .rounds
        .iter()
        .map(|r| r.loss_curvature().unwrap_or(1.0))
        .sum::<f64>()
        / problem.horizon() as f64;
    let cfg = InnerSolverConfig { tol, max_iters: INNER_MAX_ITERS };
    let out = inner::minimize(
        &obj,
        |v| project_l1_box(v, budget, bound),
        &DVector::zeros(data.dim),
        curvature,
        &cfg,
    )?;
    Ok(out.x)
}

/// Best fixed decision of `problem`, exploiting the structure of the generated problems.
///
/// NRA reduces to one box-constrained QP with the componentwise-maximal offsets, OLR to a
/// projected-gradient solve over the l1/l-inf intersection, and OQCQP to the general loop
/// with the quadratic objective aggregated. Hand-built problems use the general loop directly.
pub fn solve_comparator(problem: &ProblemInstance, tol: f64) -> Result<DVector<f64>> {
    let horizon = problem.horizon();
    let start = problem.constants.slater_point.clone();
    match &problem.structure {
        Structure::Nra(data) => Ok(solve_program(&nra_program(data, horizon), &problem.set, &start, tol)?.x),
        Structure::Olr(data) => solve_olr(problem, data, tol),
        Structure::Oqcqp(data) => Ok(solve_program(&oqcqp_program(data, horizon), &problem.set, &start, tol)?.x),
        Structure::Generic => solve_comparator_general(problem, tol),
    }
}

/// Best fixed decision computed from the round oracles alone, with every round's constraints.
pub fn solve_comparator_general(problem: &ProblemInstance, tol: f64) -> Result<DVector<f64>> {
    let program = RoundsProgram::new(problem.rounds.clone())?;
    Ok(solve_program(&program, &problem.set, &problem.constants.slater_point, tol)?.x)
}

/// `sum_t f_t(x)`.
pub fn total_loss(problem: &ProblemInstance, x: &DVector<f64>) -> f64 {
    problem.rounds.iter().map(|r| r.loss(x)).sum()
}

/// `max_{t, i} g_t^{(i)}(x)`.
pub fn max_constraint(problem: &ProblemInstance, x: &DVector<f64>) -> f64 {
    problem
        .rounds
        .iter()
        .map(|r| r.constraints(x).max())
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{FnOracle, ProblemConstants};
    use nalgebra::dvector;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn constants(slater: DVector<f64>) -> ProblemConstants {
        ProblemConstants {
            diameter: 1.0,
            kappa_f: 1.0,
            kappa_g: 1.0,
            nu_g_plain: 1.0,
            nu_g_linearized: 1.0,
            eps0: 1.0,
            slater_point: slater,
        }
    }

    #[test]
    fn unconstrained_optimum_is_kept() {
        let c = dvector![0.3, -0.2];
        let cc = c.clone();
        let cg = c.clone();
        let o = FnOracle::new(
            0,
            2,
            1,
            move |x| (x - &cc).norm_squared(),
            move |x| (x - &cg) * 2.0,
            |x| dvector![x.norm_squared() - 1.0],
            |x, _| x * 2.0,
        );
        let set = FeasibleSet::euclidean_ball(2.0, 2).unwrap();
        let p = ProblemInstance::custom(set, vec![Arc::new(o)], constants(dvector![0.0, 0.0])).unwrap();
        let x = solve_comparator(&p, 1e-9).unwrap();
        assert!((x - c).norm() < 1e-8);
    }

    #[test]
    fn boundary_optimum_in_one_dimension() {
        let rounds: Vec<SharedOracle> = (0..5)
            .map(|t| {
                Arc::new(
                    FnOracle::new(
                        t,
                        1,
                        1,
                        |x| (x[0] - 2.0).powi(2),
                        |x| dvector![2.0 * (x[0] - 2.0)],
                        |x| dvector![x[0] - 1.0],
                        |_, _| dvector![1.0],
                    )
                    .affine_constraints(true),
                ) as SharedOracle
            })
            .collect();
        let set = FeasibleSet::new_box(dvector![-2.0], dvector![2.0]).unwrap();
        let p = ProblemInstance::custom(set, rounds, constants(dvector![0.0])).unwrap();
        let x = solve_comparator(&p, 1e-10).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-9, "{}", x[0]);
    }

    #[test]
    fn infeasible_program_is_reported() {
        let o = FnOracle::new(0, 1, 1, |x| x[0] * x[0], |x| dvector![2.0 * x[0]], |x| dvector![5.0 - x[0]], |_, _| dvector![-1.0])
            .affine_constraints(true);
        let set = FeasibleSet::new_box(dvector![-1.0], dvector![1.0]).unwrap();
        let p = ProblemInstance::custom(set, vec![Arc::new(o)], constants(dvector![0.0])).unwrap();
        assert!(matches!(solve_comparator(&p, 1e-7), Err(OcoError::Infeasible(_))));
    }

    #[test]
    fn l1_box_projection_examples() {
        let p = dvector![0.1, -0.2, 0.3];
        assert_eq!(project_l1_box(&p, 1.0, 1.0), p);
        let q = project_l1_box(&dvector![2.0, 0.0], 1.0, 1e6);
        assert!((q - dvector![1.0, 0.0]).norm() < 1e-15);
        // box binds on one coordinate, l1 on the rest
        let r = project_l1_box(&dvector![5.0, 1.0, -1.0], 1.6, 1.0);
        assert!((r.lp_norm(1) - 1.6).abs() < 1e-12);
        assert!(r.amax() <= 1.0);
    }

    fn brute_force_l1_box(p: &DVector<f64>, a: f64, m: f64) -> DVector<f64> {
        // coarse grid followed by compass refinement inside the set
        let step = 0.05;
        let k = (m / step).round() as i64;
        let n = p.len();
        let mut best = DVector::zeros(n);
        let mut best_d = (p - &best).norm_squared();
        let mut idx = vec![-k; n];
        loop {
            let x = DVector::from_iterator(n, idx.iter().map(|&i| i as f64 * step));
            if x.lp_norm(1) <= a + 1e-12 {
                let d = (p - &x).norm_squared();
                if d < best_d {
                    best_d = d;
                    best = x;
                }
            }
            let mut c = 0;
            loop {
                if c == n {
                    return refine(p, best, a, m);
                }
                idx[c] += 1;
                if idx[c] > k {
                    idx[c] = -k;
                    c += 1;
                } else {
                    break;
                }
            }
        }
    }

    fn refine(p: &DVector<f64>, mut x: DVector<f64>, a: f64, m: f64) -> DVector<f64> {
        let n = p.len();
        let mut h = 0.05;
        let inside = |y: &DVector<f64>| y.lp_norm(1) <= a + 1e-12 && y.amax() <= m + 1e-12;
        while h > 1e-6 {
            let mut improved = false;
            for i in 0..n {
                for j in 0..n {
                    for (si, sj) in [(1.0, 0.0), (-1.0, 0.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        let mut y = x.clone();
                        y[i] += si * h;
                        if i != j {
                            y[j] += sj * h;
                        }
                        if inside(&y) && (p - &y).norm_squared() < (p - &x).norm_squared() {
                            x = y;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
        x
    }

    #[test]
    fn l1_box_projection_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..4 {
            let p = DVector::from_fn(5, |_, _| rng.random_range(-1.5..1.5));
            let exact = project_l1_box(&p, 1.0, 0.6);
            let brute = brute_force_l1_box(&p, 1.0, 0.6);
            assert!((&exact - &brute).norm() < 1e-3, "{exact} vs {brute}");
            assert!((p.clone() - &exact).norm() <= (p - &brute).norm() + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn l1_box_projection_is_feasible_and_idempotent(
            v in proptest::collection::vec(-5.0f64..5.0, 1..8),
            a in 0.0f64..4.0,
            m in 0.1f64..3.0,
        ) {
            let p = DVector::from_vec(v);
            let x = project_l1_box(&p, a, m);
            prop_assert!(x.lp_norm(1) <= a + 1e-9);
            prop_assert!(x.amax() <= m + 1e-12);
            let y = project_l1_box(&x, a, m);
            prop_assert!((x.clone() - y).norm() <= 1e-9);
            // variational inequality against random feasible points
            let z = project_l1_box(&p.map(|c| c * 0.37 - 0.1), a, m);
            prop_assert!((&p - &x).dot(&(z - &x)) <= 1e-9);
        }
    }
}
