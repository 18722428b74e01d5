//! Regret, constraint violation and the multiplier bound.

use nalgebra::DVector;

use crate::error::{OcoError, Result};
use crate::models::ModelKind;
use crate::oracle::ProblemConstants;
use crate::problems::ProblemInstance;
use crate::trajectory::Trajectory;

/// `Reg(t) = sum_{s < t} f_s(x_s) - f_s(x*)` for `t = 1..T`.
pub fn regret_series(trajectory: &Trajectory, problem: &ProblemInstance, x_star: &DVector<f64>) -> Vec<f64> {
    let mut total = 0.0;
    trajectory
        .decisions
        .iter()
        .zip(&problem.rounds)
        .map(|(x, r)| {
            total += r.loss(x) - r.loss(x_star);
            total
        })
        .collect()
}

/// Cumulative violation per constraint and the dynamic violation `||[sum g_s(x_s)]_+||`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationSeries {
    /// `cumulative[t-1][i] = sum_{s < t} g_s^{(i)}(x_s)`.
    pub cumulative: Vec<DVector<f64>>,
    pub dynamic: Vec<f64>,
}

pub fn violation_series(trajectory: &Trajectory, problem: &ProblemInstance) -> ViolationSeries {
    let mut total = DVector::zeros(problem.num_constraints());
    let mut cumulative = Vec::with_capacity(trajectory.horizon());
    let mut dynamic = Vec::with_capacity(trajectory.horizon());
    for (x, r) in trajectory.decisions.iter().zip(&problem.rounds) {
        total += r.constraints(x);
        dynamic.push(dynamic_violation(&total));
        cumulative.push(total.clone());
    }
    ViolationSeries { cumulative, dynamic }
}

/// `||[v]_+||`.
pub fn dynamic_violation(cumulative: &DVector<f64>) -> f64 {
    cumulative.iter().map(|v| v.max(0.0).powi(2)).sum::<f64>().sqrt()
}

/// Per-round performance series of one run, indexed by `t = 1..T`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsSeries {
    pub cum_regret: Vec<f64>,
    pub cum_violation: Vec<DVector<f64>>,
    /// `||lambda_{t-1}||`, the multiplier held when `x_{t-1}` was played.
    pub lambda_norm: Option<Vec<f64>>,
}

impl MetricsSeries {
    pub fn compute(trajectory: &Trajectory, problem: &ProblemInstance, x_star: &DVector<f64>) -> Self {
        let horizon = trajectory.horizon();
        let lambda_norm = trajectory.multiplier_norms().map(|mut n| {
            n.truncate(horizon);
            n
        });
        MetricsSeries {
            cum_regret: regret_series(trajectory, problem, x_star),
            cum_violation: violation_series(trajectory, problem).cumulative,
            lambda_norm,
        }
    }

    pub fn horizon(&self) -> usize {
        self.cum_regret.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.cum_violation.first().map_or(0, |v| v.len())
    }

    /// `Reg(t) / t`, with `t` one-based.
    pub fn avg_regret(&self, t: usize) -> f64 {
        self.cum_regret[t - 1] / t as f64
    }

    /// `max_i Vio^{(i)}(t) / t`, with `t` one-based.
    pub fn max_avg_violation(&self, t: usize) -> f64 {
        self.cum_violation[t - 1].max() / t as f64
    }

    pub fn final_regret(&self) -> f64 {
        *self.cum_regret.last().expect("nonempty series")
    }

    pub fn dynamic_violation(&self, t: usize) -> f64 {
        dynamic_violation(&self.cum_violation[t - 1])
    }
}

/// The constants `kappa_0 .. kappa_3` of the multiplier bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappas {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl Kappas {
    pub fn new(constants: &ProblemConstants, model: ModelKind) -> Result<Self> {
        Self::from_parts(constants.diameter, constants.kappa_f, constants.nu_g(model), constants.eps0)
    }

    pub fn from_parts(diameter: f64, kappa_f: f64, nu_g: f64, eps0: f64) -> Result<Self> {
        if !(eps0 > 0.0) {
            return Err(OcoError::InvalidArgument(format!("Slater margin must be positive, got {eps0}")));
        }
        let k2 = nu_g * nu_g / eps0 - nu_g;
        if k2 < 0.0 {
            return Err(OcoError::InvalidArgument(format!(
                "inconsistent constants: nu_g = {nu_g} is below the Slater margin {eps0}"
            )));
        }
        let r = nu_g * nu_g / eps0;
        Ok(Kappas {
            k0: 4.0 * kappa_f * diameter / eps0,
            k1: diameter * diameter / eps0,
            k2,
            k3: 2.0 * nu_g + eps0 / 2.0 + 8.0 * r * (32.0 * r / eps0).ln(),
        })
    }

    /// `psi(sigma, alpha, s) = k0 + (tau + 1) k1 alpha / s + k2 sigma + k3 sigma s`.
    pub fn psi(&self, sigma: f64, alpha: f64, tau: usize, s: usize) -> f64 {
        let s = s as f64;
        self.k0 + (tau as f64 + 1.0) * self.k1 * alpha / s + self.k2 * sigma + self.k3 * sigma * s
    }

    /// Smallest `psi` over `s = 1 ..= 2 ceil(sqrt(T (tau + 1)))`, with its minimizer.
    pub fn min_psi(&self, sigma: f64, alpha: f64, tau: usize, horizon: usize) -> (usize, f64) {
        let s_max = 2 * ((horizon as f64 * (tau as f64 + 1.0)).sqrt().ceil() as usize);
        (1..=s_max.max(1))
            .map(|s| (s, self.psi(sigma, alpha, tau, s)))
            .fold((0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
    }
}

pub fn psi_bound(
    constants: &ProblemConstants,
    model: ModelKind,
    sigma: f64,
    alpha: f64,
    tau: usize,
    s: usize,
) -> Result<f64> {
    if s == 0 {
        return Err(OcoError::InvalidArgument("s must be a positive integer".into()));
    }
    Ok(Kappas::new(constants, model)?.psi(sigma, alpha, tau, s))
}

/// `sum_{l < s} (w_{t - tau + l} - w_{t + l + 1})`, the windowed drift difference that is at
/// most `(tau + 1) max w` for nonnegative `w`. Requires `t >= tau` and `t + s < w.len()`.
pub fn delayed_window_gap(w: &[f64], t: usize, tau: usize, s: usize) -> f64 {
    (0..s).map(|l| w[t - tau + l] - w[t + l + 1]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FnOracle;
    use crate::problems::ProblemInstance;
    use crate::sets::FeasibleSet;
    use nalgebra::dvector;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn constants(nu: f64, eps0: f64) -> ProblemConstants {
        ProblemConstants {
            diameter: 1.0,
            kappa_f: 1.0,
            kappa_g: 1.0,
            nu_g_plain: nu,
            nu_g_linearized: nu,
            eps0,
            slater_point: dvector![0.0],
        }
    }

    fn two_round_problem() -> ProblemInstance {
        // f_0 = x, f_1 = -x / 2; g_0 = (1, -1), g_1 = (-3, 2) when evaluated at x = 1
        let r0 = FnOracle::new(0, 1, 2, |x| x[0], |_| dvector![1.0], |x| dvector![x[0], -x[0]], |_, i| dvector![[1.0, -1.0][i]]);
        let r1 = FnOracle::new(1, 1, 2, |x| -0.5 * x[0], |_| dvector![-0.5], |x| dvector![-3.0 * x[0], 2.0 * x[0]], |_, i| dvector![[-3.0, 2.0][i]]);
        let set = FeasibleSet::new_box(dvector![-1.0], dvector![1.0]).unwrap();
        ProblemInstance::custom(set, vec![Arc::new(r0), Arc::new(r1)], constants(1.0, 1.0)).unwrap()
    }

    #[test]
    fn prefix_sums() {
        let p = two_round_problem();
        let traj = Trajectory::new("x", 0, vec![dvector![1.0], dvector![1.0]], None);
        assert_eq!(regret_series(&traj, &p, &dvector![0.0]), vec![1.0, 0.5]);
        let v = violation_series(&traj, &p);
        assert_eq!(v.cumulative, vec![dvector![1.0, -1.0], dvector![-2.0, 1.0]]);
        assert_eq!(v.dynamic, vec![1.0, 1.0]);
    }

    #[test]
    fn regret_vanishes_on_comparator() {
        let p = two_round_problem();
        let x = dvector![0.3];
        let traj = Trajectory::new("x", 0, vec![x.clone(), x.clone()], None);
        assert!(regret_series(&traj, &p, &x).iter().all(|&r| r == 0.0));
    }

    #[test]
    fn psi_with_unit_kappas() {
        let k = Kappas { k0: 1.0, k1: 1.0, k2: 1.0, k3: 1.0 };
        assert_eq!(k.psi(1.0, 1.0, 0, 1), 4.0);
    }

    #[test]
    fn kappa3_natural_log() {
        let k = Kappas::new(&constants(1.0, 1.0), ModelKind::Linearized).unwrap();
        assert!((k.k3 - (2.5 + 8.0 * 32f64.ln())).abs() < 1e-12);
        assert!((k.k3 - 30.2258).abs() < 1e-4);
    }

    #[test]
    fn psi_rejects_bad_constants() {
        assert!(Kappas::new(&constants(1.0, 0.0), ModelKind::Plain).is_err());
        assert!(Kappas::new(&constants(0.5, 1.0), ModelKind::Plain).is_err());
        assert!(psi_bound(&constants(1.0, 1.0), ModelKind::Plain, 1.0, 1.0, 0, 0).is_err());
    }

    #[test]
    fn min_psi_matches_scan() {
        let k = Kappas::new(&constants(3.0, 0.5), ModelKind::Plain).unwrap();
        let (s, v) = k.min_psi(0.05, 20.0, 2, 400);
        assert!((1..=2 * 35).contains(&s));
        for s2 in 1..=70 {
            assert!(v <= k.psi(0.05, 20.0, 2, s2));
        }
    }

    proptest! {
        #[test]
        fn psi_increases_in_alpha(a in 0.01f64..100.0, da in 0.001f64..10.0, sigma in 0.001f64..10.0, s in 1usize..50, tau in 0usize..20) {
            let k = Kappas::new(&constants(2.0, 0.7), ModelKind::Plain).unwrap();
            prop_assert!(k.psi(sigma, a + da, tau, s) > k.psi(sigma, a, tau, s));
        }

        #[test]
        fn window_gap_bounded(w in proptest::collection::vec(0.0f64..10.0, 40..80), tau in 0usize..8, s in 1usize..20, t0 in 0usize..10) {
            let t = t0 + tau;
            prop_assume!(t + s < w.len());
            let max = w.iter().cloned().fold(0.0, f64::max);
            prop_assert!(delayed_window_gap(&w, t, tau, s) <= (tau as f64 + 1.0) * max + 1e-9);
        }
    }
}
