//! Online logistic regression with a time-varying l1 budget on a sup-norm ball.

use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;

use super::{substream, uniform_vector, ProblemInstance, ProblemParams, Structure};
use crate::error::{OcoError, Result};
use crate::oracle::{ProblemConstants, RoundOracle};
use crate::sets::FeasibleSet;

const FEATURE_STREAM: u64 = 1;
const LABEL_STREAM: u64 = 2;
const THRESHOLD_STREAM: u64 = 3;

#[derive(Debug, Clone)]
pub struct OlrData {
    pub dim: usize,
    pub bound: f64,
    /// `features[t][i]` is `u_{i,t}`.
    pub features: Vec<Vec<DVector<f64>>>,
    /// Labels in `{-1, 1}`.
    pub labels: Vec<Vec<f64>>,
    /// l1 budgets `a_t`.
    pub thresholds: Vec<f64>,
}

impl OlrData {
    pub fn min_threshold(&self) -> f64 {
        self.thresholds.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// `1 / (1 + exp(-z))`.
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn sign0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone)]
pub struct OlrRound {
    pub data: Arc<OlrData>,
    pub t: usize,
}

impl RoundOracle for OlrRound {
    fn round(&self) -> usize {
        self.t
    }
    fn dim(&self) -> usize {
        self.data.dim
    }
    fn num_constraints(&self) -> usize {
        1
    }
    fn loss(&self, x: &DVector<f64>) -> f64 {
        let t = self.t;
        self.data.features[t]
            .iter()
            .zip(&self.data.labels[t])
            .map(|(u, l)| softplus(-l * u.dot(x)))
            .sum()
    }
    fn loss_subgradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let t = self.t;
        let mut g = DVector::zeros(self.data.dim);
        for (u, l) in self.data.features[t].iter().zip(&self.data.labels[t]) {
            g.axpy(-l * sigmoid(-l * u.dot(x)), u, 1.0);
        }
        g
    }
    fn constraints(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_element(1, x.lp_norm(1) - self.data.thresholds[self.t])
    }
    fn constraint_subgradient(&self, x: &DVector<f64>, _i: usize) -> DVector<f64> {
        x.map(sign0)
    }
    fn is_smooth(&self) -> bool {
        false
    }
    fn loss_curvature(&self) -> Option<f64> {
        Some(0.25 * self.data.features[self.t].iter().map(|u| u.norm_squared()).sum::<f64>())
    }
}

/// Generates the logistic-regression problem with `samples` data points per round.
///
/// Features start `~ U[-1, 1]^n` and drift by `U[-1/(2s), 1/(2s)]^n` at step `s = 1, 2, ...`;
/// labels are uniform on `{-1, 1}`; the budget starts at 1 and follows `a_{s+1} = [a_s + zeta_s]_+`
/// with `zeta_s ~ U[-1/(2s), 1/(2s)]`.
pub fn generate_olr(dim: usize, samples: usize, horizon: usize, bound: f64, seed: u64) -> Result<ProblemInstance> {
    if dim == 0 || samples == 0 || horizon == 0 {
        return Err(OcoError::InvalidArgument("olr needs n, k, T >= 1".into()));
    }
    let set = FeasibleSet::sup_norm_ball(bound, dim)?;
    let mut feat_rng = substream(seed, FEATURE_STREAM);
    let mut label_rng = substream(seed, LABEL_STREAM);
    let mut thr_rng = substream(seed, THRESHOLD_STREAM);

    let mut current: Vec<DVector<f64>> = (0..samples).map(|_| uniform_vector(&mut feat_rng, dim, -1.0, 1.0)).collect();
    let mut threshold = 1.0_f64;
    let mut features = Vec::with_capacity(horizon);
    let mut labels = Vec::with_capacity(horizon);
    let mut thresholds = Vec::with_capacity(horizon);
    for round in 0..horizon {
        let step = round + 1;
        features.push(current.clone());
        labels.push(
            (0..samples)
                .map(|_| if label_rng.random_bool(0.5) { 1.0 } else { -1.0 })
                .collect(),
        );
        thresholds.push(threshold);
        let half = 0.5 / step as f64;
        for u in current.iter_mut() {
            *u += uniform_vector(&mut feat_rng, dim, -half, half);
        }
        threshold = (threshold + thr_rng.random_range(-half..half)).max(0.0);
    }

    let data = Arc::new(OlrData { dim, bound, features, labels, thresholds });

    let n = dim as f64;
    let kappa_f = data
        .features
        .iter()
        .map(|us| us.iter().map(|u| u.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let a_max = data.thresholds.iter().cloned().fold(0.0, f64::max);
    let nu_plain = data
        .thresholds
        .iter()
        .map(|&a| (n * bound - a).abs().max(a))
        .fold(0.0, f64::max);
    // tangent of ||x||_1 at any anchor is <sign(anchor), y>, bounded by n * bound
    let nu_lin = n * bound + a_max;
    let constants = ProblemConstants {
        diameter: set.diameter(),
        kappa_f,
        kappa_g: n.sqrt(),
        nu_g_plain: nu_plain,
        nu_g_linearized: nu_lin,
        eps0: data.min_threshold(),
        slater_point: DVector::zeros(dim),
    };

    let rounds = (0..horizon)
        .map(|t| Arc::new(OlrRound { data: data.clone(), t }) as _)
        .collect();
    Ok(ProblemInstance {
        params: ProblemParams::Olr { dim, samples, bound },
        seed,
        set,
        rounds,
        constants,
        structure: Structure::Olr(data),
    })
}
