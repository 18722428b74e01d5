//! Online quadratically constrained quadratic program on a Euclidean ball.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::{substream, uniform_vector, ProblemInstance, ProblemParams, Structure};
use crate::error::{OcoError, Result};
use crate::oracle::{ProblemConstants, RoundOracle};
use crate::psd::{min_eigenvalue, project_psd, spectral_norm_sym};
use crate::sets::FeasibleSet;

const LOSS_MATRIX_STREAM: u64 = 1;
const LOSS_VECTOR_STREAM: u64 = 2;
const SLATER_STREAM: u64 = 3;
const MARGIN_STREAM: u64 = 4;
const CONSTRAINT_MATRIX_STREAM: u64 = 10;
const CONSTRAINT_VECTOR_STREAM: u64 = 100;

const DRIFT: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct OqcqpData {
    pub dim: usize,
    pub radius: f64,
    pub a: Vec<DMatrix<f64>>,
    pub b: Vec<DVector<f64>>,
    /// `c[t][i]` is `C_t^{(i)}`.
    pub c: Vec<Vec<DMatrix<f64>>>,
    pub d: Vec<Vec<DVector<f64>>>,
    pub e: Vec<DVector<f64>>,
    /// Slater margins `h_t^{(i)}`.
    pub h: Vec<DVector<f64>>,
    pub slater_point: DVector<f64>,
    a_min_eig: Vec<f64>,
    a_norm: Vec<f64>,
    c_norm: Vec<Vec<f64>>,
}

impl OqcqpData {
    pub fn num_constraints(&self) -> usize {
        self.c.first().map_or(0, Vec::len)
    }

    pub fn horizon(&self) -> usize {
        self.a.len()
    }
}

#[derive(Debug, Clone)]
pub struct OqcqpRound {
    pub data: Arc<OqcqpData>,
    pub t: usize,
}

impl RoundOracle for OqcqpRound {
    fn round(&self) -> usize {
        self.t
    }
    fn dim(&self) -> usize {
        self.data.dim
    }
    fn num_constraints(&self) -> usize {
        self.data.num_constraints()
    }
    fn loss(&self, x: &DVector<f64>) -> f64 {
        let t = self.t;
        0.5 * x.dot(&(&self.data.a[t] * x)) + self.data.b[t].dot(x)
    }
    fn loss_subgradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.data.a[self.t] * x + &self.data.b[self.t]
    }
    fn constraints(&self, x: &DVector<f64>) -> DVector<f64> {
        let t = self.t;
        DVector::from_fn(self.num_constraints(), |i, _| {
            0.5 * x.dot(&(&self.data.c[t][i] * x)) + self.data.d[t][i].dot(x) + self.data.e[t][i]
        })
    }
    fn constraint_subgradient(&self, x: &DVector<f64>, i: usize) -> DVector<f64> {
        &self.data.c[self.t][i] * x + &self.data.d[self.t][i]
    }
    fn strong_convexity(&self) -> f64 {
        self.data.a_min_eig[self.t].max(0.0)
    }
    fn loss_curvature(&self) -> Option<f64> {
        Some(self.data.a_norm[self.t])
    }
    fn constraint_curvature(&self, i: usize) -> f64 {
        self.data.c_norm[self.t][i]
    }
}

fn symmetric_drift<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let v = rng.random_range(-DRIFT..DRIFT);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// A PSD random walk starting at the identity.
fn psd_walk<R: Rng>(rng: &mut R, n: usize, horizon: usize) -> Result<Vec<DMatrix<f64>>> {
    let mut out = Vec::with_capacity(horizon);
    let mut current = DMatrix::identity(n, n);
    for _ in 0..horizon {
        out.push(current.clone());
        current = project_psd(&(current + symmetric_drift(rng, n)))?;
    }
    Ok(out)
}

fn vector_walk<R: Rng>(rng: &mut R, n: usize, horizon: usize) -> Vec<DVector<f64>> {
    let mut out = Vec::with_capacity(horizon);
    let mut current = uniform_vector(rng, n, -1.0, 1.0);
    for _ in 0..horizon {
        out.push(current.clone());
        current += uniform_vector(rng, n, -DRIFT, DRIFT);
    }
    out
}

/// Generates the QCQP with `constraints` quadratic constraints on the ball of radius `radius`.
///
/// The offsets `e_t^{(i)}` are set so that the fixed point `x_hat` gives
/// `g_t^{(i)}(x_hat) = -h_t^{(i)}` with `h ~ U[0, 1]`.
pub fn generate_oqcqp(
    dim: usize,
    constraints: usize,
    radius: f64,
    horizon: usize,
    seed: u64,
) -> Result<ProblemInstance> {
    if dim == 0 || constraints == 0 || horizon == 0 {
        return Err(OcoError::InvalidArgument("oqcqp needs n, p, T >= 1".into()));
    }
    let set = FeasibleSet::euclidean_ball(radius, dim)?;
    let a = psd_walk(&mut substream(seed, LOSS_MATRIX_STREAM), dim, horizon)?;
    let b = vector_walk(&mut substream(seed, LOSS_VECTOR_STREAM), dim, horizon);
    let s = radius / (dim as f64).sqrt();
    let slater_point = uniform_vector(&mut substream(seed, SLATER_STREAM), dim, -s, s);

    let mut c_by_constraint = Vec::with_capacity(constraints);
    let mut d_by_constraint = Vec::with_capacity(constraints);
    for i in 0..constraints as u64 {
        c_by_constraint.push(psd_walk(&mut substream(seed, CONSTRAINT_MATRIX_STREAM + i), dim, horizon)?);
        d_by_constraint.push(vector_walk(&mut substream(seed, CONSTRAINT_VECTOR_STREAM + i), dim, horizon));
    }
    let mut h_rng = substream(seed, MARGIN_STREAM);
    let h: Vec<DVector<f64>> = (0..horizon)
        .map(|_| DVector::from_fn(constraints, |_, _| h_rng.random::<f64>()))
        .collect();

    let c: Vec<Vec<DMatrix<f64>>> = (0..horizon)
        .map(|t| c_by_constraint.iter().map(|w| w[t].clone()).collect())
        .collect();
    let d: Vec<Vec<DVector<f64>>> = (0..horizon)
        .map(|t| d_by_constraint.iter().map(|w| w[t].clone()).collect())
        .collect();
    let e: Vec<DVector<f64>> = (0..horizon)
        .map(|t| {
            DVector::from_fn(constraints, |i, _| {
                -0.5 * slater_point.dot(&(&c[t][i] * &slater_point)) - d[t][i].dot(&slater_point) - h[t][i]
            })
        })
        .collect();

    let a_min_eig = a.iter().map(min_eigenvalue).collect();
    let a_norm: Vec<f64> = a.iter().map(spectral_norm_sym).collect();
    let c_norm: Vec<Vec<f64>> = c.iter().map(|cs| cs.iter().map(spectral_norm_sym).collect()).collect();

    let r = radius;
    let kappa_f = (0..horizon).map(|t| a_norm[t] * r + b[t].norm()).fold(0.0, f64::max);
    let mut kappa_g = 0.0_f64;
    let mut nu_plain_sq = 0.0_f64;
    let mut nu_lin_sq = 0.0_f64;
    for t in 0..horizon {
        let mut plain_sq = 0.0;
        let mut lin_sq = 0.0;
        for i in 0..constraints {
            let grad_bound = c_norm[t][i] * r + d[t][i].norm();
            kappa_g = kappa_g.max(grad_bound);
            let value_bound = 0.5 * c_norm[t][i] * r * r + d[t][i].norm() * r + e[t][i].abs();
            plain_sq += value_bound * value_bound;
            // tangent at an anchor in the ball, evaluated anywhere in the ball
            let tangent_bound = value_bound + grad_bound * 2.0 * r;
            lin_sq += tangent_bound * tangent_bound;
        }
        nu_plain_sq = nu_plain_sq.max(plain_sq);
        nu_lin_sq = nu_lin_sq.max(lin_sq);
    }
    let eps0 = h.iter().map(|v| v.min()).fold(f64::INFINITY, f64::min);

    let data = Arc::new(OqcqpData {
        dim,
        radius,
        a,
        b,
        c,
        d,
        e,
        h,
        slater_point: slater_point.clone(),
        a_min_eig,
        a_norm,
        c_norm,
    });
    let constants = ProblemConstants {
        diameter: set.diameter(),
        kappa_f,
        kappa_g,
        nu_g_plain: nu_plain_sq.sqrt(),
        nu_g_linearized: nu_lin_sq.sqrt(),
        eps0,
        slater_point,
    };
    let rounds = (0..horizon)
        .map(|t| Arc::new(OqcqpRound { data: data.clone(), t }) as _)
        .collect();
    Ok(ProblemInstance {
        params: ProblemParams::Oqcqp { dim, constraints, radius },
        seed,
        set,
        rounds,
        constants,
        structure: Structure::Oqcqp(data),
    })
}
