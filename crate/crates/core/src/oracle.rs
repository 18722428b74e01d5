//! Per-round first-order oracles and the problem-level constants used by the theory checks.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::models::ModelKind;
use crate::sets::FeasibleSet;

/// The action `x_t`.
pub type Decision = DVector<f64>;
/// A nonnegative dual vector `lambda_t`.
pub type Multiplier = DVector<f64>;

/// Loss and constraint functions revealed after round `t`.
///
/// Subgradients returned at nondifferentiable points must be valid; the generators
/// return the zero element of the subdifferential of `|.|` at zero.
pub trait RoundOracle: Send + Sync + fmt::Debug {
    fn round(&self) -> usize;
    fn dim(&self) -> usize;
    fn num_constraints(&self) -> usize;

    fn loss(&self, x: &DVector<f64>) -> f64;
    fn loss_subgradient(&self, x: &DVector<f64>) -> DVector<f64>;
    fn constraints(&self, x: &DVector<f64>) -> DVector<f64>;
    fn constraint_subgradient(&self, x: &DVector<f64>, i: usize) -> DVector<f64>;

    /// `sum_i w_i * grad g_i(x)`, i.e. `J(x) w` with the Jacobian stored column-wise.
    fn constraint_jacobian_mul(&self, x: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        for (i, &wi) in w.iter().enumerate() {
            if wi != 0.0 {
                out.axpy(wi, &self.constraint_subgradient(x, i), 1.0);
            }
        }
        out
    }

    /// True when every `g_t^{(i)}` is affine.
    fn constraints_affine(&self) -> bool {
        false
    }

    /// True when `f_t` and every `g_t^{(i)}` have Lipschitz gradients.
    fn is_smooth(&self) -> bool {
        true
    }

    /// A strong-convexity modulus of `f_t` (zero when none is known).
    fn strong_convexity(&self) -> f64 {
        0.0
    }

    /// Upper bound on the Lipschitz constant of `grad f_t`, if known.
    fn loss_curvature(&self) -> Option<f64> {
        None
    }

    /// Upper bound on the Lipschitz constant of `grad g_t^{(i)}` (zero for affine constraints).
    fn constraint_curvature(&self, _i: usize) -> f64 {
        0.0
    }
}

pub type SharedOracle = Arc<dyn RoundOracle>;

type ScalarFn = Box<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;
type VectorFn = Box<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
type IndexedVectorFn = Box<dyn Fn(&DVector<f64>, usize) -> DVector<f64> + Send + Sync>;

/// A round oracle assembled from closures, for hand-built instances.
pub struct FnOracle {
    pub t: usize,
    pub n: usize,
    pub p: usize,
    f: ScalarFn,
    df: VectorFn,
    g: VectorFn,
    dg: IndexedVectorFn,
    pub affine: bool,
    pub smooth: bool,
    pub iota: f64,
}

impl FnOracle {
    pub fn new(
        t: usize,
        n: usize,
        p: usize,
        f: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
        df: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        g: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        dg: impl Fn(&DVector<f64>, usize) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        FnOracle {
            t,
            n,
            p,
            f: Box::new(f),
            df: Box::new(df),
            g: Box::new(g),
            dg: Box::new(dg),
            affine: false,
            smooth: true,
            iota: 0.0,
        }
    }

    pub fn affine_constraints(mut self, affine: bool) -> Self {
        self.affine = affine;
        self
    }

    pub fn smooth(mut self, smooth: bool) -> Self {
        self.smooth = smooth;
        self
    }

    pub fn with_strong_convexity(mut self, iota: f64) -> Self {
        self.iota = iota;
        self
    }
}

impl fmt::Debug for FnOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnOracle")
            .field("t", &self.t)
            .field("n", &self.n)
            .field("p", &self.p)
            .finish_non_exhaustive()
    }
}

impl RoundOracle for FnOracle {
    fn round(&self) -> usize {
        self.t
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn num_constraints(&self) -> usize {
        self.p
    }
    fn loss(&self, x: &DVector<f64>) -> f64 {
        (self.f)(x)
    }
    fn loss_subgradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.df)(x)
    }
    fn constraints(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.g)(x)
    }
    fn constraint_subgradient(&self, x: &DVector<f64>, i: usize) -> DVector<f64> {
        (self.dg)(x, i)
    }
    fn constraints_affine(&self) -> bool {
        self.affine
    }
    fn is_smooth(&self) -> bool {
        self.smooth
    }
    fn strong_convexity(&self) -> f64 {
        self.iota
    }
}

/// Bounds from the standing assumptions, supplied per generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConstants {
    /// Diameter of the action set.
    pub diameter: f64,
    /// Bound on loss subgradient norms over the set.
    pub kappa_f: f64,
    /// Bound on every constraint subgradient norm over the set.
    pub kappa_g: f64,
    /// Bound on `||G(y)||` for the plain model.
    pub nu_g_plain: f64,
    /// Bound on `||G(y)||` for the linearized constraint model (shared by the
    /// linearized, quadratic-linearized and truncated models).
    pub nu_g_linearized: f64,
    /// Slater margin: `g_t(slater_point) <= -eps0` for every round.
    pub eps0: f64,
    pub slater_point: DVector<f64>,
}

impl ProblemConstants {
    pub fn nu_g(&self, kind: ModelKind) -> f64 {
        match kind {
            ModelKind::Plain => self.nu_g_plain,
            _ => self.nu_g_linearized,
        }
    }
}

/// Randomized convexity and subgradient-inequality check of one oracle on `set`.
///
/// Returns a description of the first failure found.
pub fn spot_check_oracle<R: Rng>(
    oracle: &dyn RoundOracle,
    set: &FeasibleSet,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<(), String> {
    for _ in 0..samples {
        let x = random_point(set, rng);
        let y = random_point(set, rng);
        let mid = (&x + &y) * 0.5;
        let fx = oracle.loss(&x);
        let fy = oracle.loss(&y);
        let scale = 1.0 + fx.abs().max(fy.abs());
        if oracle.loss(&mid) > 0.5 * (fx + fy) + tol * scale {
            return Err(format!("loss not midpoint convex at round {}", oracle.round()));
        }
        let u = oracle.loss_subgradient(&x);
        if fy < fx + u.dot(&(&y - &x)) - tol * scale {
            return Err(format!("invalid loss subgradient at round {}", oracle.round()));
        }
        let gx = oracle.constraints(&x);
        let gy = oracle.constraints(&y);
        let gm = oracle.constraints(&mid);
        for i in 0..oracle.num_constraints() {
            let scale = 1.0 + gx[i].abs().max(gy[i].abs());
            if gm[i] > 0.5 * (gx[i] + gy[i]) + tol * scale {
                return Err(format!("constraint {i} not midpoint convex at round {}", oracle.round()));
            }
            let v = oracle.constraint_subgradient(&x, i);
            if gy[i] < gx[i] + v.dot(&(&y - &x)) - tol * scale {
                return Err(format!("invalid subgradient of constraint {i} at round {}", oracle.round()));
            }
        }
    }
    Ok(())
}

/// A random point of `set` (not uniform; mixes interior and boundary points).
pub fn random_point<R: Rng>(set: &FeasibleSet, rng: &mut R) -> DVector<f64> {
    let n = set.dim();
    match set {
        FeasibleSet::Box { lower, upper } => DVector::from_iterator(
            n,
            lower.iter().zip(upper.iter()).map(|(&l, &u)| l + (u - l) * rng.random::<f64>()),
        ),
        FeasibleSet::EuclideanBall { radius, .. } => {
            let dir: DVector<f64> = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let norm: f64 = dir.norm().max(1e-300);
            dir * (radius * rng.random::<f64>().sqrt() / norm)
        }
        FeasibleSet::SupNormBall { bound, .. } => {
            DVector::from_fn(n, |_, _| rng.random_range(-*bound..*bound))
        }
    }
}
