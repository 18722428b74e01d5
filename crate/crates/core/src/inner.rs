//! Accelerated projected gradient for smooth convex objectives over sets with cheap projections.
//!
//! FISTA with backtracking on the Lipschitz estimate, function-value and gradient restarts,
//! and monotone acceptance. Convergence is measured by the unit-step gradient-map residual
//! `||x - P(x - grad(x))||`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{OcoError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerSolverConfig {
    /// Target projected-gradient residual.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for InnerSolverConfig {
    fn default() -> Self {
        InnerSolverConfig {
            tol: 1e-9,
            max_iters: 100_000,
        }
    }
}

impl InnerSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iters == 0 {
            return Err(OcoError::InvalidArgument(format!(
                "inner solver needs tol > 0 and max_iters > 0, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// A differentiable objective.
pub trait SmoothObjective {
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
}

#[derive(Debug, Clone)]
pub struct InnerOutcome {
    pub x: DVector<f64>,
    pub value: f64,
    pub residual: f64,
    pub iters: usize,
}

/// `||x - P(x - g)||`.
pub fn gradient_map_residual<P>(project: &P, x: &DVector<f64>, grad: &DVector<f64>) -> f64
where
    P: Fn(&DVector<f64>) -> DVector<f64>,
{
    (x - project(&(x - grad))).norm()
}

// Relative slack for comparisons that are dominated by rounding near the optimum.
fn slack(v: f64) -> f64 {
    16.0 * f64::EPSILON * (1.0 + v.abs())
}

/// Minimizes `obj` over the set described by `project`, starting from `project(x0)`.
///
/// `lipschitz_hint` seeds the step size; backtracking corrects it in both directions.
pub fn minimize<O, P>(
    obj: &O,
    project: P,
    x0: &DVector<f64>,
    lipschitz_hint: f64,
    cfg: &InnerSolverConfig,
) -> Result<InnerOutcome>
where
    O: SmoothObjective + ?Sized,
    P: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut x = project(x0);
    let mut fx = obj.value(&x);
    let mut gx = obj.gradient(&x);
    if !fx.is_finite() || gx.iter().any(|v| !v.is_finite()) {
        return Err(OcoError::Numeric("non-finite objective at the starting point".into()));
    }
    let mut residual = gradient_map_residual(&project, &x, &gx);
    if residual <= cfg.tol {
        return Ok(InnerOutcome { x, value: fx, residual, iters: 0 });
    }

    let mut lip = if lipschitz_hint.is_finite() && lipschitz_hint > 0.0 {
        lipschitz_hint
    } else {
        1.0
    };
    let mut y = x.clone();
    let mut fy = fx;
    let mut gy = gx.clone();
    let mut momentum = 1.0_f64;

    for iter in 1..=cfg.max_iters {
        // backtracking on the quadratic upper model at y; the gradient form of the test
        // certifies it too and is immune to cancellation in the function values
        let (z, fz, gz) = loop {
            let z = project(&(&y - &gy / lip));
            let d = &z - &y;
            let fz = obj.value(&z);
            let gz = obj.gradient(&z);
            let dd = d.norm_squared();
            let model = fy + gy.dot(&d) + 0.5 * lip * dd;
            if fz <= model + slack(fy) || (&gz - &gy).dot(&d) <= 0.5 * lip * dd {
                break (z, fz, gz);
            }
            lip *= 2.0;
            if !lip.is_finite() || lip > 1e300 {
                return Err(OcoError::Numeric("step size collapsed during backtracking".into()));
            }
        };

        // a certified step from y = x is a descent step; an increase is only rounding
        if fz > fx + slack(fx) && y != x {
            y = x.clone();
            fy = fx;
            gy = gx.clone();
            momentum = 1.0;
            continue;
        }

        let next_momentum = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let step = &z - &x;
        let restart = (&y - &z).dot(&step) > 0.0;
        residual = gradient_map_residual(&project, &z, &gz);
        x = z;
        fx = fz;
        gx = gz;
        if residual <= cfg.tol {
            return Ok(InnerOutcome { x, value: fx, residual, iters: iter });
        }
        if restart {
            momentum = 1.0;
            y = x.clone();
            fy = fx;
            gy = gx.clone();
        } else {
            let beta = (momentum - 1.0) / next_momentum;
            momentum = next_momentum;
            y = &x + step * beta;
            fy = obj.value(&y);
            gy = obj.gradient(&y);
        }
        lip *= 0.9;
    }
    Err(OcoError::Convergence {
        iters: cfg.max_iters,
        residual,
    })
}
