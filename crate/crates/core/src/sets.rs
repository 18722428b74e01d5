//! Feasible sets with exact Euclidean projections.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{OcoError, Result};

/// A nonempty compact convex action set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeasibleSet {
    /// `{x : lower <= x <= upper}` componentwise.
    Box { lower: DVector<f64>, upper: DVector<f64> },
    /// `{x in R^dim : ||x||_2 <= radius}`.
    EuclideanBall { radius: f64, dim: usize },
    /// `{x in R^dim : ||x||_inf <= bound}`.
    SupNormBall { bound: f64, dim: usize },
}

impl FeasibleSet {
    pub fn new_box(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(OcoError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| !(l <= u) || !l.is_finite() || !u.is_finite()) {
            return Err(OcoError::InvalidArgument(
                "box bounds must be finite with lower <= upper".into(),
            ));
        }
        Ok(FeasibleSet::Box { lower, upper })
    }

    pub fn euclidean_ball(radius: f64, dim: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(OcoError::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        Ok(FeasibleSet::EuclideanBall { radius, dim })
    }

    pub fn sup_norm_ball(bound: f64, dim: usize) -> Result<Self> {
        if !(bound > 0.0) || !bound.is_finite() {
            return Err(OcoError::InvalidArgument(format!("sup-norm bound must be positive, got {bound}")));
        }
        Ok(FeasibleSet::SupNormBall { bound, dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Box { lower, .. } => lower.len(),
            FeasibleSet::EuclideanBall { dim, .. } | FeasibleSet::SupNormBall { dim, .. } => *dim,
        }
    }

    /// Euclidean diameter of the set.
    pub fn diameter(&self) -> f64 {
        match self {
            FeasibleSet::Box { lower, upper } => (upper - lower).norm(),
            FeasibleSet::EuclideanBall { radius, .. } => 2.0 * radius,
            FeasibleSet::SupNormBall { bound, dim } => 2.0 * bound * (*dim as f64).sqrt(),
        }
    }

    /// Nearest point of the set to `point`.
    pub fn project(&self, point: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(point)?;
        Ok(self.project_unchecked(point))
    }

    pub(crate) fn project_unchecked(&self, point: &DVector<f64>) -> DVector<f64> {
        match self {
            FeasibleSet::Box { lower, upper } => DVector::from_iterator(
                point.len(),
                point
                    .iter()
                    .zip(lower.iter().zip(upper.iter()))
                    .map(|(&v, (&l, &u))| v.clamp(l, u)),
            ),
            FeasibleSet::EuclideanBall { radius, .. } => {
                let norm = point.norm();
                // A rescaled point can land a few ulps outside; keep it so projection stays idempotent.
                if norm <= *radius * (1.0 + 4.0 * f64::EPSILON) {
                    point.clone()
                } else {
                    point * (*radius / norm)
                }
            }
            FeasibleSet::SupNormBall { bound, .. } => point.map(|v| v.clamp(-bound, *bound)),
        }
    }

    /// Membership test with absolute slack `tol`.
    pub fn contains(&self, point: &DVector<f64>, tol: f64) -> bool {
        if point.len() != self.dim() {
            return false;
        }
        match self {
            FeasibleSet::Box { lower, upper } => point
                .iter()
                .zip(lower.iter().zip(upper.iter()))
                .all(|(&v, (&l, &u))| v >= l - tol && v <= u + tol),
            FeasibleSet::EuclideanBall { radius, .. } => point.norm() <= radius + tol,
            FeasibleSet::SupNormBall { bound, .. } => point.amax() <= bound + tol,
        }
    }

    fn check_dim(&self, point: &DVector<f64>) -> Result<()> {
        if point.len() != self.dim() {
            return Err(OcoError::DimensionMismatch {
                expected: self.dim(),
                got: point.len(),
            });
        }
        Ok(())
    }
}

/// Free-function form of [`FeasibleSet::project`].
pub fn project(set: &FeasibleSet, point: &DVector<f64>) -> Result<DVector<f64>> {
    set.project(point)
}

/// Free-function form of [`FeasibleSet::diameter`].
pub fn diameter(set: &FeasibleSet) -> f64 {
    set.diameter()
}
