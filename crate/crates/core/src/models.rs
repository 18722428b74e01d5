//! Conservative models of the revealed loss and constraints.
//!
//! Every model is a convex minorant of the true function that touches it at the
//! anchor point. The constraint part of all non-plain models is the tangent plane.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{OcoError, Result};
use crate::oracle::SharedOracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Plain,
    Linearized,
    /// Tangent plane plus `iota/2 ||x - anchor||^2`; `iota` is taken from the oracle.
    QuadraticLinearized,
    /// `[tangent plane]_+`; needs a nonnegative loss.
    Truncated,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Plain,
        ModelKind::Linearized,
        ModelKind::QuadraticLinearized,
        ModelKind::Truncated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Plain => "plain",
            ModelKind::Linearized => "linearized",
            ModelKind::QuadraticLinearized => "quadratic-linearized",
            ModelKind::Truncated => "truncated",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = OcoError;
    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| OcoError::Config(format!("unknown model kind '{s}'")))
    }
}

/// How the loss part of a model is represented.
#[derive(Debug, Clone)]
enum LossModel {
    Exact,
    /// `f(anchor) + <u, x - anchor> + iota/2 ||x - anchor||^2`, truncated at zero when `truncated`.
    Tangent { value: f64, grad: DVector<f64>, iota: f64, truncated: bool },
}

#[derive(Debug, Clone)]
enum ConstraintModel {
    Exact,
    /// Columns of `jac` are the constraint subgradients at the anchor.
    Tangent { values: DVector<f64>, jac: DMatrix<f64> },
}

/// A model pair `(F, G)` of round `t` anchored at a reference decision.
#[derive(Debug, Clone)]
pub struct ModelAt {
    kind: ModelKind,
    anchor: DVector<f64>,
    oracle: SharedOracle,
    loss: LossModel,
    cons: ConstraintModel,
    nu_g: f64,
}

fn tangent_constraints(oracle: &SharedOracle, anchor: &DVector<f64>) -> ConstraintModel {
    let p = oracle.num_constraints();
    let values = oracle.constraints(anchor);
    let mut jac = DMatrix::zeros(anchor.len(), p);
    for i in 0..p {
        jac.set_column(i, &oracle.constraint_subgradient(anchor, i));
    }
    ConstraintModel::Tangent { values, jac }
}

fn tangent(oracle: &SharedOracle, anchor: &DVector<f64>, iota: f64, truncated: bool) -> LossModel {
    LossModel::Tangent {
        value: oracle.loss(anchor),
        grad: oracle.loss_subgradient(anchor),
        iota,
        truncated,
    }
}

/// `F(x) = f(x_t) + <u_t, x - x_t>`, `G(x) = g(x_t) + J^T (x - x_t)`.
pub fn build_linearized(oracle: &SharedOracle, anchor: &DVector<f64>) -> ModelAt {
    ModelAt {
        kind: ModelKind::Linearized,
        anchor: anchor.clone(),
        oracle: oracle.clone(),
        loss: tangent(oracle, anchor, 0.0, false),
        cons: tangent_constraints(oracle, anchor),
        nu_g: f64::INFINITY,
    }
}

/// Linearized model with an extra `iota/2 ||x - x_t||^2` on the loss.
pub fn build_quadratic_linearized(
    oracle: &SharedOracle,
    anchor: &DVector<f64>,
    iota: f64,
) -> Result<ModelAt> {
    if !(iota >= 0.0) || !iota.is_finite() {
        return Err(OcoError::InvalidArgument(format!(
            "strong convexity modulus must be finite and >= 0, got {iota}"
        )));
    }
    Ok(ModelAt {
        kind: ModelKind::QuadraticLinearized,
        anchor: anchor.clone(),
        oracle: oracle.clone(),
        loss: tangent(oracle, anchor, iota, false),
        cons: tangent_constraints(oracle, anchor),
        nu_g: f64::INFINITY,
    })
}

/// `F(x) = [f(x_t) + <u_t, x - x_t>]_+`; conservative only for nonnegative losses.
pub fn build_truncated(oracle: &SharedOracle, anchor: &DVector<f64>) -> ModelAt {
    ModelAt {
        kind: ModelKind::Truncated,
        anchor: anchor.clone(),
        oracle: oracle.clone(),
        loss: tangent(oracle, anchor, 0.0, true),
        cons: tangent_constraints(oracle, anchor),
        nu_g: f64::INFINITY,
    }
}

/// `F = f`, `G = g`. The anchor is kept only for bookkeeping.
pub fn build_plain(oracle: &SharedOracle, anchor: &DVector<f64>) -> ModelAt {
    ModelAt {
        kind: ModelKind::Plain,
        anchor: anchor.clone(),
        oracle: oracle.clone(),
        loss: LossModel::Exact,
        cons: ConstraintModel::Exact,
        nu_g: f64::INFINITY,
    }
}

/// Builds the model of the requested kind; the quadratic model takes `iota` from the oracle.
pub fn build(kind: ModelKind, oracle: &SharedOracle, anchor: &DVector<f64>) -> Result<ModelAt> {
    Ok(match kind {
        ModelKind::Plain => build_plain(oracle, anchor),
        ModelKind::Linearized => build_linearized(oracle, anchor),
        ModelKind::QuadraticLinearized => {
            build_quadratic_linearized(oracle, anchor, oracle.strong_convexity())?
        }
        ModelKind::Truncated => build_truncated(oracle, anchor),
    })
}

impl ModelAt {
    pub fn with_nu_g(mut self, nu_g: f64) -> Self {
        self.nu_g = nu_g;
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn anchor(&self) -> &DVector<f64> {
        &self.anchor
    }

    pub fn oracle(&self) -> &SharedOracle {
        &self.oracle
    }

    pub fn nu_g(&self) -> f64 {
        self.nu_g
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.oracle.num_constraints()
    }

    pub fn iota(&self) -> f64 {
        match &self.loss {
            LossModel::Tangent { iota, .. } => *iota,
            LossModel::Exact => 0.0,
        }
    }

    /// Value of the untruncated tangent model of the loss (the truncated model's inner part).
    pub(crate) fn loss_tangent(&self, x: &DVector<f64>) -> Option<(f64, &DVector<f64>)> {
        match &self.loss {
            LossModel::Tangent { value, grad, iota, .. } => {
                let d = x - &self.anchor;
                Some((value + grad.dot(&d) + 0.5 * iota * d.norm_squared(), grad))
            }
            LossModel::Exact => None,
        }
    }

    pub fn eval_f(&self, x: &DVector<f64>) -> f64 {
        match &self.loss {
            LossModel::Exact => self.oracle.loss(x),
            LossModel::Tangent { truncated, .. } => {
                let (v, _) = self.loss_tangent(x).expect("tangent model");
                if *truncated {
                    v.max(0.0)
                } else {
                    v
                }
            }
        }
    }

    /// A subgradient of `F` at `x`; the truncated model returns zero on the flat part.
    pub fn subgrad_f(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.loss {
            LossModel::Exact => self.oracle.loss_subgradient(x),
            LossModel::Tangent { value, grad, iota, truncated } => {
                let d = x - &self.anchor;
                if *truncated && value + grad.dot(&d) + 0.5 * iota * d.norm_squared() <= 0.0 {
                    return DVector::zeros(x.len());
                }
                grad + d * *iota
            }
        }
    }

    pub fn eval_g(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.cons {
            ConstraintModel::Exact => self.oracle.constraints(x),
            ConstraintModel::Tangent { values, jac } => values + jac.tr_mul(&(x - &self.anchor)),
        }
    }

    pub fn subgrad_g(&self, x: &DVector<f64>, i: usize) -> DVector<f64> {
        match &self.cons {
            ConstraintModel::Exact => self.oracle.constraint_subgradient(x, i),
            ConstraintModel::Tangent { jac, .. } => jac.column(i).into_owned(),
        }
    }

    /// `sum_i w_i * subgrad_g(x, i)`.
    pub fn jacobian_mul(&self, x: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        match &self.cons {
            ConstraintModel::Exact => self.oracle.constraint_jacobian_mul(x, w),
            ConstraintModel::Tangent { jac, .. } => jac * w,
        }
    }

    /// Whether `F` and `G` are differentiable with Lipschitz gradients.
    pub fn is_smooth(&self) -> bool {
        match (&self.loss, &self.cons) {
            (LossModel::Tangent { truncated: true, .. }, _) => false,
            (LossModel::Exact, _) | (_, ConstraintModel::Exact) => self.oracle.is_smooth(),
            _ => true,
        }
    }

    pub fn is_truncated(&self) -> bool {
        matches!(self.loss, LossModel::Tangent { truncated: true, .. })
    }

    /// Rough upper bound on the curvature of `F`.
    pub(crate) fn loss_curvature(&self) -> f64 {
        match &self.loss {
            LossModel::Exact => self.oracle.loss_curvature().unwrap_or(0.0),
            LossModel::Tangent { iota, .. } => *iota,
        }
    }

    /// Column matrix of constraint gradients at `x` (exact for tangent models).
    pub(crate) fn constraint_gradients(&self, x: &DVector<f64>) -> DMatrix<f64> {
        match &self.cons {
            ConstraintModel::Tangent { jac, .. } => jac.clone(),
            ConstraintModel::Exact => {
                let p = self.num_constraints();
                let mut jac = DMatrix::zeros(x.len(), p);
                for i in 0..p {
                    jac.set_column(i, &self.oracle.constraint_subgradient(x, i));
                }
                jac
            }
        }
    }

    pub(crate) fn constraint_curvature(&self, i: usize) -> f64 {
        match &self.cons {
            ConstraintModel::Exact => self.oracle.constraint_curvature(i),
            ConstraintModel::Tangent { .. } => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FnOracle;
    use nalgebra::dvector;
    use std::sync::Arc;

    fn square() -> SharedOracle {
        // f(x) = x^2, g(x) = x - 1
        Arc::new(FnOracle::new(
            0,
            1,
            1,
            |x| x[0] * x[0],
            |x| dvector![2.0 * x[0]],
            |x| dvector![x[0] - 1.0],
            |_, _| dvector![1.0],
        ))
    }

    fn l1_ball() -> SharedOracle {
        // f(x) = 0, g(x) = ||x||_1 - 2 with the zero subgradient at kinks
        Arc::new(
            FnOracle::new(
                0,
                2,
                1,
                |_| 0.0,
                |x| DVector::zeros(x.len()),
                |x| dvector![x.lp_norm(1) - 2.0],
                |x, _| x.map(|v| if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 }),
            )
            .smooth(false),
        )
    }

    #[test]
    fn linearized_is_tangent_line() {
        let m = build_linearized(&square(), &dvector![1.0]);
        for x in [-3.0, 0.0, 1.0, 2.5] {
            let xv = dvector![x];
            assert!((m.eval_f(&xv) - (1.0 + 2.0 * (x - 1.0))).abs() < 1e-15);
            assert!(m.eval_f(&xv) <= x * x + 1e-15);
        }
        assert_eq!(m.eval_f(&dvector![1.0]), 1.0);
    }

    #[test]
    fn zero_subgradient_at_kink_gives_constant_model() {
        let m = build_linearized(&l1_ball(), &dvector![0.0, 0.0]);
        for x in [dvector![1.0, -3.0], dvector![0.2, 0.1], dvector![-5.0, 5.0]] {
            assert_eq!(m.eval_g(&x)[0], -2.0);
        }
    }

    #[test]
    fn quadratic_model_recovers_square() {
        let o = square();
        let m = build_quadratic_linearized(&o, &dvector![1.0], 2.0).unwrap();
        for x in [-2.0, 0.3, 1.0, 4.0] {
            assert!((m.eval_f(&dvector![x]) - x * x).abs() < 1e-12);
        }
        let m0 = build_quadratic_linearized(&o, &dvector![1.0], 0.0).unwrap();
        let lin = build_linearized(&o, &dvector![1.0]);
        for x in [-2.0, 0.3, 4.0] {
            assert_eq!(m0.eval_f(&dvector![x]), lin.eval_f(&dvector![x]));
            assert_eq!(m0.eval_g(&dvector![x]), lin.eval_g(&dvector![x]));
        }
        assert!(build_quadratic_linearized(&o, &dvector![1.0], -1.0).is_err());
    }

    #[test]
    fn truncated_hinges_at_zero() {
        // f(x) = x^2 anchored at 1: tangent 2x - 1
        let m = build_truncated(&square(), &dvector![1.0]);
        assert_eq!(m.eval_f(&dvector![-1.0]), 0.0); // tangent value -3
        assert_eq!(m.eval_f(&dvector![3.0]), 5.0);
        let lin = build_linearized(&square(), &dvector![1.0]);
        for x in [-2.0, 0.0, 0.5, 2.0] {
            let xv = dvector![x];
            assert!(m.eval_f(&xv) >= lin.eval_f(&xv));
            assert!(m.eval_f(&xv) <= x * x);
        }
        assert!(!m.is_smooth());
    }

    #[test]
    fn plain_is_identity() {
        let o = square();
        let m = build_plain(&o, &dvector![0.0]);
        for x in [-2.0, 0.3, 4.0] {
            let xv = dvector![x];
            assert_eq!(m.eval_f(&xv), o.loss(&xv));
            assert_eq!(m.eval_g(&xv)[0], o.constraints(&xv)[0]);
        }
    }

    #[test]
    fn model_kind_parses() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert!("affine".parse::<ModelKind>().is_err());
    }
}
