#![allow(dead_code)]

use constrained_oco::problems::NraData;
use nalgebra::{DMatrix, DVector};

/// The reduced NRA program: `min sum_e w_e x_e^2` over `0 <= x <= upper`, `A x + b <= 0`.
/// Built from the raw generated data rather than from the round oracles.
pub struct ReducedNra {
    pub weights: DVector<f64>,
    pub upper: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl ReducedNra {
    pub fn new(data: &NraData, horizon: usize) -> Self {
        let edges = data.num_edges();
        let n = data.dim();
        let weights = DVector::from_fn(n, |e, _| {
            if e < edges {
                horizon as f64 * data.bandwidth_cost[e]
            } else {
                (0..horizon).map(|t| data.prices[t][e - edges]).sum()
            }
        });
        let rows = data.incidence.nrows();
        let b = DVector::from_fn(rows, |i, _| {
            (0..horizon).map(|t| data.offsets[t][i]).fold(f64::NEG_INFINITY, f64::max)
        });
        ReducedNra { weights, upper: data.upper.clone(), a: data.incidence.clone(), b }
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        x.iter().zip(self.weights.iter()).map(|(v, w)| w * v * v).sum()
    }

    /// Minimizer of the Lagrangian at multiplier `y`.
    pub fn primal(&self, y: &DVector<f64>) -> DVector<f64> {
        let aty = self.a.transpose() * y;
        DVector::from_fn(self.weights.len(), |e, _| {
            (-aty[e] / (2.0 * self.weights[e])).clamp(0.0, self.upper[e])
        })
    }

    pub fn dual_value(&self, y: &DVector<f64>) -> f64 {
        let x = self.primal(y);
        self.objective(&x) + y.dot(&(&self.a * &x + &self.b))
    }

    /// Accelerated projected gradient ascent on the concave dual over `y >= 0`.
    /// Returns the best dual value found, a certified lower bound on the optimum.
    pub fn solve_dual(&self, iters: usize) -> (f64, DVector<f64>) {
        let wmin = self.weights.min();
        let lip = self.a.norm_squared() / (2.0 * wmin);
        let m = self.b.len();
        let mut y = DVector::zeros(m);
        let mut z = y.clone();
        let mut k = 1.0_f64;
        let mut best = (self.dual_value(&y), y.clone());
        for _ in 0..iters {
            let grad = &self.a * self.primal(&z) + &self.b;
            let next = (&z + grad / lip).map(|v| v.max(0.0));
            let value = self.dual_value(&next);
            if value > best.0 {
                best = (value, next.clone());
            }
            let k_next = 0.5 * (1.0 + (1.0 + 4.0 * k * k).sqrt());
            // restart when the step turns against the dual increase
            if value < self.dual_value(&y) {
                k = 1.0;
                z = y.clone();
                continue;
            }
            z = &next + (&next - &y) * ((k - 1.0) / k_next);
            y = next;
            k = k_next;
        }
        best
    }
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
