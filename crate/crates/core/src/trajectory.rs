use nalgebra::DVector;

/// Output of one online run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub algo: String,
    pub tau: usize,
    /// The `T` played decisions `x_0 .. x_{T-1}`.
    pub decisions: Vec<DVector<f64>>,
    /// Every multiplier produced, starting at `lambda_0`; may run past `T` when `tau > 0`.
    pub multipliers: Option<Vec<DVector<f64>>>,
}

impl Trajectory {
    pub fn new(
        algo: impl Into<String>,
        tau: usize,
        decisions: Vec<DVector<f64>>,
        multipliers: Option<Vec<DVector<f64>>>,
    ) -> Self {
        Trajectory {
            algo: algo.into(),
            tau,
            decisions,
            multipliers,
        }
    }

    pub fn horizon(&self) -> usize {
        self.decisions.len()
    }

    /// `||lambda_t||` for every stored multiplier.
    pub fn multiplier_norms(&self) -> Option<Vec<f64>> {
        self.multipliers
            .as_ref()
            .map(|ms| ms.iter().map(|m| m.norm()).collect())
    }
}
