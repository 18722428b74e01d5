//! Seeded generators for the benchmark problems.

mod nra;
mod olr;
mod oqcqp;

use std::sync::Arc;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{OcoError, Result};
use crate::oracle::{ProblemConstants, SharedOracle};
use crate::sets::FeasibleSet;

pub use nra::{generate_nra, incidence_matrix, NraData, NraRound};
pub use olr::{generate_olr, OlrData, OlrRound};
pub use oqcqp::{generate_oqcqp, OqcqpData, OqcqpRound};

/// Generator parameters, serializable for exact reruns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemParams {
    /// Online network resource allocation with `mapping_nodes` sources and `data_centers` sinks.
    Nra { mapping_nodes: usize, data_centers: usize },
    /// Online logistic regression with an l1 budget.
    Olr { dim: usize, samples: usize, bound: f64 },
    /// Online quadratically constrained quadratic program on a Euclidean ball.
    Oqcqp { dim: usize, constraints: usize, radius: f64 },
    /// Hand-built instance.
    Custom,
}

impl ProblemParams {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemParams::Nra { .. } => "nra",
            ProblemParams::Olr { .. } => "olr",
            ProblemParams::Oqcqp { .. } => "oqcqp",
            ProblemParams::Custom => "custom",
        }
    }

    /// Builds the instance for `horizon` rounds.
    pub fn generate(&self, horizon: usize, seed: u64) -> Result<ProblemInstance> {
        match *self {
            ProblemParams::Nra { mapping_nodes, data_centers } => {
                generate_nra(mapping_nodes, data_centers, horizon, seed)
            }
            ProblemParams::Olr { dim, samples, bound } => generate_olr(dim, samples, horizon, bound, seed),
            ProblemParams::Oqcqp { dim, constraints, radius } => {
                generate_oqcqp(dim, constraints, radius, horizon, seed)
            }
            ProblemParams::Custom => Err(OcoError::InvalidArgument(
                "custom problems cannot be regenerated from parameters".into(),
            )),
        }
    }
}

/// Typed access to the generated data, used by the offline comparator.
#[derive(Debug, Clone)]
pub enum Structure {
    Nra(Arc<NraData>),
    Olr(Arc<OlrData>),
    Oqcqp(Arc<OqcqpData>),
    Generic,
}

/// A feasible set, a stream of round oracles and the constants of the standing assumptions.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub params: ProblemParams,
    pub seed: u64,
    pub set: FeasibleSet,
    pub rounds: Vec<SharedOracle>,
    pub constants: ProblemConstants,
    pub structure: Structure,
}

impl ProblemInstance {
    /// Wraps hand-built rounds. All rounds must share dimension and constraint count.
    pub fn custom(set: FeasibleSet, rounds: Vec<SharedOracle>, constants: ProblemConstants) -> Result<Self> {
        let first = rounds
            .first()
            .ok_or_else(|| OcoError::InvalidArgument("a problem needs at least one round".into()))?;
        let (n, p) = (first.dim(), first.num_constraints());
        if n != set.dim() {
            return Err(OcoError::DimensionMismatch { expected: set.dim(), got: n });
        }
        if rounds.iter().any(|r| r.dim() != n || r.num_constraints() != p) {
            return Err(OcoError::InvalidArgument("rounds disagree on dimensions".into()));
        }
        Ok(ProblemInstance {
            params: ProblemParams::Custom,
            seed: 0,
            set,
            rounds,
            constants,
            structure: Structure::Generic,
        })
    }

    pub fn name(&self) -> &'static str {
        self.params.name()
    }

    pub fn horizon(&self) -> usize {
        self.rounds.len()
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn num_constraints(&self) -> usize {
        self.rounds[0].num_constraints()
    }

    /// Largest `g_t^{(i)}(slater_point)` over all rounds; `<= -eps0` when the constants are valid.
    pub fn worst_slater_value(&self) -> f64 {
        self.rounds
            .iter()
            .map(|r| r.constraints(&self.constants.slater_point).max())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Independent substreams of one seed; each generator draws every quantity from its own stream.
pub(crate) fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn uniform_vector<R: rand::Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(lo..hi))
}
