//! Online convex optimization with time-varying constraints and delayed feedback.

pub mod baselines;
pub mod error;
pub mod harness;
pub mod inner;
pub mod malm;
pub mod metrics;
pub mod models;
pub mod offline;
pub mod oracle;
pub mod problems;
pub mod psd;
pub mod sets;
pub mod trajectory;

pub use error::{OcoError, Result};
