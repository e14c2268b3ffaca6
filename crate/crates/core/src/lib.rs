//! Approximating a hidden vector from linear measurements, with adaptive
//! (multi-round) and non-adaptive schemes, cost accounting, and an
//! experiment harness.

pub mod adaptive;
pub mod discover;
pub mod error;
pub mod harness;
pub mod hashing;
pub mod nonadaptive;
pub mod numeric;
pub mod oracle;
pub mod precondition;
pub mod rng;
pub mod spotting;

pub use error::{Error, Result};
pub use oracle::{LinearFunctional, MeasurementOracle, Stage, Vector};
pub use rng::RngStream;
