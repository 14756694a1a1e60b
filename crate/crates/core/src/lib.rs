//! Magic-state distillation with the five-qubit code.
//!
//! Bloch-vector geometry, the ideal round map and its attractors, noisy
//! rounds (closed form and full density-matrix simulation) and the expected
//! gate cost of reaching a target fidelity.

pub mod bloch;
pub mod cost;
pub mod densmat;
pub mod error;
pub mod ideal_map;
pub mod noisy;
pub mod roots;

pub use bloch::{BlochVector, MagicBasis, PlaneCoords};
pub use densmat::{DensityMatrix, NoiseParams};
pub use error::{Error, Result};
