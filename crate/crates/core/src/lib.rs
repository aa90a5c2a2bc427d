//! Identification of distribution-network admittance matrices from noisy
//! voltage and current phasor samples.

pub mod covariance;
pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod grid_model;
pub mod io;
pub mod linalg;
pub mod scenario;

pub use error::{Error, Result};
