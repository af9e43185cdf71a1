//! Spherical-ensemble sampling, Sobolev worst-case errors and cap
//! discrepancies on the two-sphere, and the explicit concentration bounds
//! that go with them.

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod samplers;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::{Configuration, PlanarPoint, UnitPoint};
pub use rng::RngStream;
