//! Exact Duistermaat-Heckman measures for torus actions with isolated fixed
//! points, computed as signed sums of polarized cone measures and checked
//! against independent polytope, recurrence, and Monte-Carlo routes.

pub mod cone;
pub mod error;
pub mod linalg;
pub mod measure;
pub mod polytope;
pub mod sampling;
pub mod toric;
pub mod truncated_power;
pub mod weights;

pub use error::{Error, Result};
