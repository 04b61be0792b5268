//! Normal holonomy of spacelike submanifolds in pseudo-Euclidean space.

pub mod error;
pub mod field;
pub mod linalg;
pub mod pseudo_euclidean;
pub mod lie;
pub mod curvature;
pub mod spectral;
pub mod holonomy;
pub mod bbi;
pub mod geometry;
pub mod report;

pub use error::{Error, Result};
pub use field::{Field, Q, R64};
