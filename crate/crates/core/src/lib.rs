//! Numerical and exact tools for the asymptotics of cusp Kähler metrics in the
//! circle-symmetric radial reduction.

pub mod banded;
pub mod chern;
pub mod elliptic;
pub mod error;
pub mod fitter;
pub mod geometry;
pub mod index_algebra;
pub mod newton;
pub mod parabolic;
pub mod rational;
pub mod terms;

pub use error::{Error, Result};
