//! Bayesian estimation of sparse precision matrices (Gaussian graphical
//! models) under a Dirichlet-Laplace shrinkage prior, via a block Gibbs
//! sampler with exact column conditionals.
//!
//! The crate is generic over the floating-point scalar through the
//! [`Scalar`] trait; the `f64` aliases below are what the CLI and file
//! formats use.

pub mod diagnostics;
pub mod dist;
pub mod edge;
pub mod error;
pub mod gibbs;
pub mod io;
pub mod mat;
pub mod model;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod select;
pub mod special;
pub mod synthetic;
pub mod validate;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use scalar::Scalar;

/// Concrete `f64` aliases for the common types.
pub type SymMatrix64 = mat::SymMatrix<f64>;
pub type PrecisionMatrix64 = mat::PrecisionMatrix<f64>;
pub type ScatterMatrix64 = mat::ScatterMatrix<f64>;
pub type Matrix64 = mat::Matrix<f64>;
pub type HyperParams64 = model::HyperParams<f64>;
pub type ModelState64 = model::ModelState<f64>;
pub type ChainConfig64 = gibbs::ChainConfig<f64>;
pub type PosteriorSamples64 = gibbs::PosteriorSamples<f64>;
pub type InclusionMatrix64 = select::InclusionMatrix<f64>;
