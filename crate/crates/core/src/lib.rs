//! Finite-N correlation kernels, Monte Carlo samplers and scaling limits for
//! the classical minor processes (GUE minors, LUE rank-one chains, corank-one
//! projections of Gaussian, Laguerre and Jacobi ensembles), together with the
//! lattice (RSK / last passage) side and a set of independent numerical oracles.

pub mod error;
pub mod kernel;
pub mod linalg;
pub mod logval;
pub mod orthopoly;
pub mod quad;
pub mod rsklab;
pub mod samplers;
pub mod scaling;
pub mod stats;
pub mod validate;

pub use error::{Error, Result};
pub use kernel::{ProcessSpec, SpeciesPoint};
pub use orthopoly::{EnsembleKind, EnsembleSpec, ShiftedFamily};
