//! Monte Carlo simulation of dynamic systems driven by continuous random
//! disturbances modeled as Ito processes.
//!
//! The crate provides two routes from a disturbance model to response
//! statistics:
//!
//! * the traditional route: Euler-Maruyama sample paths of the stochastic
//!   differential equation, one response evaluation per path;
//! * the fast route: a spectral expansion of the driving Wiener process turns
//!   the SDE into a random ordinary differential equation whose randomness is
//!   a short vector of coefficients, sampled by Latin hypercube with optional
//!   rank decorrelation.
//!
//! Supporting modules cover model identification from measured time series,
//! a reduced-order grid frequency response model, and a simulation engine
//! that estimates response statistics and compares the convergence of the
//! two routes.

pub mod engine;
pub mod error;
pub mod identify;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod response;
pub mod rng;
pub mod sampling;
pub mod sde;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{
    make_preset, stationary_moments, stationary_pdf, wind_model, BoundaryPolicy, DiffusionExpr,
    DiffusionMap, DistributionPreset, ItoModel, PresetKind,
};
pub use poly::{Polynomial, PolynomialMap, Term};
pub use sde::{PathOrigin, PathSet, TimeGrid, Trajectory};
