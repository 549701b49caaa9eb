//! Numerical laboratory for one-dimensional random homogenization with
//! long-range-dependent potentials: exact fBm/fGn synthesis, Hermite chaos
//! calculus, Green operators for the perturbed elliptic problem, and
//! Hermite-process limit sampling.
//!
//! All numerics are generic over [`Scalar`] (f32/f64); the experiment
//! pipeline and its stated tolerances assume the [`Real`] = f64 aliases
//! below.

pub mod chaos;
pub mod error;
pub mod gaussian;
pub mod green;
pub mod hermite_process;
pub mod io;
pub mod kernel;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod slowly_varying;
pub mod solver;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// The precision the experiment pipeline runs at.
pub type Real = f64;

pub type GaussianPath64 = gaussian::GaussianPath<Real>;
pub type ChaosExpansion64 = chaos::ChaosExpansion<Real>;
pub type PotentialSpec64 = chaos::PotentialSpec<Real>;
pub type OperatorSpec64 = green::OperatorSpec<Real>;
pub type GreenMatrix64 = green::GreenMatrix<Real>;
pub type FluctuationSample64 = solver::FluctuationSample<Real>;
pub type HermitePath64 = hermite_process::HermitePath<Real>;
pub type SlowlyVarying64 = slowly_varying::SlowlyVarying<Real>;
