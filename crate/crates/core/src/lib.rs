//! Spectral simulation of the stochastic 2-D Navier-Stokes alpha-model on the
//! torus `[-pi, pi]^2` and fractal analysis of the level sets of its solutions.
//!
//! * [`spectral`]: lattice bookkeeping, the real Fourier basis and grid transforms.
//! * [`noise`]: noise spectrum and counter-addressed Gaussian streams.
//! * [`linear`]: the exactly solvable linear (Ornstein-Uhlenbeck) problem.
//! * [`galerkin`]: dealiased pseudospectral integrator for the nonlinear problem.
//! * [`fractal`]: level sets, box counting, Frostman measures and lemma oracles.
//! * [`harness`]: configuration, ensembles, manifests and the experiments.

pub mod error;
pub mod fractal;
pub mod galerkin;
pub mod harness;
pub mod linear;
pub mod noise;
pub mod spectral;

pub use error::{Error, Result};
pub use galerkin::{GalerkinSolver, SolverConfig, TrajectoryRecord};
pub use linear::ModelParams;
pub use noise::{NoiseSpec, SeedSpec, StreamKind};
pub use spectral::{GridField, ModeIndexSet, SpectralField, Truncation, WaveVector};

/// Crate version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
