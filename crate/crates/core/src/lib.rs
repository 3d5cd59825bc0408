//! Desk-scale numerical laboratory for stochastic evolution equations driven
//! by additive pure-jump Levy noise, `dX = A(X) dt + dL`.
//!
//! The crate is organized around six concerns:
//!
//! * [`grid`] — states on a uniform 1-D Dirichlet grid and the discrete sine basis;
//! * [`levy`] — symmetric jump measures, compound-Poisson schedules, and the
//!   large/small jump split above an inner cutoff;
//! * [`operators`] — the singular p-Laplace and fast diffusion drifts with their
//!   Gelfand-triple norm suites and structural condition checkers;
//! * [`integrator`] — jump-adapted adaptive Euler evolution of the deterministic,
//!   truncated, and full equations, plus synchronously coupled pairs;
//! * [`assumptions`] — Monte Carlo verifiers for the structural hypotheses
//!   (noise symmetry, deterministic decay, small-jump convergence, local
//!   boundedness, e-property);
//! * [`ergodicity`] — accessibility-to-zero estimation, occupation measures,
//!   1-D Wasserstein comparison, and the Lyapunov moment diagnostic.

pub mod assumptions;
pub mod ergodicity;
pub mod error;
pub mod grid;
pub mod integrator;
pub mod levy;
pub mod operators;
pub mod rng;
pub mod stats;

pub use error::CoreError;
pub use grid::GridFunction;
pub use integrator::{SimConfig, TrajectoryPath, Truncation};
pub use levy::{Band, JumpSchedule, LevyNoiseModel, NoiseKind, OneDimMeasure, TailMoment};
pub use operators::{DriftKind, DriftOperator, HKind, NormSuite, VKind};
pub use rng::RngStream;
