//! Analytic model of one-dimensional quantum tunnelling under a
//! time-dependent measurement perturbation.
//!
//! The library assembles boundary-matched evanescent waves inside a
//! piecewise-constant barrier, the overlap and transition matrices
//! coupling the transmitted and reflected components, the oscillating
//! in-barrier probability density with its envelope, and four
//! tunnelling-time estimators. An independent Crank-Nicolson propagator
//! for the time-dependent Schrodinger equation cross-validates the
//! stationary limits.
//!
//! All quantities are in natural units with hbar = 1.

pub mod coupling;
pub mod density;
pub mod error;
pub mod model;
pub mod numerics;
pub mod scenario;
pub mod stationary;
pub mod tdse;
pub mod times;

pub use error::{Error, Result};
pub use model::{BarrierSpec, EnergyPair, Particle, PerturbationSpec, Segment};
pub use scenario::{density_solution, solve, AnalyticSolution};
