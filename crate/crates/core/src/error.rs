use thiserror::Error;

/// Errors produced by the model and the reference propagator.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The particle energy is not below the barrier, so no evanescent
    /// solution exists (E >= U).
    #[error("not evanescent: U = {barrier} must exceed E = {energy}")]
    NotEvanescent { energy: f64, barrier: f64 },

    /// The overlap-matrix denominator X_kk X_jj - X_kj X_jk is too close
    /// to zero for the Rabi frequencies to be meaningful.
    #[error("singular overlap matrix: |D| = {determinant:.3e} below tolerance")]
    SingularOverlap { determinant: f64 },

    /// A rectangular-only evaluator was called on a multi-segment barrier.
    #[error("unsupported barrier: operation requires a single rectangular segment")]
    UnsupportedBarrier,

    /// The stop-the-flow time is undefined without a perturbation (omega0 = 0).
    #[error("no perturbation: tunnelling time undefined for omega0 = 0")]
    NoPerturbation,

    /// The dispersion profile is non-positive somewhere on the barrier.
    #[error("invalid dispersion: {0}")]
    InvalidDispersion(String),

    /// The measured energy does not sit below the incident energy.
    #[error("invalid measurement: E_meas = {measured} must be below E_inc = {incident}")]
    InvalidMeasurement { incident: f64, measured: f64 },

    /// Adaptive quadrature hit its subdivision cap before converging.
    /// The partial estimate and its error estimate are attached.
    #[error("quadrature failed to converge: value = {partial:.6e}, error = {error_estimate:.3e}")]
    ConvergenceFailure { partial: f64, error_estimate: f64 },

    /// The initial wave packet is not negligible at the grid edges.
    #[error("grid too small: packet amplitude at edge is {edge_fraction:.3e} of peak")]
    GridTooSmall { edge_fraction: f64 },

    /// The propagator produced a non-finite value.
    #[error("numerical blowup at step {step}")]
    NumericalBlowup { step: usize },

    /// Transmission was requested while a significant fraction of the norm
    /// is still inside the barrier.
    #[error("premature measurement: in-barrier norm = {in_barrier_norm:.3e} >= 1%")]
    PrematureMeasurement { in_barrier_norm: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
