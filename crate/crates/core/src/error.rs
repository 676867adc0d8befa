//! Error types shared across the crate.

use thiserror::Error;

/// Unified error type for all library operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A state or operator does not fit inside the truncated Fock space.
    #[error("truncation unsafe: {0}")]
    Truncation(String),

    /// Two objects with different Fock dimensions were combined.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// No finite stationary amplitude exists (above the multistability
    /// threshold only the origin remains).
    #[error("no finite stationary point: 9G^2 - 8U*Delta = {discriminant} < 0")]
    NoFiniteStationaryPoint { discriminant: f64 },

    /// An operator violates the sparsity structure required by a
    /// sector-blocked routine.
    #[error("operator support violates Z3 sector structure at ({row}, {col})")]
    Structure { row: usize, col: usize },

    /// Gap data passed to an exponential fit contained non-positive entries.
    #[error("non-positive gap at index {0}")]
    NonPositiveGap(usize),

    /// The quadratic-fluctuation frame is parametrically unstable
    /// (|2 lambda / omega| >= 1), so no squeezing transformation exists.
    #[error("unstable Gaussian frame: |tanh 2r| argument = {ratio}")]
    Instability { ratio: f64 },

    /// A quadrature grid is too coarse or too narrow for the requested
    /// accuracy.
    #[error("quadrature grid inadequate: {0}")]
    Quadrature(String),

    /// Cat-state overlap too large for the logical-operator construction.
    #[error("weak well separation: |<zeta_k|zeta_k+1>| = {overlap} >= {limit}")]
    WeakSeparation { overlap: f64, limit: f64 },

    /// A 3x3 matrix fails the density-matrix requirements.
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    /// Adaptive integrator step collapsed below the hard floor.
    #[error("step size collapsed to {step} at t = {t}")]
    Stiffness { t: f64, step: f64 },

    /// The Liouvillian null space is (numerically) more than one-dimensional.
    #[error("degenerate steady state: {nullity} null directions (tol {tol})")]
    DegenerateSteadyState { nullity: usize, tol: f64 },

    /// Ground/excited manifolds could not be separated cleanly.
    #[error("manifold identification failed: {0}")]
    ManifoldIdentification(String),

    /// A time series never crosses its 1/e threshold.
    #[error("no 1/e crossing within the sampled window")]
    NoCrossing,

    /// Catch-all for numerical contract violations (trace drift, dual-route
    /// disagreement, eigensolver failure).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn dim_mismatch(left: usize, right: usize) -> Self {
        Error::DimensionMismatch { left, right }
    }
}
