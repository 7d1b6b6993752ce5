//! Error type of the numerical oracle.

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum OracleError {
    #[error("Newton iteration diverged after {iterations} iterations (last residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },
    #[error("truncation N = {n} is insufficient: doubling it moves the first harmonic by {change:e}")]
    TruncationInsufficient { n: usize, change: f64 },
    #[error("Newton converged to the trivial state: no stripe at these parameters")]
    NoStripe,
    #[error("dense eigensolver did not converge (matrix size {0})")]
    EigensolveFailure(usize),
    #[error("singular Jacobian in Newton step {0}")]
    SingularJacobian(usize),
    #[error("critical eigenvalue matching is ambiguous at ε = {eps}: gap {gap:e} < 10 × matching distance {distance:e}")]
    MatchingFailure { eps: f64, gap: f64, distance: f64 },
    #[error("q calibration is ambiguous: observed orders {orders:?} for γ = {gammas:?}")]
    CalibrationAmbiguous { gammas: Vec<f64>, orders: Vec<f64> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Core(#[from] stripelab_core::Error),
}

pub type Result<T, E = OracleError> = core::result::Result<T, E>;
