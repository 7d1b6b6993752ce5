//! Error type shared by the analytic layers.

use thiserror::Error;

/// Which Turing condition failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TuringCondition {
    /// The homogeneous state is stable at zero wavenumber (`tr L < 0`, `det L > 0`).
    StableAtZero,
    /// The neutral set is exactly the circle `|k| = kc` (double root in `s = |k|²`).
    CriticalCircle,
    /// The critical root is simple (`∂_λ d ≠ 0`).
    SimpleRoot,
}

/// The auxiliary operators that must be invertible for the quadratic coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuxOperator {
    /// `L` (zero-wavenumber harmonic).
    L,
    /// `−2kc²D + L` (square-lattice mixed harmonic).
    TwoKc,
    /// `−4kc²D + L` (second harmonic).
    FourKc,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    #[error("diffusion coefficients must be positive (got d1 = {d1}, d2 = {d2})")]
    NonPositiveDiffusion { d1: f64, d2: f64 },
    #[error("symmetrization changed a tensor on the diagonal (internal error)")]
    AsymmetricTensorBeyondSymmetrization,
    #[error("polynomial and tensor inputs disagree: {0}")]
    InconsistentPolynomialTensor(String),
    #[error("system is incomplete: {0}")]
    Incomplete(&'static str),
    #[error("no Turing wavenumber: d1·a4 + d2·a1 = {0} ≤ 0")]
    NoTuringWavenumber(f64),
    #[error("Turing condition {which:?} failed (witness {witness})")]
    ConditionFailed { which: TuringCondition, witness: f64 },
    #[error("kernel chart is degenerate (b1 = {b1}, b1 + b4 = {b1_plus_b4})")]
    DegenerateKernelChart { b1: f64, b1_plus_b4: f64 },
    #[error("λ_M vanishes: the unfolding parameter does not move the critical eigenvalue")]
    LambdaMZero,
    #[error("λ_ββ = {0} is not positive")]
    NonPositiveLambdaBetaBeta(f64),
    #[error("right-hand side is not in the range (⟨rhs, E0*⟩ = {0})")]
    RhsNotInRange(f64),
    #[error("auxiliary operator {0:?} is singular")]
    SingularAuxiliaryOperator(AuxOperator),
    #[error("ρ_nl = {0} ≥ 0: the bifurcation is not supercritical")]
    SupercriticalityViolated(f64),
    #[error("amplitude A′ = {given} deviates from the on-branch value {expected}")]
    InconsistentAmplitude { given: f64, expected: f64 },
    #[error("no stripe exists at these parameters")]
    NoStripe,
    #[error("θ = {0} is outside (0, 1]")]
    ThetaOutOfRange(f64),
    #[error("grid has {cells} cells, above the cap of {cap}")]
    GridTooFine { cells: u64, cap: u64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
