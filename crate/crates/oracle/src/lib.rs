//! Brute-force numerical oracle for stripe stability.
//!
//! Stripes are computed by Newton iteration on a Fourier–Galerkin
//! discretization in the comoving frame ([`stripe`]); their linearization is
//! assembled on Fourier lattices and Bloch spaces and solved densely
//! ([`spectrum`]). [`asymptotics`] compares the critical eigenvalues with the
//! closed-form centre-manifold blocks, and [`klausmeier`] runs parameter scans
//! of the extended Klausmeier vegetation model.

pub mod asymptotics;
pub mod dense;
pub mod error;
pub mod klausmeier;
pub mod spectrum;
pub mod stripe;

pub use error::{OracleError, Result};
pub use spectrum::{
    bloch_spectrum, lattice_linearization, lattice_linearization_blocks, sideband_curvatures, LatticeKind,
    LatticeSpec, SidebandCurvatures, SpectrumResult,
};
pub use stripe::{solve_stripe_1d, solve_stripe_with, Coupling, SolveOptions, StripeGuess, StripeSolution};
pub use asymptotics::{
    calibrate_q_convention, compare_asymptotics, Calibration, ConvergenceReport, EpsRecord, OracleSettings, Scenario,
    ScenarioLattice,
};
pub use klausmeier::{
    klausmeier_scan, rhombic_crossing, CellRecord, CellStatus, EllSweep, KlausmeierParams, KlausmeierScan, Peak,
    RhombicCrossing, ScanSettings,
};
