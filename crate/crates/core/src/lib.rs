//! Leading-order stability of stripes near a Turing instability in planar
//! two-component reaction–diffusion–advection systems.
//!
//! The pipeline is
//! [`SystemSpec`] → [`System`] → [`TuringData`] → [`CoefficientSet`] →
//! lattice blocks ([`lattice_blocks`]) and closed-form boundaries
//! ([`boundaries`]).
//!
//! The exact parts of the linear analysis are generic over [`Scalar`]
//! (including [`num_rational::Rational64`]); everything needing square roots is
//! generic over [`Real`]. Concrete aliases for `f64` and rationals are
//! provided at the crate root.

pub mod boundaries;
pub mod coefficients;
pub mod error;
pub mod lattice_blocks;
pub mod linalg;
pub mod model_core;
pub mod presets;
pub mod scalar;
pub mod tensor;

pub use boundaries::{DiagramGrid, Leading, Plane, PointParams, RegionLabel, ThresholdSet};
pub use coefficients::{CoefficientSet, StripeAsymptotic, StripeParams};
pub use error::{Error, Result};
pub use lattice_blocks::{LatticeBlock, OmegaParam};
pub use linalg::{Mat2, Vec2};
pub use model_core::{HomMode, LinearRates, System, SystemSpec, TuringData, TuringReport};
pub use scalar::{Real, Scalar};
pub use tensor::{CubicForm, QuadForm, ReactionPoly};

use num_rational::Rational64;

pub type System64 = System<f64>;
pub type SystemSpec64 = SystemSpec<f64>;
pub type TuringData64 = TuringData<f64>;
pub type CoefficientSet64 = CoefficientSet<f64>;
pub type LatticeBlock64 = LatticeBlock<f64>;
pub type Leading64 = Leading<f64>;
pub type DiagramGrid64 = DiagramGrid<f64>;

/// Exact-arithmetic system.
pub type SystemQ = System<Rational64>;
pub type SystemSpecQ = SystemSpec<Rational64>;
pub type LinearRatesQ = LinearRates<Rational64>;
