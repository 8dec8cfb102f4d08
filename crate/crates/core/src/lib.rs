//! Numerical toolkit for comb-state continuous-variable codewords produced
//! by conditioned ponderomotive ion-cavity dynamics.
//!
//! The crate is generic over the scalar type through [`scalar::Real`]
//! (implemented for `f32` and `f64`); the aliases at the crate root fix the
//! default double-precision instantiation.

pub mod comb_state;
pub mod dynamics;
pub mod error;
pub mod error_analysis;
pub mod ideal_code;
pub mod numerics;
pub mod physical_limits;
pub mod scalar;
pub mod wavefunction;

pub use error::{Error, Result};
pub use scalar::Real;

/// Default scalar type.
pub type Scalar = f64;
/// Default complex amplitude.
pub type Complex = scalar::C<Scalar>;
/// Double-precision wavefunction.
pub type Wavefunction = wavefunction::Wavefunction<Scalar>;
/// Double-precision encoding parameters.
pub type EncodingParams = dynamics::EncodingParams<Scalar>;
/// Double-precision truncation policy.
pub type TruncationPolicy = numerics::TruncationPolicy<Scalar>;
/// Double-precision spike weights.
pub type NuWeights = comb_state::NuWeights<Scalar>;
/// Double-precision shift-error report.
pub type ErrorReport = error_analysis::ErrorReport<Scalar>;
/// Double-precision sweep outcome.
pub type SweepOutcome = error_analysis::SweepOutcome<Scalar>;
/// Double-precision trap parameters.
pub type PhysicalParams = physical_limits::PhysicalParams<Scalar>;
/// Double-precision realizability report.
pub type LimitsReport = physical_limits::LimitsReport<Scalar>;
