//! Quantization on nilpotent Lie groups in exponential coordinates.
//!
//! Berezin–Toeplitz operators, Weyl systems, coherent states, covariant
//! symbols and pseudo-differential operators on the phase space
//! `Ξ = G × g♯` of a connected simply connected nilpotent Lie group, with
//! τ-ordered and magnetic variants and numerical checks of the identities
//! relating them.

pub mod berezin;
pub mod ccr;
pub mod coherent;
pub mod config;
pub mod covariant;
pub mod error;
pub mod experiment;
pub mod lie;
pub mod magnetic;
pub mod numerics;
pub mod pseudodiff;
pub mod report;
pub mod scalar;
pub mod suite;
pub mod symbol;
pub mod tau;

pub use error::{Error, Result};
pub use lie::{pairing, validate_algebra, AlgebraReport, LieAlgebra};
pub use num_complex::Complex64;
pub use numerics::{Domain, Field, Grid, OperatorMatrix, XiGrid};

/// Double-precision algebra, the type used by every quadrature module.
pub type Algebra = LieAlgebra<f64>;
/// Single-precision algebra.
pub type Algebra32 = LieAlgebra<f32>;
/// Exact rational algebra; BCH products are computed without rounding.
pub type RationalAlgebra = LieAlgebra<num_rational::Rational64>;
