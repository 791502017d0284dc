//! Isogeometric discretization of the Laplace eigenproblem on the unit
//! interval and cube, with blended Gauss/Lobatto quadratures whose dispersion
//! error is derived and verified in exact rational arithmetic.

pub mod assembly;
pub mod cli;
pub mod dispersion;
pub mod eigensolve;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod mpoly;
pub mod poly;
#[cfg(test)]
mod properties;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod splines;

pub use error::{Error, Result};

/// Exact scalar used for assembly and series coefficients.
pub type Rational = num_rational::BigRational;
/// Double-double scalar used for eigenpair refinement.
pub type DoubleDouble = twofloat::TwoFloat;

pub type Matrix = assembly::BandedSymMatrix<f64>;
pub type ExactMatrix = assembly::BandedSymMatrix<Rational>;
pub type Stencil = assembly::StencilSymbol<f64>;
pub type ExactStencil = assembly::StencilSymbol<Rational>;
pub use series::RationalSeries;
