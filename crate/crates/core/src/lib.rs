//! Exact computations with BFV complexes of coisotropic submanifolds.
//!
//! The crate works over polynomial Poisson structures on a trivial vector
//! bundle `E = ℝˢ × ℝᵉ → ℝˢ` whose zero section `S = {y = 0}` is
//! coisotropic. It provides:
//!
//! * [`graded`]: Koszul signs, shuffles and décalage signs;
//! * [`superpoly`]: free graded-commutative polynomial algebras;
//! * [`oddsymplectic`]: multivector fields as functions on a shifted
//!   cotangent bundle, the Schouten–Nijenhuis bracket, horizontal lifts and
//!   the Rothstein lift;
//! * [`linfty`]: L∞[1]-algebras, Jacobiators, Maurer–Cartan residuals and
//!   morphism defects;
//! * [`voronov`]: V-algebras and higher derived brackets;
//! * [`treetransfer`]: decorated trees and homotopy transfer;
//! * [`bfv`]: the BFV complex, its charge, and Maurer–Cartan theory of
//!   coisotropic sections.
//!
//! All arithmetic is exact. The structures are generic over a
//! [`Scalar`](scalar::Scalar) field; the aliases below fix the rationals.

pub mod bfv;
pub mod error;
pub mod graded;
pub mod linalg;
pub mod linfty;
pub mod oddsymplectic;
pub mod random;
pub mod scalar;
pub mod superpoly;
pub mod treetransfer;
pub mod voronov;

pub use error::{Error, Result};

/// Exact arbitrary-precision rationals, the coefficient field of the crate.
pub type Rational = num_rational::BigRational;

/// Polynomials with rational coefficients.
pub type Poly = superpoly::SuperPoly<Rational>;
