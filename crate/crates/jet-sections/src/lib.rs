//! Exact symbolic computation of determinant bases for spaces of
//! twisted jet differentials on projective space.
//!
//! The library builds Wronskian-like determinants attached to tuples of
//! nondecreasing integer sequences, transports them between affine
//! charts, and verifies that the resulting sections span a space of the
//! expected dimension `(N + 1)^d`. All arithmetic is exact rational;
//! there is no floating point anywhere in the crate.

pub mod basis;
pub mod charts;
pub mod combinatorics;
pub mod error;
pub mod matrix;
pub mod monomial;
pub mod par;
pub mod polynomial;
pub mod scalar;
pub mod space;

pub use error::{Error, Result};
pub use monomial::Monomial;
pub use polynomial::{Polynomial, WeightMode};
pub use scalar::{binom, factorial, Scalar};
pub use space::{JetVar, SpaceKind, VarSpace};
