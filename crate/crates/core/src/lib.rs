//! Moduli of representations of one-point extensions A[T] of a quiver path
//! algebra A = kQ by a rigid module T.
//!
//! The crate decides semistability of dimension vectors `(s, d)`, enumerates
//! Harder–Narasimhan types, computes motives of representation varieties and
//! Poincaré polynomials of moduli spaces, and checks all of it against exact
//! finite-field computations in [`oracle`].

pub mod error;
pub mod field;
pub mod grothendieck;
pub mod motive;
pub mod oracle;
pub mod quiver;
pub mod semiinv;
pub mod stability;

pub use error::{Error, Result};
pub use field::{FpMatrix, PrimeField};
pub use grothendieck::{LPolynomial, MotiveExpr};
pub use quiver::{DimVector, ExtDimVector, ExtensionData, IntMatrix, Quiver};
pub use stability::{HNType, StabilityEngine};
