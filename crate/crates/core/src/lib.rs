//! Numerical experiments on the low-lying zeros of quadratic twists of
//! level-one holomorphic cusp forms in the weight aspect.
//!
//! The crate is organised bottom-up: real primitive characters, exact
//! q-expansions and Hecke eigenforms, central L-values and Petersson norms,
//! harmonic weights, test functions, exact combinatorics, prime sums, the
//! weighted moments of the one-level density, and Monte-Carlo random-matrix
//! comparisons.

pub mod arith;
pub mod characters;
pub mod combinatorics;
pub mod error;
pub mod lvalues;
pub mod modforms;
pub mod moments;
pub mod primesums;
pub mod quadrature;
pub mod rmt;
pub mod scalar;
pub mod testfuncs;

pub use error::{Error, Result};
pub use scalar::{Exact, Mp, Real};

/// Exact rational arithmetic for q-series and combinatorial identities.
pub type ExactScalar = Exact;
/// Fast double-precision scalar for exploratory runs.
pub type Fast = f64;
/// Multiple-precision scalar for certified runs.
pub type Precise = Mp;
