//! Exact-arithmetic kernels for studying the irreducibility of random monic
//! integer polynomials with coefficients drawn uniformly from `[-K, K]`.
//!
//! The crate is split by concern:
//!
//! * [`intpoly`]: dense polynomials over `Z` and over prime fields.
//! * [`cyclotomic`]: cyclotomic polynomials, totients and folding modulo `z^n - 1`.
//! * [`anticoncentration`]: exact sum laws, p-boundedness certificates and the
//!   integral bounds on point masses of sums of uniform coefficients.
//! * [`mahler`]: certified roots, Mahler measure, Kronecker detection and
//!   root-power polynomials.
//! * [`factorlab`]: low-degree factor detection, irreducibility and exhaustive
//!   censuses of the family `P_{d,K}`.
//! * [`bounds`]: closed-form envelopes and counting bounds.
//! * [`sampling`]: counter-based random polynomial generators.

pub mod anticoncentration;
pub mod bounds;
pub mod cyclotomic;
mod error;
pub mod factorlab;
pub mod intpoly;
pub mod mahler;
pub mod primes;
pub mod sampling;

pub use error::{Error, Result};
pub use intpoly::{IntPolynomial, ModPolynomial};
