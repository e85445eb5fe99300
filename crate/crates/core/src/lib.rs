//! Frobenius sign separation for pairs of low-genus curves.
//!
//! The crate is organised bottom-up:
//!
//! * [`curve`] counts points of genus-1 and genus-2 curves over `F_p` and
//!   `F_{p^2}` and turns the counts into Frobenius traces, Euler factors and
//!   unitarized eigenangles.
//! * [`trace_store`] persists per-curve trace tables as CSV with an
//!   on-disk cache.
//! * [`symp`] implements the representation theory of `USp(2g)` and
//!   `USp(2g) x USp(2g')`: characters, Weyl integration, trivial
//!   multiplicities, Adams operations and the separating virtual character.
//! * [`kernel`] evaluates the Bach kernel and the kernel-weighted prime sums
//!   together with their main terms.
//! * [`separation`] searches for the least prime at which two curves have
//!   Frobenius traces of strictly opposite sign.
//!
//! Numerical building blocks are generic over [`Scalar`] (`f32` or `f64`);
//! the aliases below fix the double-precision instantiations used by the
//! rest of the crate.

// NaN inputs are rejected with `!(x > 0)`-style guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod curve;
pub mod field;
pub mod kernel;
pub mod numeric;
pub mod primes;
pub mod scalar;
pub mod separation;
pub mod symp;
pub mod trace_store;

pub use scalar::Scalar;

/// Working precision for everything that is not exact integer arithmetic.
pub type Real = f64;

pub type KernelParams64 = kernel::KernelParams<f64>;
pub type GaussLegendre64 = numeric::GaussLegendre<f64>;
pub type WeylGrid64 = symp::WeylGrid<f64>;
pub type TorusPoint64 = symp::TorusPoint<f64>;

/// Laurent polynomials with machine-integer coefficients, used for the exact
/// character computations.
pub type IntLaurent = symp::LaurentPoly<i64>;
