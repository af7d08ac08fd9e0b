//! Numerical core for the exactly solvable time-dependent SU(2) Gross-Neveu model.
//!
//! Everything here is `no_std` with `alloc`: spin-space linear algebra, the
//! S/R-matrix algebra, qKZ transport and Jackson sums, Bethe-equation solvers
//! and the root-density integral equations. IO lives in the `tdgn` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bethe;
pub mod eigen;
pub mod error;
pub mod gamma;
pub mod linalg;
pub mod qkz;
pub mod quad;
pub mod scattering;
pub mod spin;
pub mod thermo;
pub mod yang_baxter;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Default seed for every randomized sweep.
pub const DEFAULT_SEED: u64 = 7;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `arctan(a / b)` written as in the Bethe literature.
#[inline]
pub fn theta(a: f64, b: f64) -> f64 {
    libm::atan(a / b)
}
