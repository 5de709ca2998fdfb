//! Potential-theoretic orthogonal polynomials on planar domains.
//!
//! A compact set `K` with analytic Jordan boundary is described by the
//! exterior conformal map `φ : {|w| > 1} → ℂ \ K`, given as a finite Laurent
//! series. From it the crate builds
//!
//! * Faber polynomials and their remainders ([`faber`]),
//! * the Gram matrix of the Faber basis under the weight `P_K^{-2s}`
//!   ([`moments`]),
//! * the orthonormal polynomials `π_{n,s}`, their leading coefficients and
//!   asymptotic predictors ([`ortho`]),
//! * reproducing kernels, boundary scaling limits ([`kernel`]) and the
//!   associated determinantal point process statistics ([`process`]).
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the command
//! line and caches live in the companion `planar-ortho-cli` crate.
#![no_std]
// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod faber;
pub mod geometry;
pub mod kernel;
pub mod linalg;
pub mod moments;
pub mod ortho;
pub mod process;
pub mod quadrature;

pub use error::{Error, Result};
pub use geometry::{BigPhi, DomainSpec, ExteriorMap};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Tolerance on `|Φ(z)| − 1` separating `K` from its exterior.
pub const INSIDE_TOL: f64 = 1e-10;
