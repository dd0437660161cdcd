//! Verification toolkit for Kloosterman-type sums, Dirichlet series and
//! L-functions attached to elliptic classes of GL(2) over ℚ and real quadratic fields.

// Series coefficients are kept digit-for-digit as published.
#![allow(clippy::excessive_precision)]

pub mod analytic;
pub mod arith;
pub mod config;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod kloosterman;
pub mod lfun;
pub mod local;
pub mod report;
pub mod suites;
pub mod symbols;
pub mod zeta;

pub use error::{Error, Result};
