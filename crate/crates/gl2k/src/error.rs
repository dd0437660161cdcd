//! Error type shared by every module.

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An enumeration, factorization or quadrature budget was exceeded.
    #[error("resource budget exceeded: {0}")]
    Resource(String),
    /// The input lies outside the domain where the quantity is defined.
    #[error("undefined input: {0}")]
    UndefinedInput(String),
    /// The field parameters do not describe a supported field.
    #[error("invalid field: {0}")]
    InvalidField(String),
    /// The operation has no meaning for this input (e.g. units of Q).
    #[error("not applicable: {0}")]
    NotApplicable(String),
    /// A prime above 2 that is not split.
    #[error("unsupported prime: {0}")]
    UnsupportedPrime(String),
    /// The discriminant of the elliptic datum is a square in the base field.
    #[error("discriminant is a square in the base field")]
    SquareDiscriminant,
    /// The ideal does not divide the square part of the discriminant.
    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),
    /// No closed form is available for these local parameters.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    /// The closed form has a pole at the requested point.
    #[error("pole at {0}")]
    Pole(String),
    /// The requested point lies outside the supported evaluation region.
    #[error("nonconvergent request: {0}")]
    Nonconvergent(String),
    /// Adaptive quadrature did not reach its target.
    #[error("quadrature budget exhausted: {0}")]
    Quadrature(String),
    /// Malformed configuration file or argument.
    #[error("config error: {0}")]
    Config(String),
}

/// Library result alias.
pub type Result<T> = std::result::Result<T, Error>;
