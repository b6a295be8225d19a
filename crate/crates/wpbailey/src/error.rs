//! Error types shared by the exact kernel, the numeric backend and the
//! identity registry.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Inversion of a series that is zero through its entire tracked window.
    #[error("singular series: zero through the tracked window, cannot invert")]
    SingularSeries,

    /// A summation failed to terminate under the configured stopping rule.
    #[error("non-convergent sum: {0}")]
    NonConvergent(String),

    /// Coefficient extraction beyond the provable truncation bound.
    #[error("window [{lo}, {hi}) exceeds truncation order {order}")]
    WindowExceedsOrder { lo: i64, hi: i64, order: i64 },

    /// An exact denominator factor vanishes identically.
    #[error("pole detected: factor {factor} vanishes")]
    PoleDetected { factor: String },

    /// A numeric denominator factor is too close to zero.
    #[error("pole proximity: |{factor}| = {magnitude:e} below tolerance")]
    PoleProximity { factor: String, magnitude: f64 },

    #[error("unknown identity id `{0}`")]
    UnknownIdentity(String),

    #[error("unknown pair id `{0}`")]
    UnknownPair(String),

    #[error("unknown series name `{0}`")]
    UnknownSeries(String),

    /// Malformed input or a violated precondition (bad flags, |q| >= 1, ...).
    #[error("{0}")]
    Domain(String),

    /// Parameter-string parse failure.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
