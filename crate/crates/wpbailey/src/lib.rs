//! Exact and numeric verification engine for WP-Bailey pair summation and
//! transformation identities.
//!
//! The crate is organised around four layers:
//!
//! - [`qseries`]: exact kernel (Gaussian-rational truncated Laurent series)
//! - [`qnumeric`]: floating-point complex backend for cross-checks
//! - [`wppairs`]: the WP-Bailey pair catalog, defining-relation checker,
//!   chain transform and derived-pair limit probe
//! - [`identities`]: named series builders and the registry of verifiable
//!   identities, exposed through the `wpbailey` CLI

pub mod backend;
pub mod cli;
pub mod error;
pub mod identities;
pub mod params;
pub mod qnumeric;
pub mod qseries;
pub mod wppairs;

pub use error::{Error, Result};
