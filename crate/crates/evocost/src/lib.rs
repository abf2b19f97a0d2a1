//! Cost accounting for evolutionary search versus oracle-guided learning
//! on synthetic bitstring fitness landscapes.
//!
//! The crate has two halves that measure the same quantities:
//!
//! * [`cost_model`] computes the closed-form costs exactly, on
//!   arbitrary-precision rationals;
//! * [`landscape`], [`evolution`] and [`efficient`] measure them
//!   empirically with a deterministic Monte Carlo engine.
//!
//! The `evocost` binary ([`cli`]) exposes both halves as subcommands and
//! emits CSV, JSON or text.

pub mod cli;
pub mod cost_model;
pub mod efficient;
pub mod error;
pub mod evolution;
pub mod landscape;
pub mod rational;
pub mod seed;

pub use error::{Error, Result};
