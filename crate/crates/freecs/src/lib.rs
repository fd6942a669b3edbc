//! Numerical oracles, file formats and the `freecs` command-line tool for
//! free-particle coherent states.
//!
//! The closed forms live in [`freecs_core`]; this crate checks them against
//! independent numerics (finite-difference residuals, exact spectral
//! propagation, quadrature) and exposes everything through a deterministic
//! CLI.

pub mod cli;
pub mod config;
pub mod format;
pub mod oracle;
pub mod verify;

pub use freecs_core as core;
