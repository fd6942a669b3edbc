//! Closed-form coherent states of a free nonrelativistic particle.
//!
//! Everything here works in the dimensionless variables `q = x/l`,
//! `tau = hbar t / (m l^2)`, `p = l p_x / hbar`, where the free Schrödinger
//! equation reads `i d/dtau psi = -(1/2) d^2/dq^2 psi`. The [`units`] module
//! converts to and from SI quantities.
//!
//! The crate is `no_std` and only needs `alloc` for sampled fields and Fock
//! polynomial coefficients. Numerical oracles, file formats and the CLI live
//! in the companion `freecs` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analytic;
mod error;
pub mod families;
pub mod grid;
pub mod semiclassical;
pub mod units;

pub use error::{Error, Result};
pub use families::{CsFamily, CsLabel, Family, GeneralizedFamily};
pub use grid::{Grid, GridKind};
pub use num_complex::Complex64;
