//! Polar-code construction and analysis through the monomial view of
//! `G_N = G_2^{⊗m}`.
//!
//! The crate covers reliability profiles (BEC and Gaussian approximation),
//! minimum-weight spectra of decreasing information sets, the mixed
//! reliability/weight construction, SC and SCL decoding (optionally with
//! CRC or PAC precoding), Monte-Carlo BLER simulation, and brute-force
//! oracles for small blocklengths.

pub mod codec;
pub mod construction;
pub mod error;
pub mod monomial;
pub mod oracle;
pub mod reliability;
pub mod simulator;
pub mod weight;

pub use error::{Error, Result};
