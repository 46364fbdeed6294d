//! Secrecy and reliability exponents of the wire-tap channel under i.i.d.
//! random coding, with brute-force oracles and an exact small-blocklength
//! ensemble simulator.
//!
//! - [`prob`]: distributions, channels, information measures (nats).
//! - [`exponents`]: F₀, G₀, E_s, E_b, E_1/E_2, E_t and Gallager's E_r.
//! - [`type_oracle`]: method-of-types enumeration and brute-force checks.
//! - [`ensemble`]: seeded sub-codebook sampling and exact leakage.

pub mod combinatorics;
pub mod ensemble;
pub mod error;
pub mod exponents;
pub mod optimize;
pub mod prob;
pub mod type_oracle;

pub use error::{Error, Result};
