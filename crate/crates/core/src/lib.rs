//! Non-leveled binary-coefficient CKKS.
//!
//! Plaintexts are encoded with the CKKS canonical embedding, scaled, rounded and
//! then bit-expanded into the ring `BP = Z[x]/(x^K + 1)` with `K = N * lambda_B`.
//! Ciphertexts live in `BP` at a single level: there is no modulus chain and no
//! rescaling. Noise is tracked analytically per ciphertext, and a homomorphic
//! re-encryption (`refresh`) is used once it passes a threshold.
//!
//! A BCH layer (`bch`) wraps binary messages for bit-exact recovery.

pub mod bch;
pub mod cli;
pub mod encoding;
pub mod error;
pub mod eval;
pub mod noise;
pub mod ring;
pub mod sampling;
pub mod scheme;

pub use error::{Error, Result};
