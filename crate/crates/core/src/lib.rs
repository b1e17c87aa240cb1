//! Information-theoretic model of crowdsourced labeling.
//!
//! Workers are noisy discrete channels, queries are codewords and the
//! crowdsourcer is a decoder. The crate provides:
//!
//! - [`infomath`]: entropy, symmetric-channel capacity and the Hamming
//!   rate-distortion function, all in bits.
//! - [`worker`]: the M-ary symmetric channel (MSC) and spammer-hammer channel
//!   (SHC) worker models, plus discrete skill populations.
//! - [`kic`]: k-ary incidence coding. Enumerates valid responses, encodes
//!   queries and computes the per-item spammer error probability.
//! - [`bounds`]: closed-form minimum query rates for unknown and known skill
//!   levels, the SHC specialisation and the kIC oracle threshold.
//! - [`sim`]: a seeded Monte Carlo engine that checks the kIC threshold and a
//!   majority-vote baseline empirically.
//! - [`pricing`]: campaign cost and the price threshold between two query
//!   arities.

pub mod bounds;
pub mod error;
pub mod infomath;
pub mod kic;
pub mod pricing;
pub mod sim;
pub mod source;
pub mod worker;

pub use error::{Error, Result};
pub use infomath::{Entropy, Pmf};
pub use source::SourceModel;
