//! Isomorphism classes of elliptic curves over finite fields, organized by
//! Frobenius trace, and the character-sum, L-value and large-sieve
//! machinery used to bound their averages over short windows of traces.

pub mod arith;
pub mod census;
pub mod characters;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod lfunctions;
pub mod quadforms;
pub mod sieve;

pub use error::{Error, Result};
