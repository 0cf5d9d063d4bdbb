//! Rank bounds for lexicographically ordered one-counter languages.
//!
//! A one-counter language is presented as a regular transducer reading
//! well-bracketed binary input (0 opens, 1 closes) and emitting regular
//! output languages. The pipeline computes ultimately periodic counter
//! sets per state, builds the depth-typed machine, condenses it into
//! strongly connected components, certifies a common primitive root for
//! the cycle outputs of each component, and combines the results into an
//! ordinal bound below ω².

pub mod check;
pub mod components;
pub mod counterset;
pub mod error;
pub mod fixture;
pub mod harness;
pub mod rank;
pub mod regular;
pub mod report;
pub mod transducer;
pub mod words;

pub use error::{Error, Result};
