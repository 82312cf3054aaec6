//! Tree-decomposition dynamic programming for (σ,ρ)-domination problems
//! with residue-class constraints, plus the supporting toolkit: sparse
//! languages, modular convolution, brute-force oracles, gadget checks and
//! instance generators.

pub mod bench;
pub mod combine;
pub mod compress;
pub mod dp;
pub mod error;
pub mod gadget;
pub mod gen;
pub mod graph;
pub mod lang;
pub mod modconv;
pub mod oracle;
pub mod residue;

pub use error::{Error, Result};
