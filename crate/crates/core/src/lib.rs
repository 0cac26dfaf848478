//! Nonlocality of two qubits decaying into independent zero-temperature
//! reservoirs.
//!
//! The crate builds extended Werner-like initial states, evolves them under
//! amplitude damping parametrized by the decoherence amplitude `q(t)`, and
//! evaluates the CHSH-Bell function three ways: a closed-form restricted
//! maximum, the Horodecki maximum over all settings, and a numerical search.

pub mod analysis;
pub mod chsh;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod report;
pub mod reservoir;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64;
