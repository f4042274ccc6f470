//! Desk-scale emulation of a Schrodingerised quantum algorithm for
//! local-volatility option pricing, with classical oracles to check it.
//!
//! The forward Kolmogorov generator `L` is split into Hermitian parts,
//! lifted onto an auxiliary momentum register (optionally plus a clock
//! register for time-dependent volatility), evolved as exact statevectors,
//! post-selected on positive momentum and read out with emulated swap tests.

pub mod cli;
pub mod clock;
pub mod config;
pub mod error;
pub mod evolve;
pub mod generator;
pub mod grid;
pub mod output;
pub mod pipeline;
pub mod resources;
pub mod retrieval;
pub mod schrodinger;
pub mod sparse;
pub mod volatility;

pub use error::{Error, Result};
