//! Simulation toolkit for two-way covert quantum illumination links.
//!
//! The closed-form layer (`metrics`, `covertness`) is checked against
//! brute-force oracles in `fock` (truncated Fock space) and `gaussian`
//! (covariance matrices). `sc_receiver` simulates the circuit-QED cat-state
//! transmitter and receiver, `montecarlo` runs shot-level experiments.

pub mod cli;
pub mod covertness;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod lindblad;
pub mod metrics;
pub mod montecarlo;
pub mod sc_receiver;
pub mod transmitters;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
