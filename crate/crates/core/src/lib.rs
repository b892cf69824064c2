//! Envelope-theory bound states for cyclic systems of identical particles.
//!
//! A cyclic system couples each particle only to its successor,
//! `H = Σ T(|p_i|) + Σ W(|r_i - r_{i+1}|)` with `r_{N+1} = r_1`. The envelope
//! method maps every level onto an auxiliary harmonic problem and reduces it to
//! a scalar equation in one mean separation.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod et_solver;
pub mod kernel;
pub mod oracle;
pub mod oscillator;

pub use error::{Error, Result};
pub use et_solver::{solve, solve_level, EtSolution};
pub use kernel::{Character, KineticSpec, PotentialSpec, Shape};
pub use oscillator::QuantumNumbers;
