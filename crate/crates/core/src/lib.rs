//! Simulator and algebra toolkit for high-dimensional qudit quantum memory.
//!
//! The pipeline has three stages: non-demolition syndrome extraction into
//! ancilla phases ([`echo`]), adaptive Fourier classification of those
//! phases ([`fourier`]), and coset-based correction ([`correction`]). The
//! [`harness`] module wires them into seeded Monte Carlo experiments.

pub mod algebra;
pub mod correction;
pub mod echo;
pub mod error;
pub mod fourier;
pub mod harness;
pub mod linalg;
pub mod noise;
pub mod statevec;

pub use algebra::{QuditDim, WeylOp};
pub use error::{Error, Result};
pub use statevec::{fidelity, Register, StateVector};
