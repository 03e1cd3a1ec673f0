//! Simulation of neutral-kaon mixing, regeneration and CP violation on
//! flux-biased Josephson phase qubits.
//!
//! The crate is layered bottom-up:
//!
//! * [`qmath`] - dense complex algebra for one and two qubits.
//! * [`junction`] - stationary spectrum of the biased junction well and the
//!   reduction to qubit parameters.
//! * [`kaon`] - rotating-frame non-Hermitian Hamiltonian, flavor and
//!   CP-violating states.
//! * [`dynamics`] - constant-Hamiltonian propagation, gate/free-evolution
//!   sequences, lab-frame driven integration and the two-qubit builders.
//! * [`scenarios`] - the named experiments with their closed-form references.
//!
//! Kaon-side quantities use natural units (hbar = c = 1): energies and rates
//! are angular frequencies, times are in the same time unit.

// `!(x > 0.0)` is how NaN gets rejected alongside non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod junction;
pub mod kaon;
pub mod qmath;
pub mod scenarios;

mod error;

pub use error::Error;
pub use num_complex::Complex64 as C64;
