//! Simulation of a low-dissipation quantum-dot data bus.
//!
//! - [`chain`]: one- and two-electron Hamiltonians of a dot chain and the
//!   coupling profiles used for transfer.
//! - [`propagator`]: exact propagation by spectral decomposition, fidelity
//!   scans and peak search.
//! - [`separation`]: splitting an electron pair across a double dot.
//! - [`energetics`]: the Hund-Mulliken double-dot model, freeze curves and
//!   the cost of PST, shuttling and classical wires.
//! - [`protocol`]: the end-to-end bus, coherence budgets, segmentation and
//!   repetition codes.

pub mod chain;
pub mod energetics;
pub mod error;
pub mod matrix;
pub mod propagator;
pub mod protocol;
pub mod roots;
pub mod separation;
pub mod special;

pub use error::{Error, Result};
pub use matrix::HermitianMatrix;
