//! Reversible arithmetic circuits for quantum multiplication.
//!
//! The crate builds Toffoli-counted circuits for schoolbook multiplication,
//! multiplication mod `2^n` and Montgomery multiplication mod `p`, each in a
//! controlled-adder flavour and a controlled add-subtract flavour. Circuits
//! can be executed exactly on computational basis states, compared against
//! classical reference arithmetic, and costed against closed-form Toffoli
//! counts.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod blocks;
pub mod error;
pub mod estimator;
pub mod ir;
pub mod multipliers;
pub mod oracle;
pub mod resources;
pub mod sim;

pub use error::{CircuitError, EstimateError, OracleError};
pub use ir::{Block, CheckKind, Circuit, CircuitBuilder, Gate, Lookup, QubitId, Register, ZeroCheck};
pub use multipliers::{ModPParams, MultiplierKind, Variant};
pub use resources::{count_resources, LedgerEntry, ResourceReport};
pub use sim::{run, BasisState, Execution, SimError, Violation, ViolationKind};

pub use num_bigint::BigUint;
