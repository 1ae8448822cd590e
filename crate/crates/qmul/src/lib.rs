//! File formats, reports and parallel verification on top of [`qmul_core`].
//!
//! The `qmul` binary is a thin command-line layer over these modules.

pub mod report;
pub mod text;
pub mod verify;

pub use qmul_core;
