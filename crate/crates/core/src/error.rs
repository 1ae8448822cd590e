use alloc::string::String;

use crate::ir::QubitId;

/// Errors raised while constructing or validating a circuit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("register width must be at least 1")]
    ZeroWidth,
    #[error("register role `{0}` is already allocated")]
    DuplicateRole(String),
    #[error("qubit {0} appears twice in one register")]
    DuplicateQubit(QubitId),
    #[error("named registers `{0}` and `{1}` share qubit {2}")]
    OverlappingRegisters(String, String, QubitId),
    #[error("qubit {qubit} is out of range for a circuit with {qubit_count} qubits")]
    QubitOutOfRange { qubit: QubitId, qubit_count: u32 },
    #[error("gate {index} uses qubit {qubit} more than once")]
    RepeatedOperand { index: usize, qubit: QubitId },
    #[error("gate {index}: temporary AND on target {target} has no matching uncompute")]
    UnmatchedTempAnd { index: usize, target: QubitId },
    #[error("gate {index}: AND uncompute on target {target} has no matching compute")]
    UnmatchedUncompute { index: usize, target: QubitId },
    #[error("gate {index}: lookup table has {len} entries, expected {expected}")]
    TableLength { index: usize, len: usize, expected: usize },
    #[error("gate {index}: lookup entry {entry} does not fit in {width} bits")]
    TableEntryTooWide { index: usize, entry: usize, width: usize },
    #[error("lookup address width {0} exceeds the supported maximum of {max}", max = crate::ir::MAX_ADDRESS_WIDTH)]
    AddressTooWide(usize),
    #[error("block `{0}` has an invalid gate range")]
    BadBlock(String),
    #[error("block `{0}` was never closed")]
    OpenBlock(String),
    #[error("check position {0} is past the end of the circuit")]
    BadCheck(usize),
    #[error("constant {constant} does not fit in {width} bits")]
    ConstantOutOfRange { constant: String, width: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Errors from the classical reference arithmetic.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("modulus must be odd and greater than 1")]
    EvenModulus,
    #[error("modulus {p} does not fit in {n} bits")]
    ModulusTooWide { p: String, n: u32 },
    #[error("operand {0} is not reduced below the modulus")]
    NotReduced(String),
    #[error("window width {w} must lie in 1..={n}")]
    WindowOutOfRange { w: u32, n: u32 },
    #[error("montgomery routes disagree: direct {direct}, windowed {windowed}")]
    Disagreement { direct: String, windowed: String },
}

/// Errors from the cost estimator.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EstimateError {
    #[error("a window size is required for modular multiplication mod p")]
    MissingWindow,
    #[error("{0} has no window parameter")]
    NotModP(&'static str),
    #[error("n must be at least {0}")]
    WidthTooSmall(u32),
    #[error("threshold {0} must lie in [0, 0.5)")]
    BadThreshold(f64),
    #[error("threshold {threshold} is not reached for n <= {cap}")]
    Unreachable { threshold: f64, cap: u32 },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}
