//! Exact execution on computational basis states.
//!
//! Every gate in the set permutes basis states, so a state is a plain bit
//! vector. Temporary-AND uncomputation is executed as the inverse AND, which
//! agrees with measurement-based erasure on basis states.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

use crate::ir::{CheckKind, Circuit, Gate, Lookup, QubitId};

/// One bit per qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisState {
    words: Vec<u64>,
    len: usize,
}

impl BasisState {
    pub fn zeros(len: usize) -> Self {
        Self { words: alloc::vec![0; len.div_ceil(64)], len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, q: QubitId) -> bool {
        let i = q.index();
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, q: QubitId, bit: bool) {
        let i = q.index();
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, q: QubitId) {
        let i = q.index();
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Little-endian value of the given qubits.
    pub fn read(&self, qubits: &[QubitId]) -> BigUint {
        let mut digits = alloc::vec![0u32; qubits.len().div_ceil(32)];
        for (k, &q) in qubits.iter().enumerate() {
            if self.get(q) {
                digits[k / 32] |= 1 << (k % 32);
            }
        }
        BigUint::new(digits)
    }

    fn read_small(&self, qubits: &[QubitId]) -> usize {
        qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &q)| acc | ((self.get(q) as usize) << k))
    }

    /// Overwrites the given qubits with `value`; `false` if it does not fit.
    pub fn write(&mut self, qubits: &[QubitId], value: &BigUint) -> bool {
        if value.bits() > qubits.len() as u64 {
            return false;
        }
        for (k, &q) in qubits.iter().enumerate() {
            self.set(q, value.bit(k as u64));
        }
        true
    }

    fn xor_value(&mut self, qubits: &[QubitId], value: &BigUint) {
        for (k, &q) in qubits.iter().enumerate() {
            if value.bit(k as u64) {
                self.flip(q);
            }
        }
    }

    fn is_zero(&self, qubits: &[QubitId]) -> bool {
        qubits.iter().all(|&q| !self.get(q))
    }

    /// Applies one gate without any discipline checks.
    pub fn apply(&mut self, gate: &Gate) {
        match gate {
            Gate::Not(q) => self.flip(*q),
            Gate::Cnot { control, target } => {
                if self.get(*control) {
                    self.flip(*target)
                }
            }
            Gate::MultiCnot { control, targets } => {
                if self.get(*control) {
                    targets.iter().for_each(|t| self.flip(*t));
                }
            }
            Gate::Toffoli { c1, c2, target }
            | Gate::TempAnd { c1, c2, target }
            | Gate::TempAndUncompute { c1, c2, target } => {
                if self.get(*c1) && self.get(*c2) {
                    self.flip(*target)
                }
            }
            Gate::LookupLoad(l) | Gate::LookupUnload(l) => {
                let value = &l.table[self.read_small(l.address.qubits())];
                self.xor_value(l.target.qubits(), value);
            }
        }
    }

    fn lookup_value<'l>(&self, l: &'l Lookup) -> &'l BigUint {
        &l.table[self.read_small(l.address.qubits())]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    /// A temporary AND was computed into a nonzero target.
    AndTargetDirty,
    /// An AND uncompute found a target different from the AND of its controls.
    UncomputeMismatch,
    /// A lookup load found a nonzero target.
    LookupTargetDirty,
    /// A lookup unload found a target different from the addressed entry.
    UnloadMismatch,
    /// A zero check failed.
    Check(CheckKind),
    /// An ancilla was nonzero when the circuit finished.
    AncillaAtExit,
}

/// A broken ancilla or relabelling invariant. These indicate a construction
/// bug or inputs that violate a circuit precondition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    pub position: usize,
    pub qubit: QubitId,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} on {} at position {}", self.kind, self.qubit, self.position)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("no register named `{0}`")]
    UnknownRegister(String),
    #[error("value for `{role}` does not fit in {width} bits")]
    InputOutOfRange { role: String, width: usize },
    #[error("ancilla discipline violated: {0}")]
    Violation(Violation),
}

/// A stepwise run of one circuit.
pub struct Execution<'c> {
    circuit: &'c Circuit,
    state: BasisState,
    position: usize,
    next_check: usize,
    checked: bool,
}

impl<'c> Execution<'c> {
    /// Loads named-register inputs (unassigned qubits start at zero) and
    /// evaluates the checks at position 0.
    pub fn new(circuit: &'c Circuit, inputs: &BTreeMap<String, BigUint>) -> Result<Self, SimError> {
        let mut state = BasisState::zeros(circuit.qubit_count() as usize);
        for (role, value) in inputs {
            let reg = circuit
                .register(role)
                .ok_or_else(|| SimError::UnknownRegister(role.clone()))?;
            if !state.write(reg.qubits(), value) {
                return Err(SimError::InputOutOfRange { role: role.clone(), width: reg.width() });
            }
        }
        let mut exec = Self { circuit, state, position: 0, next_check: 0, checked: true };
        exec.run_checks()?;
        Ok(exec)
    }

    /// Starts from an arbitrary state with all discipline checks disabled.
    pub fn unchecked(circuit: &'c Circuit, state: BasisState) -> Self {
        assert_eq!(state.len(), circuit.qubit_count() as usize);
        Self { circuit, state, position: 0, next_check: 0, checked: false }
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn state(&self) -> &BasisState {
        &self.state
    }

    pub fn read(&self, role: &str) -> Option<BigUint> {
        self.circuit.register(role).map(|r| self.state.read(r.qubits()))
    }

    fn violation(&self, qubit: QubitId, kind: ViolationKind) -> SimError {
        SimError::Violation(Violation { position: self.position, qubit, kind })
    }

    fn run_checks(&mut self) -> Result<(), SimError> {
        let checks = self.circuit.checks();
        while let Some(c) = checks.get(self.next_check) {
            if c.position > self.position {
                break;
            }
            self.next_check += 1;
            if self.checked && self.state.get(c.qubit) {
                return Err(self.violation(c.qubit, ViolationKind::Check(c.kind)));
            }
        }
        Ok(())
    }

    fn apply_checked(&mut self, gate: &Gate) -> Result<(), SimError> {
        let s = &self.state;
        match gate {
            Gate::TempAnd { target, .. } if s.get(*target) => {
                return Err(self.violation(*target, ViolationKind::AndTargetDirty));
            }
            Gate::TempAndUncompute { c1, c2, target } if s.get(*target) != (s.get(*c1) && s.get(*c2)) => {
                return Err(self.violation(*target, ViolationKind::UncomputeMismatch));
            }
            Gate::LookupLoad(l) if !s.is_zero(l.target.qubits()) => {
                return Err(self.violation(l.target[0], ViolationKind::LookupTargetDirty));
            }
            Gate::LookupUnload(l) if s.read(l.target.qubits()) != *s.lookup_value(l) => {
                return Err(self.violation(l.target[0], ViolationKind::UnloadMismatch));
            }
            _ => {}
        }
        self.state.apply(gate);
        Ok(())
    }

    /// Applies gates until `position` gates have run in total.
    pub fn step_to(&mut self, position: usize) -> Result<(), SimError> {
        let end = position.min(self.circuit.len());
        while self.position < end {
            let gate = &self.circuit.gates()[self.position];
            if self.checked {
                self.apply_checked(gate)?;
            } else {
                self.state.apply(gate);
            }
            self.position += 1;
            self.run_checks()?;
        }
        Ok(())
    }

    /// Runs to the end and verifies every ancilla is back at zero.
    pub fn finish(mut self) -> Result<BasisState, SimError> {
        self.step_to(self.circuit.len())?;
        if self.checked {
            if let Some(&q) = self.circuit.ancillas().iter().find(|&&q| self.state.get(q)) {
                return Err(self.violation(q, ViolationKind::AncillaAtExit));
            }
        }
        Ok(self.state)
    }
}

/// Runs `circuit` on named-register inputs and returns every named register.
pub fn run(circuit: &Circuit, inputs: &BTreeMap<String, BigUint>) -> Result<BTreeMap<String, BigUint>, SimError> {
    let state = Execution::new(circuit, inputs)?.finish()?;
    Ok(circuit
        .registers()
        .iter()
        .map(|(role, reg)| (role.clone(), state.read(reg.qubits())))
        .collect())
}

/// Convenience for building input maps.
pub fn inputs<'a>(pairs: impl IntoIterator<Item = (&'a str, BigUint)>) -> BTreeMap<String, BigUint> {
    pairs.into_iter().map(|(k, v)| (String::from(k), v)).collect()
}
