//! Registers, the reversible gate set and circuit containers.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use num_bigint::BigUint;

use crate::error::CircuitError;

/// Largest lookup address width accepted by the validator.
pub const MAX_ADDRESS_WIDTH: usize = 20;

/// Index of a qubit inside one circuit. Indices are dense `0..qubit_count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitId(pub u32);

impl QubitId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// Little-endian qubit list: position `k` holds the coefficient of `2^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Register {
    qubits: Vec<QubitId>,
}

impl Register {
    pub fn new(qubits: Vec<QubitId>) -> Result<Self, CircuitError> {
        if qubits.is_empty() {
            return Err(CircuitError::ZeroWidth);
        }
        let mut seen = BTreeSet::new();
        for &q in &qubits {
            if !seen.insert(q) {
                return Err(CircuitError::DuplicateQubit(q));
            }
        }
        Ok(Self { qubits })
    }

    pub fn width(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[QubitId] {
        &self.qubits
    }

    pub fn iter(&self) -> impl Iterator<Item = QubitId> + '_ {
        self.qubits.iter().copied()
    }
}

impl core::ops::Index<usize> for Register {
    type Output = QubitId;

    fn index(&self, k: usize) -> &QubitId {
        &self.qubits[k]
    }
}

/// A classical table addressed by a quantum register.
///
/// On basis states both load and unload XOR `table[address]` into the
/// target; they differ only in their Toffoli charge.
#[derive(Clone, Debug, PartialEq)]
pub struct Lookup {
    pub address: Register,
    pub target: Register,
    pub table: Arc<Vec<BigUint>>,
}

impl Lookup {
    pub fn address_width(&self) -> usize {
        self.address.width()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Not(QubitId),
    Cnot { control: QubitId, target: QubitId },
    MultiCnot { control: QubitId, targets: Vec<QubitId> },
    Toffoli { c1: QubitId, c2: QubitId, target: QubitId },
    /// Logical AND into a fresh zero target.
    TempAnd { c1: QubitId, c2: QubitId, target: QubitId },
    /// Measurement-based erasure of a [`Gate::TempAnd`] target.
    TempAndUncompute { c1: QubitId, c2: QubitId, target: QubitId },
    LookupLoad(Lookup),
    LookupUnload(Lookup),
}

/// `2^(w/2)` in real arithmetic.
pub fn half_power_of_two(w: u32) -> f64 {
    let whole = libm::ldexp(1.0, (w / 2) as i32);
    if w % 2 == 1 {
        whole * core::f64::consts::SQRT_2
    } else {
        whole
    }
}

impl Gate {
    /// Toffoli charge under AND accounting.
    pub fn nominal_toffoli(&self) -> f64 {
        match self {
            Gate::Not(_) | Gate::Cnot { .. } | Gate::MultiCnot { .. } => 0.0,
            Gate::Toffoli { .. } | Gate::TempAnd { .. } => 1.0,
            Gate::TempAndUncompute { .. } => 0.0,
            Gate::LookupLoad(l) => libm::ldexp(1.0, l.address_width() as i32),
            Gate::LookupUnload(l) => 3.0 * half_power_of_two(l.address_width() as u32),
        }
    }

    /// True for the gates whose integer Toffoli charge is 1 under AND accounting.
    pub fn is_counted_toffoli(&self) -> bool {
        matches!(self, Gate::Toffoli { .. } | Gate::TempAnd { .. })
    }

    /// True for every logical Toffoli, including AND uncomputation.
    pub fn is_logical_toffoli(&self) -> bool {
        matches!(
            self,
            Gate::Toffoli { .. } | Gate::TempAnd { .. } | Gate::TempAndUncompute { .. }
        )
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::TempAnd { c1, c2, target } => Gate::TempAndUncompute { c1: *c1, c2: *c2, target: *target },
            Gate::TempAndUncompute { c1, c2, target } => Gate::TempAnd { c1: *c1, c2: *c2, target: *target },
            Gate::LookupLoad(l) => Gate::LookupUnload(l.clone()),
            Gate::LookupUnload(l) => Gate::LookupLoad(l.clone()),
            g => g.clone(),
        }
    }

    /// All qubit operands, in operand order.
    pub fn qubits(&self) -> Vec<QubitId> {
        match self {
            Gate::Not(q) => alloc::vec![*q],
            Gate::Cnot { control, target } => alloc::vec![*control, *target],
            Gate::MultiCnot { control, targets } => {
                let mut v = Vec::with_capacity(targets.len() + 1);
                v.push(*control);
                v.extend_from_slice(targets);
                v
            }
            Gate::Toffoli { c1, c2, target }
            | Gate::TempAnd { c1, c2, target }
            | Gate::TempAndUncompute { c1, c2, target } => alloc::vec![*c1, *c2, *target],
            Gate::LookupLoad(l) | Gate::LookupUnload(l) => {
                l.address.iter().chain(l.target.iter()).collect()
            }
        }
    }
}

/// A labelled gate range whose costs are aggregated in the resource ledger.
///
/// `charge` overrides the sum of gate charges with a fixed nominal value.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub label: String,
    pub gates: Range<usize>,
    pub charge: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    /// A released ancilla must be zero.
    Ancilla,
    /// An output register must be zero before the circuit writes it.
    CleanInput,
    /// A bit dropped by relabelling (division by a power of two) must be zero.
    Relabel,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Ancilla => "ancilla",
            CheckKind::CleanInput => "clean",
            CheckKind::Relabel => "relabel",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "ancilla" => Some(CheckKind::Ancilla),
            "clean" => Some(CheckKind::CleanInput),
            "relabel" => Some(CheckKind::Relabel),
            _ => None,
        }
    }
}

/// Assertion that `qubit` is zero once `position` gates have been applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZeroCheck {
    pub position: usize,
    pub qubit: QubitId,
    pub kind: CheckKind,
}

/// An immutable, validated gate sequence with its register map.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    qubit_count: u32,
    gates: Vec<Gate>,
    registers: BTreeMap<String, Register>,
    ancillas: BTreeSet<QubitId>,
    blocks: Vec<Block>,
    checks: Vec<ZeroCheck>,
}

impl Circuit {
    /// Assembles and validates a circuit from raw parts.
    pub fn from_parts(
        qubit_count: u32,
        gates: Vec<Gate>,
        registers: BTreeMap<String, Register>,
        ancillas: BTreeSet<QubitId>,
        blocks: Vec<Block>,
        mut checks: Vec<ZeroCheck>,
    ) -> Result<Self, CircuitError> {
        checks.sort();
        checks.dedup();
        let circuit = Self { qubit_count, gates, registers, ancillas, blocks, checks };
        circuit.validate()?;
        Ok(circuit)
    }

    pub fn qubit_count(&self) -> u32 {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn registers(&self) -> &BTreeMap<String, Register> {
        &self.registers
    }

    pub fn register(&self, role: &str) -> Option<&Register> {
        self.registers.get(role)
    }

    pub fn ancillas(&self) -> &BTreeSet<QubitId> {
        &self.ancillas
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, label: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.label == label)
    }

    pub fn checks(&self) -> &[ZeroCheck] {
        &self.checks
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Gate-by-gate reverse with every gate replaced by its inverse.
    ///
    /// Blocks and zero checks are mirrored onto the reversed gate indices.
    pub fn invert(&self) -> Circuit {
        let len = self.gates.len();
        let gates = self.gates.iter().rev().map(Gate::inverse).collect();
        let blocks = self
            .blocks
            .iter()
            .rev()
            .map(|b| Block {
                label: b.label.clone(),
                gates: len - b.gates.end..len - b.gates.start,
                charge: b.charge,
            })
            .collect();
        let mut checks: Vec<ZeroCheck> = self
            .checks
            .iter()
            .map(|c| ZeroCheck { position: len - c.position, ..*c })
            .collect();
        checks.sort();
        Circuit {
            qubit_count: self.qubit_count,
            gates,
            registers: self.registers.clone(),
            ancillas: self.ancillas.clone(),
            blocks,
            checks,
        }
    }

    /// Structural validation: operand ranges and distinctness, lookup tables,
    /// AND compute/uncompute pairing, register disjointness, block and check
    /// ranges.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let in_range = |q: QubitId| {
            if q.0 < self.qubit_count {
                Ok(())
            } else {
                Err(CircuitError::QubitOutOfRange { qubit: q, qubit_count: self.qubit_count })
            }
        };

        let mut open_ands: BTreeMap<QubitId, (QubitId, QubitId, usize)> = BTreeMap::new();
        for (index, gate) in self.gates.iter().enumerate() {
            let qubits = gate.qubits();
            let mut seen = BTreeSet::new();
            for &q in &qubits {
                in_range(q)?;
                if !seen.insert(q) {
                    return Err(CircuitError::RepeatedOperand { index, qubit: q });
                }
            }
            match gate {
                Gate::TempAnd { c1, c2, target } => {
                    if open_ands.insert(*target, (*c1, *c2, index)).is_some() {
                        return Err(CircuitError::UnmatchedTempAnd { index, target: *target });
                    }
                }
                Gate::TempAndUncompute { c1, c2, target } => match open_ands.remove(target) {
                    Some((a, b, _)) if (a, b) == (*c1, *c2) || (a, b) == (*c2, *c1) => {}
                    _ => return Err(CircuitError::UnmatchedUncompute { index, target: *target }),
                },
                Gate::LookupLoad(l) | Gate::LookupUnload(l) => check_table(index, l)?,
                _ => {}
            }
        }
        if let Some((target, (_, _, index))) = open_ands.into_iter().next() {
            return Err(CircuitError::UnmatchedTempAnd { index, target });
        }

        let mut owner: BTreeMap<QubitId, &str> = BTreeMap::new();
        for (role, reg) in &self.registers {
            for q in reg.iter() {
                in_range(q)?;
                if let Some(other) = owner.insert(q, role) {
                    return Err(CircuitError::OverlappingRegisters(other.to_string(), role.clone(), q));
                }
            }
        }
        for &q in &self.ancillas {
            in_range(q)?;
        }
        for b in &self.blocks {
            if b.gates.start > b.gates.end || b.gates.end > self.gates.len() {
                return Err(CircuitError::BadBlock(b.label.clone()));
            }
        }
        for c in &self.checks {
            in_range(c.qubit)?;
            if c.position > self.gates.len() {
                return Err(CircuitError::BadCheck(c.position));
            }
        }
        Ok(())
    }
}

fn check_table(index: usize, l: &Lookup) -> Result<(), CircuitError> {
    let w = l.address.width();
    if w > MAX_ADDRESS_WIDTH {
        return Err(CircuitError::AddressTooWide(w));
    }
    let expected = 1usize << w;
    if l.table.len() != expected {
        return Err(CircuitError::TableLength { index, len: l.table.len(), expected });
    }
    let width = l.target.width();
    if let Some(entry) = l.table.iter().position(|v| v.bits() as usize > width) {
        return Err(CircuitError::TableEntryTooWide { index, entry, width });
    }
    Ok(())
}

struct OpenBlock {
    label: String,
    start: usize,
    charge: Option<f64>,
}

/// Incremental circuit construction with an ancilla pool.
///
/// Released ancillas get an [`CheckKind::Ancilla`] zero check at the release
/// point and are reused by later allocations.
#[derive(Default)]
pub struct CircuitBuilder {
    qubit_count: u32,
    gates: Vec<Gate>,
    registers: BTreeMap<String, Register>,
    ancillas: BTreeSet<QubitId>,
    pool: Vec<QubitId>,
    blocks: Vec<Block>,
    open: Vec<OpenBlock>,
    checks: Vec<ZeroCheck>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn qubit_count(&self) -> u32 {
        self.qubit_count
    }

    /// Number of gates pushed so far.
    pub fn position(&self) -> usize {
        self.gates.len()
    }

    /// Fresh qubits with no role.
    pub fn allocate_qubits(&mut self, width: usize) -> Vec<QubitId> {
        let start = self.qubit_count;
        self.qubit_count += width as u32;
        (start..self.qubit_count).map(QubitId).collect()
    }

    /// Fresh register of `width` new qubits under `role`.
    pub fn allocate_register(&mut self, width: usize, role: &str) -> Result<Register, CircuitError> {
        if width == 0 {
            return Err(CircuitError::ZeroWidth);
        }
        if self.registers.contains_key(role) {
            return Err(CircuitError::DuplicateRole(role.to_string()));
        }
        let qubits = self.allocate_qubits(width);
        let reg = Register::new(qubits)?;
        self.registers.insert(role.to_string(), reg.clone());
        Ok(reg)
    }

    /// Gives a role to already-allocated qubits.
    pub fn name_register(&mut self, role: &str, qubits: &[QubitId]) -> Result<Register, CircuitError> {
        if self.registers.contains_key(role) {
            return Err(CircuitError::DuplicateRole(role.to_string()));
        }
        let reg = Register::new(qubits.to_vec())?;
        self.registers.insert(role.to_string(), reg.clone());
        Ok(reg)
    }

    /// Zero-initialised scratch qubits, reused from the pool when possible.
    pub fn ancillas(&mut self, width: usize) -> Vec<QubitId> {
        let mut out = Vec::with_capacity(width);
        while out.len() < width {
            match self.pool.pop() {
                Some(q) => out.push(q),
                None => break,
            }
        }
        let fresh = width - out.len();
        let more = self.allocate_qubits(fresh);
        self.ancillas.extend(more.iter().copied());
        out.extend(more);
        out
    }

    /// Returns scratch qubits to the pool; they must be zero at this point.
    pub fn release(&mut self, qubits: &[QubitId]) {
        for &q in qubits {
            self.check_zero(q, CheckKind::Ancilla);
            self.pool.push(q);
        }
    }

    /// Declares working qubits that must enter and leave the circuit at zero.
    pub fn mark_ancillas(&mut self, qubits: &[QubitId]) {
        self.ancillas.extend(qubits.iter().copied());
    }

    pub fn check_zero(&mut self, qubit: QubitId, kind: CheckKind) {
        self.checks.push(ZeroCheck { position: self.gates.len(), qubit, kind });
    }

    /// Like [`CircuitBuilder::check_zero`] at an earlier `position`.
    pub fn check_zero_at(&mut self, position: usize, qubit: QubitId, kind: CheckKind) {
        assert!(position <= self.gates.len(), "check position {position} is ahead of the circuit");
        self.checks.push(ZeroCheck { position, qubit, kind });
    }

    pub fn begin_block(&mut self, label: impl Into<String>, charge: Option<f64>) {
        self.open.push(OpenBlock { label: label.into(), start: self.gates.len(), charge });
    }

    /// Closes the innermost block. Only outermost blocks reach the ledger.
    pub fn end_block(&mut self) {
        let open = self.open.pop().expect("end_block without begin_block");
        if self.open.is_empty() {
            self.blocks.push(Block {
                label: open.label,
                gates: open.start..self.gates.len(),
                charge: open.charge,
            });
        }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn not(&mut self, q: QubitId) {
        self.push(Gate::Not(q));
    }

    pub fn cnot(&mut self, control: QubitId, target: QubitId) {
        self.push(Gate::Cnot { control, target });
    }

    /// Fan-out; emits a plain CNOT for a single target and nothing for none.
    pub fn multi_cnot(&mut self, control: QubitId, targets: &[QubitId]) {
        match targets {
            [] => {}
            [t] => self.cnot(control, *t),
            _ => self.push(Gate::MultiCnot { control, targets: targets.to_vec() }),
        }
    }

    pub fn toffoli(&mut self, c1: QubitId, c2: QubitId, target: QubitId) {
        self.push(Gate::Toffoli { c1, c2, target });
    }

    pub fn and(&mut self, c1: QubitId, c2: QubitId, target: QubitId) {
        self.push(Gate::TempAnd { c1, c2, target });
    }

    pub fn unand(&mut self, c1: QubitId, c2: QubitId, target: QubitId) {
        self.push(Gate::TempAndUncompute { c1, c2, target });
    }

    /// Appends the inverse of the gates in `range`, mirroring its blocks
    /// (with `prefix` prepended to their labels) and zero checks.
    pub fn push_inverse_of(&mut self, range: Range<usize>, prefix: &str) {
        let offset = self.gates.len();
        let reversed: Vec<Gate> = self.gates[range.clone()].iter().rev().map(Gate::inverse).collect();
        let mirror = |i: usize| offset + (range.end - i);
        let blocks: Vec<Block> = self
            .blocks
            .iter()
            .filter(|b| b.gates.start >= range.start && b.gates.end <= range.end)
            .rev()
            .map(|b| Block {
                label: alloc::format!("{prefix}{}", b.label),
                gates: mirror(b.gates.end)..mirror(b.gates.start),
                charge: b.charge,
            })
            .collect();
        let checks: Vec<ZeroCheck> = self
            .checks
            .iter()
            .filter(|c| c.position >= range.start && c.position <= range.end)
            .map(|c| ZeroCheck { position: mirror(c.position), ..*c })
            .collect();
        self.gates.extend(reversed);
        self.blocks.extend(blocks);
        self.checks.extend(checks);
    }

    pub fn finish(self) -> Result<Circuit, CircuitError> {
        if let Some(open) = self.open.last() {
            return Err(CircuitError::OpenBlock(open.label.clone()));
        }
        Circuit::from_parts(
            self.qubit_count,
            self.gates,
            self.registers,
            self.ancillas,
            self.blocks,
            self.checks,
        )
    }
}
