//! Adder-family building blocks and table lookups.
//!
//! The `emit_*` functions append a block to an existing builder and are
//! what the multipliers compose. The `build_*` functions wrap one block in a
//! standalone circuit with named registers `a`, `b`, `ctrl`, `carry`, `cin`
//! (adders) or `address`, `target` (lookups).
//!
//! All adders are Gidney ripple-carry adders: one temporary AND per internal
//! carry, uncomputed by measurement at no Toffoli cost. When an addend is
//! narrower than the target it is zero-extended with scratch qubits.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::CircuitError;
use crate::ir::{CheckKind, Circuit, CircuitBuilder, Gate, Lookup, QubitId, Register};

fn pad(b: &mut CircuitBuilder, a: &[QubitId], width: usize) -> (Vec<QubitId>, Vec<QubitId>) {
    assert!(a.len() <= width, "addend wider than target");
    let pads = b.ancillas(width - a.len());
    let mut full = a.to_vec();
    full.extend_from_slice(&pads);
    (full, pads)
}

/// `t <- t + a (+ cin)` for equal widths. Costs `n - 1` temporary ANDs plus
/// one Toffoli into `carry_out` when present. With a nonzero `carry_out` the
/// carry is XORed in, which is addition mod `2^(n+1)` over `t ++ [carry_out]`.
fn gidney(b: &mut CircuitBuilder, a: &[QubitId], t: &[QubitId], cin: Option<QubitId>, carry_out: Option<QubitId>) {
    let n = a.len();
    assert!(n >= 1 && t.len() == n);
    let internal = b.ancillas(n - 1);
    let carry = |i: usize| if i == 0 { cin } else { Some(internal[i - 1]) };

    for i in 0..n - 1 {
        let next = internal[i];
        match carry(i) {
            Some(c) => {
                b.cnot(c, a[i]);
                b.cnot(c, t[i]);
                b.and(a[i], t[i], next);
                b.cnot(c, next);
            }
            None => b.and(a[i], t[i], next),
        }
    }

    let top = n - 1;
    match (carry(top), carry_out) {
        (Some(c), Some(out)) => {
            b.cnot(c, a[top]);
            b.cnot(c, t[top]);
            b.toffoli(a[top], t[top], out);
            b.cnot(c, out);
            b.cnot(c, a[top]);
            b.cnot(a[top], t[top]);
        }
        (None, Some(out)) => {
            b.toffoli(a[top], t[top], out);
            b.cnot(a[top], t[top]);
        }
        (Some(c), None) => {
            b.cnot(c, t[top]);
            b.cnot(a[top], t[top]);
        }
        (None, None) => b.cnot(a[top], t[top]),
    }

    for i in (0..n - 1).rev() {
        let next = internal[i];
        match carry(i) {
            Some(c) => {
                b.cnot(c, next);
                b.unand(a[i], t[i], next);
                b.cnot(c, a[i]);
                b.cnot(a[i], t[i]);
            }
            None => {
                b.unand(a[i], t[i], next);
                b.cnot(a[i], t[i]);
            }
        }
    }
    b.release(&internal);
}

/// `t <- t + a + cin`, mod `2^|t|` or exact into `carry_out`.
pub fn emit_add(b: &mut CircuitBuilder, a: &[QubitId], t: &[QubitId], cin: Option<QubitId>, carry_out: Option<QubitId>) {
    let (a, pads) = pad(b, a, t.len());
    gidney(b, &a, t, cin, carry_out);
    b.release(&pads);
}

/// `t <- t + a + 1` with the input carry held in a scratch qubit set to one.
pub fn emit_add_plus_one(b: &mut CircuitBuilder, a: &[QubitId], t: &[QubitId], carry_out: Option<QubitId>) {
    let one = b.ancillas(1);
    b.not(one[0]);
    emit_add(b, a, t, Some(one[0]), carry_out);
    b.not(one[0]);
    b.release(&one);
}

/// `t <- t - a mod 2^|t|`, or `t + 2^|t| - a` over `t ++ [borrow_out]`.
///
/// Complements `t` around an ordinary adder, so `a` is preserved.
pub fn emit_sub(b: &mut CircuitBuilder, a: &[QubitId], t: &[QubitId], borrow_out: Option<QubitId>) {
    t.iter().for_each(|&q| b.not(q));
    emit_add(b, a, t, None, borrow_out);
    t.iter().chain(borrow_out.iter()).for_each(|&q| b.not(q));
}

/// `t <- t + ctrl * a`.
///
/// The controlled addend `ctrl AND a` is materialised in scratch qubits
/// (one AND per target bit, the carry bit included) and added with an
/// uncontrolled adder, for `2m - 1` Toffolis over an `m`-bit target.
pub fn emit_controlled_add(
    b: &mut CircuitBuilder,
    ctrl: QubitId,
    a: &[QubitId],
    t: &[QubitId],
    carry_out: Option<QubitId>,
) {
    let mut target = t.to_vec();
    target.extend(carry_out);
    let (a, pads) = pad(b, a, target.len());
    let gated = b.ancillas(target.len());
    for (&ai, &gi) in a.iter().zip(&gated) {
        b.and(ctrl, ai, gi);
    }
    gidney(b, &gated, &target, None, None);
    for (&ai, &gi) in a.iter().zip(&gated).rev() {
        b.unand(ctrl, ai, gi);
    }
    b.release(&gated);
    b.release(&pads);
}

/// `ctrl = 1`: `t <- t + a`; `ctrl = 0`: `t <- t + 2^|t| - a` (with carry-out)
/// or `t - a mod 2^|t|` (without). Two fan-outs around a plain adder.
pub fn emit_controlled_addsub(
    b: &mut CircuitBuilder,
    ctrl: QubitId,
    a: &[QubitId],
    t: &[QubitId],
    carry_out: Option<QubitId>,
) {
    b.not(ctrl);
    b.multi_cnot(ctrl, t);
    b.not(ctrl);
    emit_add(b, a, t, None, carry_out);
    let mut flipped = t.to_vec();
    flipped.extend(carry_out);
    b.not(ctrl);
    b.multi_cnot(ctrl, &flipped);
    b.not(ctrl);
}

fn set_bits(c: &BigUint, width: usize) -> impl Iterator<Item = usize> + '_ {
    (0..width).filter(move |&k| c.bit(k as u64))
}

fn check_constant(c: &BigUint, width: usize) -> Result<(), CircuitError> {
    if c.bits() > width as u64 {
        return Err(CircuitError::ConstantOutOfRange { constant: alloc::format!("{c}"), width });
    }
    Ok(())
}

/// `t <- t + c`, with the constant written into scratch qubits by NOT gates.
pub fn emit_add_const(
    b: &mut CircuitBuilder,
    t: &[QubitId],
    c: &BigUint,
    carry_out: Option<QubitId>,
) -> Result<(), CircuitError> {
    check_constant(c, t.len())?;
    if c.is_zero() {
        return Ok(());
    }
    let scratch = b.ancillas(t.len());
    let ones: Vec<QubitId> = set_bits(c, t.len()).map(|k| scratch[k]).collect();
    ones.iter().for_each(|&q| b.not(q));
    gidney(b, &scratch, t, None, carry_out);
    ones.iter().for_each(|&q| b.not(q));
    b.release(&scratch);
    Ok(())
}

/// `t <- t + ctrl * c mod 2^|t|`; the constant is fanned out from `ctrl`.
pub fn emit_controlled_add_const(
    b: &mut CircuitBuilder,
    ctrl: QubitId,
    t: &[QubitId],
    c: &BigUint,
) -> Result<(), CircuitError> {
    check_constant(c, t.len())?;
    if c.is_zero() {
        return Ok(());
    }
    let scratch = b.ancillas(t.len());
    let ones: Vec<QubitId> = set_bits(c, t.len()).map(|k| scratch[k]).collect();
    b.multi_cnot(ctrl, &ones);
    gidney(b, &scratch, t, None, None);
    b.multi_cnot(ctrl, &ones);
    b.release(&scratch);
    Ok(())
}

pub fn emit_lookup(b: &mut CircuitBuilder, address: &[QubitId], target: &[QubitId], table: Arc<Vec<BigUint>>) {
    b.push(Gate::LookupLoad(lookup(address, target, table)));
}

pub fn emit_unlookup(b: &mut CircuitBuilder, address: &[QubitId], target: &[QubitId], table: Arc<Vec<BigUint>>) {
    b.push(Gate::LookupUnload(lookup(address, target, table)));
}

fn lookup(address: &[QubitId], target: &[QubitId], table: Arc<Vec<BigUint>>) -> Lookup {
    Lookup {
        address: Register::new(address.to_vec()).expect("lookup address"),
        target: Register::new(target.to_vec()).expect("lookup target"),
        table,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CarryIn {
    Absent,
    /// A caller-supplied carry qubit, preserved by the adder.
    Qubit,
    /// Input carry fixed to one.
    One,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Control {
    None,
    Adder,
    AddSub,
}

/// Shape of one adder-family block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AdderSpec {
    pub width: usize,
    pub carry_out: bool,
    pub carry_in: CarryIn,
    pub controlled: Control,
}

impl AdderSpec {
    pub fn plain(width: usize, carry_out: bool) -> Self {
        Self { width, carry_out, carry_in: CarryIn::Absent, controlled: Control::None }
    }

    pub fn controlled(width: usize, carry_out: bool, controlled: Control) -> Self {
        Self { width, carry_out, carry_in: CarryIn::Absent, controlled }
    }

    /// Toffoli count as a function of the shape alone.
    pub fn toffoli_cost(&self) -> u64 {
        let n = self.width as u64;
        match (self.controlled, self.carry_out) {
            (Control::None | Control::AddSub, true) => n,
            (Control::None | Control::AddSub, false) => n - 1,
            (Control::Adder, true) => 2 * n + 1,
            (Control::Adder, false) => 2 * n - 1,
        }
    }

    pub fn build(&self) -> Result<Circuit, CircuitError> {
        match self.controlled {
            Control::None => build_adder(self.width, self.carry_out, self.carry_in),
            _ if self.carry_in != CarryIn::Absent => Err(CircuitError::InvalidParams(
                "controlled adders take no input carry".into(),
            )),
            Control::Adder => build_controlled_adder(self.width, self.carry_out),
            Control::AddSub => build_controlled_addsub(self.width, self.carry_out),
        }
    }
}

struct Operands {
    b: CircuitBuilder,
    ctrl: Option<QubitId>,
    a: Register,
    t: Register,
    carry: Option<QubitId>,
}

fn operands(n: usize, controlled: bool, carry_out: bool) -> Result<Operands, CircuitError> {
    let mut b = CircuitBuilder::new();
    let ctrl = if controlled { Some(b.allocate_register(1, "ctrl")?[0]) } else { None };
    let a = b.allocate_register(n, "a")?;
    let t = b.allocate_register(n, "b")?;
    let carry = if carry_out {
        let q = b.allocate_register(1, "carry")?[0];
        b.check_zero(q, CheckKind::CleanInput);
        Some(q)
    } else {
        None
    };
    Ok(Operands { b, ctrl, a, t, carry })
}

/// `|a>|b> -> |a>|a + b + c_in>`.
pub fn build_adder(n: usize, carry_out: bool, carry_in: CarryIn) -> Result<Circuit, CircuitError> {
    let Operands { mut b, a, t, carry, .. } = operands(n, false, carry_out)?;
    match carry_in {
        CarryIn::Absent => emit_add(&mut b, a.qubits(), t.qubits(), None, carry),
        CarryIn::Qubit => {
            let cin = b.allocate_register(1, "cin")?[0];
            emit_add(&mut b, a.qubits(), t.qubits(), Some(cin), carry);
        }
        CarryIn::One => emit_add_plus_one(&mut b, a.qubits(), t.qubits(), carry),
    }
    b.finish()
}

/// `|a>|b> -> |a>|b - a>`; with `borrow_out` the result is `b + 2^n - a`
/// over `n + 1` bits.
pub fn build_subtractor(n: usize, borrow_out: bool) -> Result<Circuit, CircuitError> {
    let Operands { mut b, a, t, carry, .. } = operands(n, false, borrow_out)?;
    emit_sub(&mut b, a.qubits(), t.qubits(), carry);
    b.finish()
}

pub fn build_controlled_adder(n: usize, carry_out: bool) -> Result<Circuit, CircuitError> {
    let Operands { mut b, ctrl, a, t, carry } = operands(n, true, carry_out)?;
    emit_controlled_add(&mut b, ctrl.unwrap(), a.qubits(), t.qubits(), carry);
    b.finish()
}

pub fn build_controlled_addsub(n: usize, carry_out: bool) -> Result<Circuit, CircuitError> {
    let Operands { mut b, ctrl, a, t, carry } = operands(n, true, carry_out)?;
    emit_controlled_addsub(&mut b, ctrl.unwrap(), a.qubits(), t.qubits(), carry);
    b.finish()
}

/// `|b> -> |b + c mod 2^n>`; `c = 0` gives an empty circuit.
pub fn build_const_adder(n: usize, c: &BigUint) -> Result<Circuit, CircuitError> {
    let mut b = CircuitBuilder::new();
    let t = b.allocate_register(n, "b")?;
    emit_add_const(&mut b, t.qubits(), c, None)?;
    b.finish()
}

/// A classical table addressed by a `w`-bit register.
#[derive(Clone, Debug, PartialEq)]
pub struct LookupSpec {
    address_width: usize,
    target_width: usize,
    table: Arc<Vec<BigUint>>,
}

impl LookupSpec {
    pub fn new(address_width: usize, target_width: usize, table: Vec<BigUint>) -> Result<Self, CircuitError> {
        if address_width == 0 || target_width == 0 {
            return Err(CircuitError::ZeroWidth);
        }
        if address_width > crate::ir::MAX_ADDRESS_WIDTH {
            return Err(CircuitError::AddressTooWide(address_width));
        }
        if table.len() != 1 << address_width {
            return Err(CircuitError::TableLength { index: 0, len: table.len(), expected: 1 << address_width });
        }
        if let Some(entry) = table.iter().position(|v| v.bits() > target_width as u64) {
            return Err(CircuitError::TableEntryTooWide { index: 0, entry, width: target_width });
        }
        Ok(Self { address_width, target_width, table: Arc::new(table) })
    }

    pub fn table(&self) -> &[BigUint] {
        &self.table
    }
}

fn lookup_circuit(spec: &LookupSpec, unload: bool) -> Result<Circuit, CircuitError> {
    let mut b = CircuitBuilder::new();
    let address = b.allocate_register(spec.address_width, "address")?;
    let target = b.allocate_register(spec.target_width, "target")?;
    b.begin_block(if unload { "unlookup[0]" } else { "lookup[0]" }, None);
    if unload {
        emit_unlookup(&mut b, address.qubits(), target.qubits(), spec.table.clone());
    } else {
        emit_lookup(&mut b, address.qubits(), target.qubits(), spec.table.clone());
    }
    b.end_block();
    b.finish()
}

/// `|t>|0> -> |t>|table[t]>`, charged `2^w`.
pub fn build_lookup(spec: &LookupSpec) -> Result<Circuit, CircuitError> {
    lookup_circuit(spec, false)
}

/// `|t>|table[t]> -> |t>|0>`, charged `3 * 2^(w/2)`.
pub fn build_lookup_uncompute(spec: &LookupSpec) -> Result<Circuit, CircuitError> {
    lookup_circuit(spec, true)
}
