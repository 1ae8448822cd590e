//! Schoolbook, mod `2^n` and Montgomery mod `p` multipliers.
//!
//! Each construction comes in two variants: [`Variant::Classic`] accumulates
//! partial products with controlled adders, [`Variant::AddSub`] with
//! controlled add-subtracts followed by a few cheap corrections and a
//! division by two that is only a relabelling of qubits.
//!
//! Every built circuit names its registers `x`, `y`, `result` (plus
//! `garbage` for mod `p`) and labels its stages for the resource ledger.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::blocks::{
    emit_add, emit_add_const, emit_add_plus_one, emit_controlled_add, emit_controlled_add_const,
    emit_controlled_addsub, emit_lookup, emit_sub, emit_unlookup,
};
use crate::error::CircuitError;
use crate::ir::{half_power_of_two, CheckKind, Circuit, CircuitBuilder, QubitId, Register, MAX_ADDRESS_WIDTH};
use crate::oracle::{is_prime, MontgomeryContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Classic,
    AddSub,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Schoolbook,
    Mod2n,
    ModP,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Schoolbook, Family::Mod2n, Family::ModP];

    pub fn name(self) -> &'static str {
        match self {
            Family::Schoolbook => "schoolbook",
            Family::Mod2n => "mod2n",
            Family::ModP => "modp",
        }
    }

    pub fn kind(self, variant: Variant) -> MultiplierKind {
        use MultiplierKind::*;
        match (self, variant) {
            (Family::Schoolbook, Variant::Classic) => SchoolbookClassic,
            (Family::Schoolbook, Variant::AddSub) => SchoolbookAddSub,
            (Family::Mod2n, Variant::Classic) => Mod2nClassic,
            (Family::Mod2n, Variant::AddSub) => Mod2nAddSub,
            (Family::ModP, Variant::Classic) => ModPClassic,
            (Family::ModP, Variant::AddSub) => ModPAddSub,
        }
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown multiplier family `{s}` (expected schoolbook, mod2n or modp)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MultiplierKind {
    SchoolbookClassic,
    SchoolbookAddSub,
    Mod2nClassic,
    Mod2nAddSub,
    ModPClassic,
    ModPAddSub,
}

impl MultiplierKind {
    pub const ALL: [MultiplierKind; 6] = [
        MultiplierKind::SchoolbookClassic,
        MultiplierKind::SchoolbookAddSub,
        MultiplierKind::Mod2nClassic,
        MultiplierKind::Mod2nAddSub,
        MultiplierKind::ModPClassic,
        MultiplierKind::ModPAddSub,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MultiplierKind::SchoolbookClassic => "schoolbook-classic",
            MultiplierKind::SchoolbookAddSub => "schoolbook-addsub",
            MultiplierKind::Mod2nClassic => "mod2n-classic",
            MultiplierKind::Mod2nAddSub => "mod2n-addsub",
            MultiplierKind::ModPClassic => "modp-classic",
            MultiplierKind::ModPAddSub => "modp-addsub",
        }
    }

    pub fn family(self) -> Family {
        match self {
            MultiplierKind::SchoolbookClassic | MultiplierKind::SchoolbookAddSub => Family::Schoolbook,
            MultiplierKind::Mod2nClassic | MultiplierKind::Mod2nAddSub => Family::Mod2n,
            MultiplierKind::ModPClassic | MultiplierKind::ModPAddSub => Family::ModP,
        }
    }

    pub fn variant(self) -> Variant {
        match self {
            MultiplierKind::SchoolbookClassic | MultiplierKind::Mod2nClassic | MultiplierKind::ModPClassic => {
                Variant::Classic
            }
            _ => Variant::AddSub,
        }
    }

    pub fn is_mod_p(self) -> bool {
        self.family() == Family::ModP
    }
}

impl fmt::Display for MultiplierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MultiplierKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        MultiplierKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown multiplier kind `{s}`"))
    }
}

/// Modulus, register width and window size of a mod-`p` multiplier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPParams {
    p: BigUint,
    n: u32,
    w: u32,
    prime: bool,
}

impl ModPParams {
    /// Accepts any odd `p` with `2^(n-1) < p < 2^n`; see [`ModPParams::is_prime`].
    pub fn new(p: BigUint, n: u32, w: u32) -> Result<Self, CircuitError> {
        let bad = |msg: String| Err(CircuitError::InvalidParams(msg));
        if n < 2 {
            return bad(format!("n = {n} must be at least 2"));
        }
        if p.is_even() {
            return bad(format!("modulus {p} must be odd"));
        }
        if p.bits() != n as u64 || p == BigUint::one() << (n - 1) {
            return bad(format!("modulus {p} must satisfy 2^{} < p < 2^{n}", n - 1));
        }
        if w == 0 || w > n {
            return bad(format!("window {w} must lie in 1..={n}"));
        }
        if w as usize > MAX_ADDRESS_WIDTH {
            return bad(format!("window {w} exceeds the lookup limit of {MAX_ADDRESS_WIDTH}"));
        }
        let prime = is_prime(&p);
        Ok(Self { p, n, w, prime })
    }

    /// Like [`ModPParams::new`] but also rejects composite moduli.
    pub fn new_strict(p: BigUint, n: u32, w: u32) -> Result<Self, CircuitError> {
        let params = Self::new(p, n, w)?;
        if !params.prime {
            return Err(CircuitError::InvalidParams(format!("modulus {} is not prime", params.p)));
        }
        Ok(params)
    }

    pub fn modulus(&self) -> &BigUint {
        &self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    pub fn is_prime(&self) -> bool {
        self.prime
    }

    pub fn steps(&self) -> u32 {
        self.n.div_ceil(self.w)
    }

    /// `(offset, width)` of each window of `x`; the last may be truncated.
    pub fn windows(&self) -> Vec<(u32, u32)> {
        (0..self.steps())
            .map(|k| {
                let offset = k * self.w;
                (offset, self.w.min(self.n - offset))
            })
            .collect()
    }

    pub fn context(&self) -> MontgomeryContext {
        MontgomeryContext::new(self.p.clone(), self.n).expect("validated parameters")
    }
}

fn input_registers(b: &mut CircuitBuilder, n: usize) -> Result<(Register, Register), CircuitError> {
    Ok((b.allocate_register(n, "x")?, b.allocate_register(n, "y")?))
}

fn output_register(b: &mut CircuitBuilder, role: &str, qubits: &[QubitId]) -> Result<Register, CircuitError> {
    let reg = b.name_register(role, qubits)?;
    for q in reg.iter() {
        b.check_zero(q, CheckKind::CleanInput);
    }
    Ok(reg)
}

/// Label of the last add-subtract of a cascade, used to locate the
/// intermediate value before corrections.
pub fn cascade_label(n: usize) -> String {
    format!("ctrl-addsub[{}]", n - 1)
}

/// `|x>|y>|0> -> |x>|y>|xy>`.
///
/// Classic: `n` controlled `n`-bit adders with carry-out, `2n^2 + n`
/// Toffolis. AddSub: `n` controlled add-subtracts produce
/// `2xy + 2^2n - 2^n (x + 1 + y) + y`, three corrections over a
/// `2n + 2`-bit work register bring it to `2xy`, and the low bit is dropped,
/// `n^2 + 4n + 3` Toffolis.
pub fn build_schoolbook(n: usize, variant: Variant) -> Result<Circuit, CircuitError> {
    if n == 0 {
        return Err(CircuitError::ZeroWidth);
    }
    let mut b = CircuitBuilder::new();
    let (x, y) = input_registers(&mut b, n)?;
    match variant {
        Variant::Classic => {
            let acc = b.allocate_qubits(2 * n);
            let result = output_register(&mut b, "result", &acc)?;
            for k in 0..n {
                b.begin_block(format!("ctrl-add[{k}]"), None);
                let window = &result.qubits()[k..k + n];
                emit_controlled_add(&mut b, x[k], y.qubits(), window, Some(result[k + n]));
                b.end_block();
            }
        }
        Variant::AddSub => {
            let work = b.allocate_qubits(2 * n + 2);
            output_register(&mut b, "result", &work[1..2 * n + 1])?;
            b.mark_ancillas(&[work[0], work[2 * n + 1]]);
            for k in 0..n {
                b.begin_block(format!("ctrl-addsub[{k}]"), None);
                emit_controlled_addsub(&mut b, x[k], y.qubits(), &work[k..k + n], Some(work[k + n]));
                b.end_block();
            }
            // Corrections are exact modulo 2^(2n+2), which holds the final 2xy.
            b.begin_block("correction[0]", None);
            emit_add_plus_one(&mut b, x.qubits(), &work[n..], None);
            b.end_block();
            b.begin_block("correction[1]", None);
            emit_sub(&mut b, y.qubits(), &work, None);
            // subtract 2^2n: decrement the top two bits
            b.not(work[2 * n]);
            b.cnot(work[2 * n], work[2 * n + 1]);
            b.end_block();
            b.begin_block("correction[2]", None);
            emit_add(&mut b, y.qubits(), &work[n..], None, None);
            b.end_block();
            b.check_zero(work[0], CheckKind::Relabel);
        }
    }
    b.finish()
}

/// `|x>|y>|0> -> |x>|y>|xy mod 2^n>`.
///
/// Classic: the `k`-th controlled adder shrinks to `n - k` bits without
/// carry-out, `n^2` Toffolis. AddSub: the cascade runs modulo `2^(n+1)` with
/// add-subtract widths `n, n-1, ..., 1`, the corrections reduce to two CNOT
/// fix-ups and one `n + 1`-bit subtraction, `0.5n^2 + 1.5n` Toffolis.
pub fn build_mod2n(n: usize, variant: Variant) -> Result<Circuit, CircuitError> {
    if n == 0 {
        return Err(CircuitError::ZeroWidth);
    }
    let mut b = CircuitBuilder::new();
    let (x, y) = input_registers(&mut b, n)?;
    match variant {
        Variant::Classic => {
            let acc = b.allocate_qubits(n);
            let result = output_register(&mut b, "result", &acc)?;
            for k in 0..n {
                b.begin_block(format!("ctrl-add[{k}]"), None);
                emit_controlled_add(&mut b, x[k], &y.qubits()[..n - k], &result.qubits()[k..], None);
                b.end_block();
            }
        }
        Variant::AddSub => {
            let work = b.allocate_qubits(n + 1);
            output_register(&mut b, "result", &work[1..])?;
            b.mark_ancillas(&[work[0]]);
            b.begin_block("ctrl-addsub[0]", None);
            emit_controlled_addsub(&mut b, x[0], y.qubits(), &work[..n], Some(work[n]));
            b.end_block();
            for k in 1..n {
                b.begin_block(format!("ctrl-addsub[{k}]"), None);
                emit_controlled_addsub(&mut b, x[k], &y.qubits()[..n + 1 - k], &work[k..], None);
                b.end_block();
            }
            // + 2^n (x + 1) = + 2^n (x_0 + 1) mod 2^(n+1)
            b.begin_block("correction[0]", None);
            b.cnot(x[0], work[n]);
            b.not(work[n]);
            b.end_block();
            // - (2^2n + y) = - y mod 2^(n+1)
            b.begin_block("correction[1]", None);
            emit_sub(&mut b, y.qubits(), &work, None);
            b.end_block();
            // + 2^n y = + 2^n y_0 mod 2^(n+1)
            b.begin_block("correction[2]", None);
            b.cnot(y[0], work[n]);
            b.end_block();
            b.check_zero(work[0], CheckKind::Relabel);
        }
    }
    b.finish()
}

/// Ledger charges of one Montgomery step, per stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StepCharges {
    pub cascade: f64,
    pub lookup: f64,
    pub adder: f64,
    pub unlookup: f64,
    /// AddSub only: `w`-bit adder, `n + w + 1`-bit subtraction, `n`-bit adder.
    pub corrections: Option<[f64; 3]>,
}

impl StepCharges {
    pub fn new(variant: Variant, n: u32, w: u32) -> Self {
        let (n, wf) = (n as f64, w as f64);
        let cascade = match variant {
            Variant::Classic => 2.0 * wf * (n + 1.0),
            Variant::AddSub => wf * (n + 1.0),
        };
        let corrections = match variant {
            Variant::Classic => None,
            Variant::AddSub => Some([wf - 1.0, n + wf, n - 1.0]),
        };
        Self {
            cascade,
            lookup: libm::ldexp(1.0, w as i32),
            adder: n + wf - 1.0,
            unlookup: 3.0 * half_power_of_two(w),
            corrections,
        }
    }

    pub fn total(&self) -> f64 {
        self.cascade + self.lookup + self.adder + self.unlookup + self.corrections.map_or(0.0, |c| c.iter().sum())
    }
}

struct StepIo<'a> {
    k: usize,
    n: usize,
    frame: &'a [QubitId],
    window: &'a [QubitId],
    y: &'a [QubitId],
    garbage: &'a [QubitId],
    table: Arc<Vec<BigUint>>,
}

/// One windowed Montgomery step on `frame`.
///
/// Classic: the accumulator `z < 2p` occupies `frame[0..n+1]`. After the
/// step `(z + x~ y + m p) / 2^w` occupies `frame[w..w+n+1]` and
/// `frame[0..w]` is zero.
///
/// AddSub: `frame[0]` is a zero bit below the accumulator, so the frame
/// holds `2z`. The cascade and corrections leave `2(z + x~ y)`, the low bit
/// is dropped, and the reduction proceeds on `frame[1..]`.
fn emit_step(b: &mut CircuitBuilder, variant: Variant, io: StepIo<'_>) {
    let StepIo { k, n, frame, window, y, garbage, table } = io;
    let w = window.len();
    let charges = StepCharges::new(variant, n as u32, w as u32);

    let reduce_frame = match variant {
        Variant::Classic => {
            debug_assert_eq!(frame.len(), n + w + 1);
            b.begin_block(format!("step[{k}]/cascade"), Some(charges.cascade));
            for (j, &ctrl) in window.iter().enumerate() {
                emit_controlled_add(b, ctrl, y, &frame[j..j + n + 1], Some(frame[j + n + 1]));
            }
            b.end_block();
            frame
        }
        Variant::AddSub => {
            debug_assert_eq!(frame.len(), n + w + 2);
            let [c0, c1, c2] = charges.corrections.expect("addsub corrections");
            let m = n + 2;
            b.begin_block(format!("step[{k}]/cascade"), Some(charges.cascade));
            for (j, &ctrl) in window.iter().enumerate() {
                emit_controlled_addsub(b, ctrl, y, &frame[j..j + m], Some(frame[j + m]));
            }
            b.end_block();
            // Corrections run modulo 2^(n+w+2), the frame width.
            b.begin_block(format!("step[{k}]/correction[0]"), Some(c0));
            emit_add_plus_one(b, window, &frame[m..], None);
            b.end_block();
            b.begin_block(format!("step[{k}]/correction[1]"), Some(c1));
            emit_sub(b, y, frame, None);
            b.end_block();
            b.begin_block(format!("step[{k}]/correction[2]"), Some(c2));
            emit_add(b, y, &frame[w..], None, None);
            b.end_block();
            b.check_zero(frame[0], CheckKind::Relabel);
            &frame[1..]
        }
    };

    b.begin_block(format!("step[{k}]/lookup"), Some(charges.lookup));
    for (&src, &dst) in reduce_frame.iter().zip(garbage) {
        b.cnot(src, dst);
    }
    let loaded = b.ancillas(n + w);
    emit_lookup(b, garbage, &loaded, table.clone());
    b.end_block();

    b.begin_block(format!("step[{k}]/adder"), Some(charges.adder));
    emit_add(b, &loaded, reduce_frame, None, None);
    b.end_block();
    for &q in &reduce_frame[..w] {
        b.check_zero(q, CheckKind::Relabel);
    }

    b.begin_block(format!("step[{k}]/unlookup"), Some(charges.unlookup));
    emit_unlookup(b, garbage, &loaded, table);
    b.end_block();
    b.release(&loaded);
}

fn step_frame_len(variant: Variant, n: usize, w: usize) -> usize {
    match variant {
        Variant::Classic => n + w + 1,
        Variant::AddSub => n + w + 2,
    }
}

struct ModPRegisters {
    result: Register,
}

fn emit_modp(b: &mut CircuitBuilder, params: &ModPParams, variant: Variant) -> Result<ModPRegisters, CircuitError> {
    let n = params.n() as usize;
    let (x, y) = input_registers(b, n)?;
    let ctx = params.context();

    // Accumulator z < 2p lives in n + 1 bits sliding up a 2n + 1 (classic)
    // or 2n + 2 (addsub, one extra bit below) qubit work register.
    let base = match variant {
        Variant::Classic => 0,
        Variant::AddSub => 1,
    };
    let work = b.allocate_qubits(2 * n + 1 + base);
    let garbage_qubits = b.allocate_qubits(n + 1);
    let result = output_register(b, "result", &work[base + n..base + 2 * n])?;
    let garbage = output_register(b, "garbage", &garbage_qubits)?;
    let spare: Vec<QubitId> = work.iter().copied().filter(|q| !result.qubits().contains(q)).collect();
    b.mark_ancillas(&spare);

    for (k, (offset, width)) in params.windows().into_iter().enumerate() {
        let (o, w) = (offset as usize, width as usize);
        let table = Arc::new(ctx.lookup_entries(width).expect("window within range"));
        let frame = &work[o..o + step_frame_len(variant, n, w)];
        emit_step(
            b,
            variant,
            StepIo {
                k,
                n,
                frame,
                window: &x.qubits()[o..o + w],
                y: y.qubits(),
                garbage: &garbage.qubits()[o..o + w],
                table,
            },
        );
    }

    // z < 2p in n + 1 bits: subtract p, keep the comparison bit in the
    // garbage register, add p back when z was already below p.
    let z = &work[base + n..base + 2 * n + 1];
    let flag = garbage[n];
    let p = params.modulus();
    let nf = n as f64;
    b.begin_block("reduction[0]", Some(nf));
    let complement = (BigUint::one() << (n + 1)) - p;
    emit_add_const(b, z, &complement, Some(flag))?;
    b.end_block();
    b.begin_block("reduction[1]", Some(nf));
    b.not(flag);
    emit_controlled_add_const(b, flag, z, p)?;
    b.not(flag);
    b.end_block();
    b.check_zero(z[n], CheckKind::Ancilla);

    Ok(ModPRegisters { result })
}

/// `|x>|y>|0>|0> -> |x>|y>|x y 2^-n mod p>|garbage>` for `x, y < p`.
///
/// The garbage register holds the `n` low accumulator bits consumed as
/// lookup addresses, followed by the final comparison bit.
pub fn build_modp(params: &ModPParams, variant: Variant) -> Result<Circuit, CircuitError> {
    let mut b = CircuitBuilder::new();
    emit_modp(&mut b, params, variant)?;
    b.finish()
}

/// Multiplies, copies the product into `copy` with CNOTs and runs the
/// multiplication backwards, leaving `result` and `garbage` at zero.
pub fn uncompute_garbage(params: &ModPParams, variant: Variant) -> Result<Circuit, CircuitError> {
    let mut b = CircuitBuilder::new();
    let regs = emit_modp(&mut b, params, variant)?;
    let forward = 0..b.position();
    let copy = b.allocate_register(params.n() as usize, "copy")?;
    for (&src, &dst) in regs.result.qubits().iter().zip(copy.qubits()) {
        b.cnot(src, dst);
    }
    b.push_inverse_of(forward.clone(), "uncompute/");
    for q in copy.iter() {
        b.check_zero_at(forward.end, q, CheckKind::CleanInput);
    }
    b.finish()
}

/// A standalone Montgomery step.
#[derive(Clone, Debug)]
pub struct ModMultStep {
    pub circuit: Circuit,
    /// Where the incoming accumulator `z` (`n + 1` bits) is loaded.
    pub z_in: Register,
    /// Where `(z + x~ y + m p) / 2^w` is read back.
    pub z_out: Register,
}

/// Step `k` of [`build_modp`] over registers `acc`, `xw` (the window of
/// `x`), `y` and `garbage`.
pub fn build_modmultstep(params: &ModPParams, k: u32, variant: Variant) -> Result<ModMultStep, CircuitError> {
    let windows = params.windows();
    let &(_, width) = windows
        .get(k as usize)
        .ok_or_else(|| CircuitError::InvalidParams(format!("step {k} out of range 0..{}", windows.len())))?;
    let (n, w) = (params.n() as usize, width as usize);
    let mut b = CircuitBuilder::new();
    let acc = b.allocate_register(step_frame_len(variant, n, w), "acc")?;
    let xw = b.allocate_register(w, "xw")?;
    let y = b.allocate_register(n, "y")?;
    let garbage_qubits = b.allocate_qubits(w);
    let garbage = output_register(&mut b, "garbage", &garbage_qubits)?;
    let table = Arc::new(params.context().lookup_entries(width).expect("window within range"));
    emit_step(
        &mut b,
        variant,
        StepIo { k: k as usize, n, frame: acc.qubits(), window: xw.qubits(), y: y.qubits(), garbage: garbage.qubits(), table },
    );
    let lift = match variant {
        Variant::Classic => 0,
        Variant::AddSub => 1,
    };
    let z_in = Register::new(acc.qubits()[lift..lift + n + 1].to_vec())?;
    let z_out = Register::new(acc.qubits()[lift + w..lift + w + n + 1].to_vec())?;
    Ok(ModMultStep { circuit: b.finish()?, z_in, z_out })
}

/// Builds any of the six multipliers; `params` is required for mod `p`.
pub fn build(kind: MultiplierKind, n: usize, params: Option<&ModPParams>) -> Result<Circuit, CircuitError> {
    match kind.family() {
        Family::Schoolbook => build_schoolbook(n, kind.variant()),
        Family::Mod2n => build_mod2n(n, kind.variant()),
        Family::ModP => {
            let params = params.ok_or_else(|| CircuitError::InvalidParams("mod-p kinds need (p, w)".into()))?;
            if params.n() as usize != n {
                return Err(CircuitError::InvalidParams(format!("n = {n} disagrees with modulus width {}", params.n())));
            }
            build_modp(params, kind.variant())
        }
    }
}
