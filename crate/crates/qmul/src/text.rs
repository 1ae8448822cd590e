//! Line-oriented circuit text format and its JSON twin.
//!
//! ```text
//! # qubits: 7
//! # register a: q0..q2
//! # register b: q3..q5
//! # ancilla: q6
//! # block add 0..4
//! # check 4 q6 ancilla
//! and q0 q3 q6
//! cnot q6 q4
//! unand q0 q3 q6
//! cnot q0 q3
//! lookup q0..q1 -> q3..q5 : 0,5,3,7
//! ```
//!
//! Qubit lists are comma separated; `qA..qB` is an inclusive ascending run.
//! A block line may end in `charge=<value>`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;
use qmul_core::{Block, CheckKind, Circuit, CircuitError, Gate, Lookup, QubitId, Register, ZeroCheck};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `# qubits:` header")]
    MissingQubitCount,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

fn qubit_list(qubits: &[QubitId]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < qubits.len() {
        let mut j = i;
        while j + 1 < qubits.len() && qubits[j + 1].0 == qubits[j].0 + 1 {
            j += 1;
        }
        if !out.is_empty() {
            out.push(',');
        }
        if j > i {
            let _ = write!(out, "{}..{}", qubits[i], qubits[j]);
        } else {
            let _ = write!(out, "{}", qubits[i]);
        }
        i = j + 1;
    }
    out
}

fn parse_qubit(s: &str) -> Option<QubitId> {
    s.strip_prefix('q')?.parse().ok().map(QubitId)
}

fn parse_qubit_list(s: &str) -> Option<Vec<QubitId>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        match item.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (parse_qubit(lo)?, parse_qubit(hi)?);
                if hi.0 < lo.0 {
                    return None;
                }
                out.extend((lo.0..=hi.0).map(QubitId));
            }
            None => out.push(parse_qubit(item)?),
        }
    }
    Some(out)
}

/// One gate in its text form.
pub fn gate_line(gate: &Gate) -> String {
    let lookup = |name: &str, l: &Lookup| {
        let values: Vec<String> = l.table.iter().map(ToString::to_string).collect();
        format!("{name} {} -> {} : {}", qubit_list(l.address.qubits()), qubit_list(l.target.qubits()), values.join(","))
    };
    match gate {
        Gate::Not(q) => format!("not {q}"),
        Gate::Cnot { control, target } => format!("cnot {control} {target}"),
        Gate::MultiCnot { control, targets } => {
            let mut s = format!("mcnot {control}");
            for t in targets {
                let _ = write!(s, " {t}");
            }
            s
        }
        Gate::Toffoli { c1, c2, target } => format!("tof {c1} {c2} {target}"),
        Gate::TempAnd { c1, c2, target } => format!("and {c1} {c2} {target}"),
        Gate::TempAndUncompute { c1, c2, target } => format!("unand {c1} {c2} {target}"),
        Gate::LookupLoad(l) => lookup("lookup", l),
        Gate::LookupUnload(l) => lookup("unlookup", l),
    }
}

/// Parses one gate line; `line` is only used in error messages.
pub fn parse_gate(text: &str, line: usize) -> Result<Gate, ParseError> {
    let (op, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    if op == "lookup" || op == "unlookup" {
        let (regs, values) = rest.split_once(':').ok_or_else(|| syntax(line, "lookup needs `: values`"))?;
        let (address, target) = regs.split_once("->").ok_or_else(|| syntax(line, "lookup needs `->`"))?;
        let register = |s: &str| {
            let qubits = parse_qubit_list(s.trim()).ok_or_else(|| syntax(line, format!("bad qubit list `{}`", s.trim())))?;
            Register::new(qubits).map_err(|e| syntax(line, e.to_string()))
        };
        let table = values
            .split(',')
            .map(|v| v.trim().parse::<BigUint>().map_err(|_| syntax(line, format!("bad table value `{}`", v.trim()))))
            .collect::<Result<Vec<_>, _>>()?;
        let l = Lookup { address: register(address)?, target: register(target)?, table: Arc::new(table) };
        return Ok(if op == "lookup" { Gate::LookupLoad(l) } else { Gate::LookupUnload(l) });
    }
    let qs = rest
        .split_whitespace()
        .map(|s| parse_qubit(s).ok_or_else(|| syntax(line, format!("bad qubit `{s}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let arity = |k: usize| {
        if qs.len() == k {
            Ok(())
        } else {
            Err(syntax(line, format!("`{op}` takes {k} qubits, got {}", qs.len())))
        }
    };
    Ok(match op {
        "not" => {
            arity(1)?;
            Gate::Not(qs[0])
        }
        "cnot" => {
            arity(2)?;
            Gate::Cnot { control: qs[0], target: qs[1] }
        }
        "mcnot" => {
            if qs.is_empty() {
                return Err(syntax(line, "`mcnot` needs a control"));
            }
            Gate::MultiCnot { control: qs[0], targets: qs[1..].to_vec() }
        }
        "tof" | "and" | "unand" => {
            arity(3)?;
            let (c1, c2, target) = (qs[0], qs[1], qs[2]);
            match op {
                "tof" => Gate::Toffoli { c1, c2, target },
                "and" => Gate::TempAnd { c1, c2, target },
                _ => Gate::TempAndUncompute { c1, c2, target },
            }
        }
        _ => return Err(syntax(line, format!("unknown gate `{op}`"))),
    })
}

pub fn emit(circuit: &Circuit) -> String {
    let mut out = format!("# qubits: {}\n", circuit.qubit_count());
    for (role, reg) in circuit.registers() {
        let _ = writeln!(out, "# register {role}: {}", qubit_list(reg.qubits()));
    }
    if !circuit.ancillas().is_empty() {
        let ancillas: Vec<QubitId> = circuit.ancillas().iter().copied().collect();
        let _ = writeln!(out, "# ancilla: {}", qubit_list(&ancillas));
    }
    for block in circuit.blocks() {
        let _ = write!(out, "# block {} {}..{}", block.label, block.gates.start, block.gates.end);
        if let Some(charge) = block.charge {
            let _ = write!(out, " charge={charge}");
        }
        out.push('\n');
    }
    for check in circuit.checks() {
        let _ = writeln!(out, "# check {} {} {}", check.position, check.qubit, check.kind.name());
    }
    for gate in circuit.gates() {
        out.push_str(&gate_line(gate));
        out.push('\n');
    }
    out
}

fn parse_range(s: &str) -> Option<std::ops::Range<usize>> {
    let (a, b) = s.split_once("..")?;
    Some(a.parse().ok()?..b.parse().ok()?)
}

pub fn parse(src: &str) -> Result<Circuit, ParseError> {
    let mut qubits = None;
    let mut gates = Vec::new();
    let mut registers = BTreeMap::new();
    let mut ancillas = BTreeSet::new();
    let mut blocks = Vec::new();
    let mut checks = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim();
        if text.is_empty() {
            continue;
        }
        let Some(header) = text.strip_prefix('#') else {
            gates.push(parse_gate(text, line)?);
            continue;
        };
        let header = header.trim();
        if let Some(v) = header.strip_prefix("qubits:") {
            qubits = Some(v.trim().parse::<u32>().map_err(|_| syntax(line, "bad qubit count"))?);
        } else if let Some(v) = header.strip_prefix("register ") {
            let (role, list) = v.split_once(':').ok_or_else(|| syntax(line, "register needs `role: qubits`"))?;
            let list = parse_qubit_list(list.trim()).ok_or_else(|| syntax(line, "bad qubit list"))?;
            let reg = Register::new(list).map_err(|e| syntax(line, e.to_string()))?;
            if registers.insert(role.trim().to_string(), reg).is_some() {
                return Err(syntax(line, format!("register `{}` declared twice", role.trim())));
            }
        } else if let Some(v) = header.strip_prefix("ancilla:") {
            ancillas.extend(parse_qubit_list(v.trim()).ok_or_else(|| syntax(line, "bad qubit list"))?);
        } else if let Some(v) = header.strip_prefix("block ") {
            let mut parts: Vec<&str> = v.split_whitespace().collect();
            let charge = match parts.last().and_then(|p| p.strip_prefix("charge=")) {
                Some(c) => {
                    let c = c.parse::<f64>().map_err(|_| syntax(line, "bad charge"))?;
                    parts.pop();
                    Some(c)
                }
                None => None,
            };
            let [label, range] = parts[..] else {
                return Err(syntax(line, "block needs `label start..end`"));
            };
            let gates = parse_range(range).ok_or_else(|| syntax(line, "bad gate range"))?;
            blocks.push(Block { label: label.to_string(), gates, charge });
        } else if let Some(v) = header.strip_prefix("check ") {
            let parts: Vec<&str> = v.split_whitespace().collect();
            let [pos, q, kind] = parts[..] else {
                return Err(syntax(line, "check needs `position qubit kind`"));
            };
            checks.push(ZeroCheck {
                position: pos.parse().map_err(|_| syntax(line, "bad position"))?,
                qubit: parse_qubit(q).ok_or_else(|| syntax(line, "bad qubit"))?,
                kind: CheckKind::from_name(kind).ok_or_else(|| syntax(line, format!("unknown check `{kind}`")))?,
            });
        }
        // other comment lines are ignored
    }
    let qubits = qubits.ok_or(ParseError::MissingQubitCount)?;
    Ok(Circuit::from_parts(qubits, gates, registers, ancillas, blocks, checks)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDoc {
    pub label: String,
    pub start: usize,
    pub end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckDoc {
    pub position: usize,
    pub qubit: u32,
    pub kind: String,
}

/// JSON form: headers as fields, gates as text lines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitDoc {
    pub qubits: u32,
    pub registers: BTreeMap<String, Vec<u32>>,
    #[serde(default)]
    pub ancillas: Vec<u32>,
    #[serde(default)]
    pub blocks: Vec<BlockDoc>,
    #[serde(default)]
    pub checks: Vec<CheckDoc>,
    pub gates: Vec<String>,
}

impl CircuitDoc {
    pub fn from_circuit(c: &Circuit) -> Self {
        let ids = |qs: &[QubitId]| qs.iter().map(|q| q.0).collect::<Vec<_>>();
        Self {
            qubits: c.qubit_count(),
            registers: c.registers().iter().map(|(k, r)| (k.clone(), ids(r.qubits()))).collect(),
            ancillas: c.ancillas().iter().map(|q| q.0).collect(),
            blocks: c
                .blocks()
                .iter()
                .map(|b| BlockDoc { label: b.label.clone(), start: b.gates.start, end: b.gates.end, charge: b.charge })
                .collect(),
            checks: c
                .checks()
                .iter()
                .map(|k| CheckDoc { position: k.position, qubit: k.qubit.0, kind: k.kind.name().to_string() })
                .collect(),
            gates: c.gates().iter().map(gate_line).collect(),
        }
    }

    pub fn to_circuit(&self) -> Result<Circuit, ParseError> {
        let qs = |v: &[u32]| v.iter().copied().map(QubitId).collect::<Vec<_>>();
        let registers = self
            .registers
            .iter()
            .map(|(k, v)| Ok((k.clone(), Register::new(qs(v))?)))
            .collect::<Result<BTreeMap<_, _>, CircuitError>>()?;
        let gates = self
            .gates
            .iter()
            .enumerate()
            .map(|(i, g)| parse_gate(g, i + 1))
            .collect::<Result<Vec<_>, _>>()?;
        let blocks = self
            .blocks
            .iter()
            .map(|b| Block { label: b.label.clone(), gates: b.start..b.end, charge: b.charge })
            .collect();
        let checks = self
            .checks
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let kind = CheckKind::from_name(&c.kind).ok_or_else(|| syntax(i + 1, format!("unknown check `{}`", c.kind)))?;
                Ok(ZeroCheck { position: c.position, qubit: QubitId(c.qubit), kind })
            })
            .collect::<Result<Vec<_>, ParseError>>()?;
        Ok(Circuit::from_parts(self.qubits, gates, registers, qs(&self.ancillas).into_iter().collect(), blocks, checks)?)
    }
}

pub fn emit_json(circuit: &Circuit) -> String {
    serde_json::to_string_pretty(&CircuitDoc::from_circuit(circuit)).expect("circuit documents serialize")
}

pub fn parse_json(src: &str) -> Result<Circuit, ParseError> {
    serde_json::from_str::<CircuitDoc>(src)?.to_circuit()
}
