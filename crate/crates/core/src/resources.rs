//! Toffoli accounting.
//!
//! Two totals are kept side by side. `counted_toffoli` is the integer number
//! of Toffoli and temporary-AND gates, with AND uncomputation free.
//! `nominal_toffoli` is the real-valued ledger total: block charges where a
//! block carries a fixed charge, gate charges (including lookup charges)
//! everywhere else. For circuits without lookups or charged blocks the two
//! agree exactly.

use alloc::string::String;
use alloc::vec::Vec;

use crate::ir::{Circuit, Gate};

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry {
    pub label: String,
    pub nominal: f64,
    pub counted: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResourceReport {
    pub counted_toffoli: u64,
    /// Every logical Toffoli costs 1, AND uncomputation included.
    pub strict_toffoli: u64,
    pub nominal_toffoli: f64,
    pub qubit_count: u32,
    pub gate_count: usize,
    /// Per-label totals in order of first appearance.
    pub block_ledger: Vec<LedgerEntry>,
}

impl ResourceReport {
    pub fn ledger(&self, label: &str) -> Option<&LedgerEntry> {
        self.block_ledger.iter().find(|e| e.label == label)
    }
}

pub fn count_resources(circuit: &Circuit) -> ResourceReport {
    let gates = circuit.gates();
    let counted = |gs: &[Gate]| gs.iter().filter(|g| g.is_counted_toffoli()).count() as u64;
    let nominal = |gs: &[Gate]| gs.iter().map(Gate::nominal_toffoli).sum::<f64>();

    let mut ledger: Vec<LedgerEntry> = Vec::new();
    let mut in_block = alloc::vec![false; gates.len()];
    let mut nominal_total = 0.0;
    for block in circuit.blocks() {
        let slice = &gates[block.gates.clone()];
        in_block[block.gates.clone()].iter_mut().for_each(|b| *b = true);
        let cost = block.charge.unwrap_or_else(|| nominal(slice));
        let count = counted(slice);
        nominal_total += cost;
        match ledger.iter_mut().find(|e| e.label == block.label) {
            Some(e) => {
                e.nominal += cost;
                e.counted += count;
            }
            None => ledger.push(LedgerEntry { label: block.label.clone(), nominal: cost, counted: count }),
        }
    }
    nominal_total += gates
        .iter()
        .zip(&in_block)
        .filter(|(_, inside)| !**inside)
        .map(|(g, _)| g.nominal_toffoli())
        .sum::<f64>();

    ResourceReport {
        counted_toffoli: counted(gates),
        strict_toffoli: gates.iter().filter(|g| g.is_logical_toffoli()).count() as u64,
        nominal_toffoli: nominal_total,
        qubit_count: circuit.qubit_count(),
        gate_count: gates.len(),
        block_ledger: ledger,
    }
}
