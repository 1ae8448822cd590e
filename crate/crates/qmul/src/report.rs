//! JSON report documents.
//!
//! Register values are decimal strings so arbitrarily wide values survive
//! any JSON reader.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use qmul_core::estimator::{formula_toffoli, optimal_window, reconcile, window_approximation};
use qmul_core::oracle::largest_prime_of_width;
use qmul_core::{EstimateError, ModPParams, MultiplierKind, Variant};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carry_out: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub inputs: BTreeMap<String, String>,
    pub register: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub inputs: BTreeMap<String, String>,
    pub position: usize,
    pub qubit: u32,
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub kind: String,
    pub n: u32,
    pub params: ReportParams,
    /// `exhaustive` or `randomized`.
    pub mode: String,
    pub seed: Option<u64>,
    pub cases_run: u64,
    pub mismatches: Vec<Mismatch>,
    pub ancilla_violations: Vec<ViolationRecord>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.ancilla_violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerCost {
    pub label: String,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub kind: String,
    pub n: u32,
    pub w: Option<u32>,
    pub formula: f64,
    /// Measured on a built circuit; absent above [`MAX_BUILD_WIDTH`].
    pub counted: Option<u64>,
    pub nominal: Option<f64>,
    pub ledger: Vec<LedgerCost>,
    pub reduction_vs_classic: f64,
    /// Mod `p`: sum of per-stage charges, and `log2(n / log2 n) + 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage_ledger: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_approximation: Option<f64>,
}

/// Widest circuit `estimate` will build to measure counts.
pub const MAX_BUILD_WIDTH: u32 = 256;

impl EstimateReport {
    /// `w` defaults to the optimal window and `p` to the largest prime of
    /// width `n` for mod-`p` kinds.
    pub fn new(kind: MultiplierKind, n: u32, w: Option<u32>, p: Option<BigUint>) -> Result<Self, EstimateError> {
        let w = match (kind.is_mod_p(), w) {
            (true, Some(w)) => Some(w),
            (true, None) => Some(optimal_window(kind, n)?.w),
            (false, Some(_)) => return Err(EstimateError::NotModP(kind.name())),
            (false, None) => None,
        };
        let formula = formula_toffoli(kind, n, w)?;
        let classic = formula_toffoli(kind.family().kind(Variant::Classic), n, w)?;
        let mut report = Self {
            kind: kind.name().to_string(),
            n,
            w,
            formula,
            counted: None,
            nominal: None,
            ledger: Vec::new(),
            reduction_vs_classic: 1.0 - formula / classic,
            stage_ledger: None,
            window_approximation: kind.is_mod_p().then(|| window_approximation(n)),
        };
        if n <= MAX_BUILD_WIDTH {
            let params = match w {
                Some(w) => {
                    let p = p.unwrap_or_else(|| largest_prime_of_width(n));
                    Some(ModPParams::new(p, n, w)?)
                }
                None => None,
            };
            let r = reconcile(kind, n, params.as_ref())?;
            report.counted = Some(r.counted);
            report.nominal = Some(r.nominal);
            report.stage_ledger = r.stage_ledger;
            report.ledger = r.ledger.into_iter().map(|e| LedgerCost { label: e.label, cost: e.nominal }).collect();
        }
        Ok(report)
    }
}

/// One row of a window sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowRow {
    pub w: u32,
    pub formula: f64,
    pub optimal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossoverReport {
    pub pair: String,
    pub threshold: f64,
    pub n: u32,
    pub reduction: f64,
}
