//! Closed-form Toffoli counts, window optimisation and crossover search.
//!
//! [`formula_toffoli`] evaluates the published cost expressions verbatim.
//! [`ledger_toffoli`] sums the per-stage charges that the mod-`p` circuits
//! attach to their blocks; it differs from the closed form by `n` for the
//! classic variant and the difference is reported, not hidden.

use alloc::vec::Vec;

use crate::error::EstimateError;
use crate::ir::half_power_of_two;
use crate::multipliers::{build, Family, ModPParams, MultiplierKind, StepCharges, Variant};
use crate::resources::{count_resources, LedgerEntry};

fn pow2(w: u32) -> f64 {
    libm::ldexp(1.0, w as i32)
}

/// Published Toffoli count of `kind` at width `n`. `w` is required for the
/// mod-`p` kinds and rejected otherwise; `n / w` is real division.
pub fn formula_toffoli(kind: MultiplierKind, n: u32, w: Option<u32>) -> Result<f64, EstimateError> {
    if n == 0 {
        return Err(EstimateError::WidthTooSmall(1));
    }
    let nf = n as f64;
    match (kind.family(), w) {
        (Family::ModP, None) => Err(EstimateError::MissingWindow),
        (Family::ModP, Some(0)) => Err(EstimateError::MissingWindow),
        (_, Some(_)) if !kind.is_mod_p() => Err(EstimateError::NotModP(kind.name())),
        (Family::Schoolbook, None) => Ok(match kind.variant() {
            Variant::Classic => 2.0 * nf * nf + nf,
            Variant::AddSub => nf * nf + 4.0 * nf + 3.0,
        }),
        (Family::Mod2n, None) => Ok(match kind.variant() {
            Variant::Classic => nf * nf,
            Variant::AddSub => 0.5 * nf * nf + 1.5 * nf,
        }),
        (_, Some(w)) => {
            let steps = nf / w as f64;
            let lookups = pow2(w) + 3.0 * half_power_of_two(w);
            Ok(match kind.variant() {
                Variant::Classic => 2.0 * nf * nf + 4.0 * nf + steps * (lookups + nf - 1.0),
                Variant::AddSub => nf * nf + 6.0 * nf + steps * (lookups + 3.0 * nf - 3.0),
            })
        }
    }
}

/// Sum of the per-stage charges of a mod-`p` circuit: every step of width
/// `min(w, n - offset)` plus the two reduction additions of `n` each.
pub fn ledger_toffoli(kind: MultiplierKind, n: u32, w: u32) -> Result<f64, EstimateError> {
    if !kind.is_mod_p() {
        return Err(EstimateError::NotModP(kind.name()));
    }
    if n < 2 {
        return Err(EstimateError::WidthTooSmall(2));
    }
    if w == 0 || w > n {
        return Err(EstimateError::MissingWindow);
    }
    let mut total = 2.0 * n as f64;
    let mut offset = 0;
    while offset < n {
        let width = w.min(n - offset);
        total += StepCharges::new(kind.variant(), n, width).total();
        offset += width;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reconciliation {
    pub kind: MultiplierKind,
    pub n: u32,
    pub w: Option<u32>,
    pub formula: f64,
    pub counted: u64,
    pub strict: u64,
    pub nominal: f64,
    /// Mod-`p` only: the per-stage charge sum the circuit ledger must match.
    pub stage_ledger: Option<f64>,
    /// `stage_ledger - formula` (mod `p`) or `counted - formula` (otherwise).
    pub offset: f64,
    pub ledger: Vec<LedgerEntry>,
    pub consistent: bool,
}

pub const LEDGER_TOLERANCE: f64 = 1e-9;

/// Builds the circuit and checks its counts: exact integer equality with
/// the closed form for lookup-free kinds, equality of the nominal total
/// with [`ledger_toffoli`] for mod-`p` kinds.
pub fn reconcile(kind: MultiplierKind, n: u32, params: Option<&ModPParams>) -> Result<Reconciliation, EstimateError> {
    let w = params.map(ModPParams::w);
    if !kind.is_mod_p() && w.is_some() {
        return Err(EstimateError::NotModP(kind.name()));
    }
    let circuit = build(kind, n as usize, params)?;
    let report = count_resources(&circuit);
    let formula = formula_toffoli(kind, n, w)?;
    let (stage_ledger, offset, consistent) = match w {
        Some(w) => {
            let stages = ledger_toffoli(kind, n, w)?;
            (Some(stages), stages - formula, (report.nominal_toffoli - stages).abs() <= LEDGER_TOLERANCE)
        }
        None => (None, report.counted_toffoli as f64 - formula, report.counted_toffoli as f64 == formula),
    };
    Ok(Reconciliation {
        kind,
        n,
        w,
        formula,
        counted: report.counted_toffoli,
        strict: report.strict_toffoli,
        nominal: report.nominal_toffoli,
        stage_ledger,
        offset,
        ledger: report.block_ledger,
        consistent,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowChoice {
    pub w: u32,
    pub toffoli: f64,
    /// `log2(n / log2 n) + 2`.
    pub approximation: f64,
}

pub fn window_approximation(n: u32) -> f64 {
    let nf = n as f64;
    libm::log2(nf / libm::log2(nf)) + 2.0
}

/// The `w` in `1..=n` minimising [`formula_toffoli`], smallest on ties.
pub fn optimal_window(kind: MultiplierKind, n: u32) -> Result<WindowChoice, EstimateError> {
    if !kind.is_mod_p() {
        return Err(EstimateError::NotModP(kind.name()));
    }
    if n < 2 {
        return Err(EstimateError::WidthTooSmall(2));
    }
    let mut best = WindowChoice { w: 1, toffoli: formula_toffoli(kind, n, Some(1))?, approximation: window_approximation(n) };
    for w in 2..=n {
        let toffoli = formula_toffoli(kind, n, Some(w))?;
        if toffoli < best.toffoli {
            best.w = w;
            best.toffoli = toffoli;
        }
    }
    Ok(best)
}

/// `1 - addsub / classic` for one family. For mod `p` each variant uses its
/// own optimal window unless `w` is given.
pub fn reduction(family: Family, n: u32, w: Option<u32>) -> Result<f64, EstimateError> {
    let cost = |variant| {
        let kind = family.kind(variant);
        if family != Family::ModP {
            return formula_toffoli(kind, n, None);
        }
        match w {
            Some(w) => formula_toffoli(kind, n, Some(w)),
            None => optimal_window(kind, n).map(|c| c.toffoli),
        }
    };
    Ok(1.0 - cost(Variant::AddSub)? / cost(Variant::Classic)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossover {
    pub n: u32,
    pub reduction: f64,
}

pub const DEFAULT_CROSSOVER_CAP: u32 = 4096;

/// Smallest `n >= 2` with `reduction(family, n) >= threshold`.
pub fn crossover(family: Family, threshold: f64, cap: u32) -> Result<Crossover, EstimateError> {
    if !(0.0..0.5).contains(&threshold) {
        return Err(EstimateError::BadThreshold(threshold));
    }
    for n in 2..=cap {
        let r = reduction(family, n, None)?;
        if r >= threshold {
            return Ok(Crossover { n, reduction: r });
        }
    }
    Err(EstimateError::Unreachable { threshold, cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::largest_prime_of_width;
    use MultiplierKind::*;

    #[test]
    fn formula_examples() {
        assert_eq!(formula_toffoli(SchoolbookAddSub, 8, None).unwrap(), 99.0);
        assert_eq!(formula_toffoli(Mod2nAddSub, 6, None).unwrap(), 27.0);
        assert_eq!(formula_toffoli(ModPAddSub, 64, Some(4)).unwrap(), 7952.0);
        assert_eq!(formula_toffoli(ModPClassic, 64, Some(4)).unwrap(), 9904.0);
        assert_eq!(formula_toffoli(ModPClassic, 64, None), Err(EstimateError::MissingWindow));
        assert!(matches!(formula_toffoli(Mod2nClassic, 4, Some(2)), Err(EstimateError::NotModP(_))));
    }

    #[test]
    fn stage_ledger_gap() {
        for (n, w) in [(8u32, 2u32), (12, 3), (64, 4), (64, 8)] {
            let classic = ledger_toffoli(ModPClassic, n, w).unwrap() - formula_toffoli(ModPClassic, n, Some(w)).unwrap();
            let addsub = ledger_toffoli(ModPAddSub, n, w).unwrap() - formula_toffoli(ModPAddSub, n, Some(w)).unwrap();
            assert!((classic - n as f64).abs() < 1e-9);
            assert!(addsub.abs() < 1e-9);
        }
    }

    #[test]
    fn reconcile_examples() {
        let r = reconcile(SchoolbookClassic, 5, None).unwrap();
        assert_eq!((r.counted, r.formula, r.consistent), (55, 55.0, true));
        let r = reconcile(Mod2nClassic, 7, None).unwrap();
        assert_eq!((r.counted, r.formula, r.consistent), (49, 49.0, true));
        let params = ModPParams::new(largest_prime_of_width(8), 8, 2).unwrap();
        let r = reconcile(ModPAddSub, 8, Some(&params)).unwrap();
        assert!(r.consistent);
        let cascade = r.ledger.iter().find(|e| e.label == "step[0]/cascade").unwrap();
        assert_eq!(cascade.nominal, 18.0);
    }

    #[test]
    fn window_examples() {
        assert_eq!(window_approximation(256), 7.0);
        for kind in [ModPClassic, ModPAddSub] {
            let best = optimal_window(kind, 4).unwrap();
            let values: Vec<f64> = (1..=4).map(|w| formula_toffoli(kind, 4, Some(w)).unwrap()).collect();
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            assert_eq!(best.toffoli, min);
            assert_eq!(values[best.w as usize - 1], min);
        }
        assert!(optimal_window(SchoolbookClassic, 8).is_err());
    }

    #[test]
    fn crossover_examples() {
        assert_eq!(crossover(Family::Schoolbook, 0.0, 64).unwrap().n, 4);
        let c = crossover(Family::Schoolbook, 0.25, 64).unwrap();
        assert_eq!(c.n, 8);
        assert!((c.reduction - 37.0 / 136.0).abs() < 1e-12);
        assert_eq!(crossover(Family::Mod2n, 0.25, 64).unwrap().n, 6);
        let c = crossover(Family::ModP, 0.25, 1024).unwrap();
        assert!((63..=75).contains(&c.n));
        assert!(crossover(Family::Schoolbook, 0.5, 64).is_err());
        assert!(matches!(crossover(Family::Schoolbook, 0.45, 16), Err(EstimateError::Unreachable { .. })));
    }
}
