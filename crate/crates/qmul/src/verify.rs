//! Exhaustive and randomized differential verification.
//!
//! Every case is simulated with full ancilla checking and compared with
//! the classical oracle. Cases run on a rayon pool; results are collected
//! in case order, so reports do not depend on the number of workers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use qmul_core::blocks::{build_adder, build_controlled_adder, build_controlled_addsub, build_subtractor, CarryIn};
use qmul_core::multipliers::{build, Family};
use qmul_core::oracle::{mod2n_product, school_product, MontgomeryContext};
use qmul_core::{run, Circuit, CircuitError, ModPParams, MultiplierKind, SimError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::report::{Mismatch, ReportParams, VerificationReport, ViolationRecord};

pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Adder,
    Subtractor,
    ControlledAdder,
    ControlledAddSub,
}

impl BlockKind {
    pub const ALL: [BlockKind; 4] =
        [BlockKind::Adder, BlockKind::Subtractor, BlockKind::ControlledAdder, BlockKind::ControlledAddSub];

    pub fn name(self) -> &'static str {
        match self {
            BlockKind::Adder => "adder",
            BlockKind::Subtractor => "subtractor",
            BlockKind::ControlledAdder => "ctrl-adder",
            BlockKind::ControlledAddSub => "ctrl-addsub",
        }
    }

    fn controlled(self) -> bool {
        matches!(self, BlockKind::ControlledAdder | BlockKind::ControlledAddSub)
    }
}

/// What `verify` can check: a multiplier or an arithmetic block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Multiplier(MultiplierKind),
    Block(BlockKind),
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Multiplier(k) => k.name(),
            Target::Block(b) => b.name(),
        }
    }

    pub fn is_mod_p(self) -> bool {
        matches!(self, Target::Multiplier(k) if k.is_mod_p())
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(b) = BlockKind::ALL.into_iter().find(|b| b.name() == s) {
            return Ok(Target::Block(b));
        }
        s.parse().map(Target::Multiplier).map_err(|_| {
            let names: Vec<&str> = MultiplierKind::ALL
                .iter()
                .map(|k| k.name())
                .chain(BlockKind::ALL.iter().map(|b| b.name()))
                .collect();
            format!("unknown kind `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("{cases} cases exceed the exhaustive budget of {budget}")]
    BudgetExceeded { cases: u128, budget: u64 },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("{0} needs a modulus and window")]
    MissingParams(&'static str),
    #[error("n must be at least 1")]
    ZeroWidth,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("simulation failed: {0}")]
    Sim(SimError),
}

/// A target together with its width and, for mod `p`, its parameters.
#[derive(Clone, Debug)]
pub struct VerifySpec {
    pub target: Target,
    pub n: u32,
    pub params: Option<ModPParams>,
    /// Blocks only: keep the carry (or borrow) qubit.
    pub carry_out: bool,
}

type Inputs = Vec<(&'static str, BigUint)>;

enum Outcome {
    Pass,
    Mismatches(Vec<Mismatch>),
    Violation(ViolationRecord),
}

impl VerifySpec {
    pub fn new(target: Target, n: u32, params: Option<ModPParams>) -> Result<Self, VerifyError> {
        if n == 0 {
            return Err(VerifyError::ZeroWidth);
        }
        if target.is_mod_p() && params.is_none() {
            return Err(VerifyError::MissingParams(target.name()));
        }
        Ok(Self { target, n, params: if target.is_mod_p() { params } else { None }, carry_out: true })
    }

    pub fn with_carry_out(mut self, carry_out: bool) -> Self {
        self.carry_out = carry_out;
        self
    }

    pub fn build(&self) -> Result<Circuit, CircuitError> {
        let n = self.n as usize;
        match self.target {
            Target::Multiplier(kind) => build(kind, n, self.params.as_ref()),
            Target::Block(BlockKind::Adder) => build_adder(n, self.carry_out, CarryIn::Absent),
            Target::Block(BlockKind::Subtractor) => build_subtractor(n, self.carry_out),
            Target::Block(BlockKind::ControlledAdder) => build_controlled_adder(n, self.carry_out),
            Target::Block(BlockKind::ControlledAddSub) => build_controlled_addsub(n, self.carry_out),
        }
    }

    fn report_params(&self) -> ReportParams {
        ReportParams {
            p: self.params.as_ref().map(|p| p.modulus().to_string()),
            w: self.params.as_ref().map(ModPParams::w),
            carry_out: matches!(self.target, Target::Block(_)).then_some(self.carry_out),
        }
    }

    /// Exclusive bound on each of `x`/`y` or `a`/`b`.
    fn operand_bound(&self) -> BigUint {
        match &self.params {
            Some(p) => p.modulus().clone(),
            None => BigUint::one() << self.n,
        }
    }

    fn controls(&self) -> u32 {
        match self.target {
            Target::Block(b) if b.controlled() => 2,
            _ => 1,
        }
    }

    pub fn case_count(&self) -> u128 {
        let bound = self.operand_bound();
        let bound = u128::try_from(&bound).unwrap_or(u128::MAX);
        bound.saturating_mul(bound).saturating_mul(self.controls() as u128)
    }

    fn operand_names(&self) -> (&'static str, &'static str) {
        match self.target {
            Target::Multiplier(_) => ("x", "y"),
            Target::Block(_) => ("a", "b"),
        }
    }

    fn inputs(&self, ctrl: u32, first: BigUint, second: BigUint) -> Inputs {
        let (u, v) = self.operand_names();
        let mut inputs = vec![(u, first), (v, second)];
        if self.controls() == 2 {
            inputs.insert(0, ("ctrl", BigUint::from(ctrl)));
        }
        inputs
    }

    fn case(&self, index: u64) -> Inputs {
        let bound = u64::try_from(&self.operand_bound()).expect("exhaustive spaces fit in u64");
        let (rest, second) = (index / bound, index % bound);
        let (ctrl, first) = (rest / bound, rest % bound);
        self.inputs(ctrl as u32, BigUint::from(first), BigUint::from(second))
    }

    fn expected(&self, ctx: Option<&MontgomeryContext>, inputs: &Inputs) -> BTreeMap<&'static str, BigUint> {
        let get = |role: &str| inputs.iter().find(|(r, _)| *r == role).map(|(_, v)| v.clone()).unwrap_or_default();
        let n = self.n;
        let modulus = BigUint::one() << n;
        let mut out = BTreeMap::new();
        match self.target {
            Target::Multiplier(kind) => {
                let (x, y) = (get("x"), get("y"));
                let result = match kind.family() {
                    Family::Schoolbook => school_product(&x, &y),
                    Family::Mod2n => mod2n_product(&x, &y, n),
                    Family::ModP => ctx.expect("mod-p context").product(&x, &y).expect("reduced operands"),
                };
                out.insert("result", result);
                out.insert("x", x);
                out.insert("y", y);
            }
            Target::Block(block) => {
                let (a, b, ctrl) = (get("a"), get("b"), !get("ctrl").is_zero());
                let add = match block {
                    BlockKind::Adder => true,
                    BlockKind::Subtractor => false,
                    BlockKind::ControlledAdder => true,
                    BlockKind::ControlledAddSub => ctrl,
                };
                let value = if block == BlockKind::ControlledAdder && !ctrl {
                    b.clone()
                } else if add {
                    &b + &a
                } else {
                    &b + &modulus - &a
                };
                if self.carry_out {
                    out.insert("b", &value % &modulus);
                    out.insert("carry", value >> n);
                } else {
                    out.insert("b", value % &modulus);
                }
                out.insert("a", a);
            }
        }
        out
    }

    fn check(&self, circuit: &Circuit, ctx: Option<&MontgomeryContext>, inputs: &Inputs) -> Result<Outcome, VerifyError> {
        let named = || inputs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect::<BTreeMap<_, _>>();
        let map = inputs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        let actual = match run(circuit, &map) {
            Ok(actual) => actual,
            Err(SimError::Violation(v)) => {
                return Ok(Outcome::Violation(ViolationRecord {
                    inputs: named(),
                    position: v.position,
                    qubit: v.qubit.0,
                    kind: format!("{:?}", v.kind),
                }))
            }
            Err(e) => return Err(VerifyError::Sim(e)),
        };
        let mismatches: Vec<Mismatch> = self
            .expected(ctx, inputs)
            .into_iter()
            .filter_map(|(role, expected)| {
                let got = actual.get(role).cloned().unwrap_or_default();
                (got != expected).then(|| Mismatch {
                    inputs: named(),
                    register: role.to_string(),
                    expected: expected.to_string(),
                    actual: got.to_string(),
                })
            })
            .collect();
        Ok(if mismatches.is_empty() { Outcome::Pass } else { Outcome::Mismatches(mismatches) })
    }

    fn context(&self) -> Option<MontgomeryContext> {
        self.params.as_ref().map(ModPParams::context)
    }

    fn report(&self, mode: &str, seed: Option<u64>, cases_run: u64, outcomes: Vec<Outcome>) -> VerificationReport {
        let mut report = VerificationReport {
            kind: self.target.name().to_string(),
            n: self.n,
            params: self.report_params(),
            mode: mode.to_string(),
            seed,
            cases_run,
            mismatches: Vec::new(),
            ancilla_violations: Vec::new(),
        };
        for outcome in outcomes {
            match outcome {
                Outcome::Pass => {}
                Outcome::Mismatches(m) => report.mismatches.extend(m),
                Outcome::Violation(v) => report.ancilla_violations.push(v),
            }
        }
        report
    }
}

fn pool(jobs: Option<usize>) -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = jobs {
        builder = builder.num_threads(jobs.max(1));
    }
    builder.build().expect("thread pool")
}

/// Runs every input assignment, `jobs` workers (default: all cores).
pub fn verify_exhaustive(spec: &VerifySpec, budget: u64, jobs: Option<usize>) -> Result<VerificationReport, VerifyError> {
    let cases = spec.case_count();
    if cases > budget as u128 {
        return Err(VerifyError::BudgetExceeded { cases, budget });
    }
    let circuit = spec.build()?;
    let ctx = spec.context();
    let outcomes = pool(jobs).install(|| {
        (0..cases as u64)
            .into_par_iter()
            .map(|i| spec.check(&circuit, ctx.as_ref(), &spec.case(i)))
            .filter(|o| !matches!(o, Ok(Outcome::Pass)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(spec.report("exhaustive", None, cases as u64, outcomes))
}

/// Runs `trials` inputs drawn from a ChaCha8 stream seeded with `seed`.
pub fn verify_randomized(
    spec: &VerifySpec,
    trials: u64,
    seed: u64,
    jobs: Option<usize>,
) -> Result<VerificationReport, VerifyError> {
    if trials == 0 {
        return Err(VerifyError::NoTrials);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = spec.operand_bound();
    let cases: Vec<Inputs> = (0..trials)
        .map(|_| {
            let ctrl = if spec.controls() == 2 { rng.gen_range(0..2) } else { 0 };
            let first = rng.gen_biguint_below(&bound);
            let second = rng.gen_biguint_below(&bound);
            spec.inputs(ctrl, first, second)
        })
        .collect();
    let circuit = spec.build()?;
    let ctx = spec.context();
    let outcomes = pool(jobs).install(|| {
        cases
            .par_iter()
            .map(|case| spec.check(&circuit, ctx.as_ref(), case))
            .filter(|o| !matches!(o, Ok(Outcome::Pass)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(spec.report("randomized", Some(seed), trials, outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(target: &str, n: u32) -> VerifySpec {
        VerifySpec::new(target.parse().unwrap(), n, None).unwrap()
    }

    #[test]
    fn exhaustive_examples() {
        let r = verify_exhaustive(&spec("schoolbook-classic", 3), DEFAULT_BUDGET, Some(2)).unwrap();
        assert_eq!((r.cases_run, r.passed()), (64, true));
        let r = verify_exhaustive(&spec("mod2n-addsub", 5), DEFAULT_BUDGET, None).unwrap();
        assert_eq!((r.cases_run, r.passed()), (1024, true));
        let r = verify_exhaustive(&spec("ctrl-addsub", 4), DEFAULT_BUDGET, None).unwrap();
        assert_eq!((r.cases_run, r.passed()), (512, true));
    }

    #[test]
    fn blocks_without_carry() {
        for block in BlockKind::ALL {
            let s = VerifySpec::new(Target::Block(block), 3, None).unwrap().with_carry_out(false);
            assert!(verify_exhaustive(&s, DEFAULT_BUDGET, None).unwrap().passed(), "{}", block.name());
        }
    }

    #[test]
    fn modp_needs_params() {
        assert!(matches!(VerifySpec::new(Target::Multiplier(MultiplierKind::ModPClassic), 4, None), Err(VerifyError::MissingParams(_))));
    }

    #[test]
    fn budget_and_trials() {
        assert!(matches!(verify_exhaustive(&spec("schoolbook-addsub", 8), 1000, None), Err(VerifyError::BudgetExceeded { .. })));
        assert!(matches!(verify_randomized(&spec("schoolbook-addsub", 8), 0, 1, None), Err(VerifyError::NoTrials)));
    }

    #[test]
    fn randomized_is_reproducible() {
        let s = spec("schoolbook-addsub", 16);
        let a = verify_randomized(&s, 50, 7, Some(1)).unwrap();
        let b = verify_randomized(&s, 50, 7, Some(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.passed());
    }

    #[test]
    fn mismatches_are_reported_in_case_order() {
        // wrong oracle on purpose: a schoolbook circuit checked as mod 2^n
        let s = VerifySpec::new(Target::Multiplier(MultiplierKind::Mod2nClassic), 2, None).unwrap();
        let circuit = build(MultiplierKind::SchoolbookClassic, 2, None).unwrap();
        let ctx = s.context();
        let failing: Vec<u64> = (0..16)
            .filter(|&i| !matches!(s.check(&circuit, ctx.as_ref(), &s.case(i)).unwrap(), Outcome::Pass))
            .collect();
        // xy >= 4 only for (2,2), (2,3), (3,2), (3,3)
        assert_eq!(failing, [10, 11, 14, 15]);
    }
}
