use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use qmul::report::{CrossoverReport, EstimateReport, ReportParams, WindowRow};
use qmul::text;
use qmul::verify::{verify_exhaustive, verify_randomized, Target, VerifySpec, DEFAULT_BUDGET};
use qmul_core::estimator::{crossover, formula_toffoli, optimal_window, window_approximation, DEFAULT_CROSSOVER_CAP};
use qmul_core::multipliers::Family;
use qmul_core::oracle::largest_prime_of_width;
use qmul_core::{count_resources, run, ModPParams, MultiplierKind};
use serde::Serialize;

/// Build, simulate, verify and cost quantum multiplication circuits.
#[derive(Parser, Debug)]
#[command(name = "qmul", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a circuit and print its resource counts.
    Build {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a circuit on one input.
    Simulate {
        #[command(flatten)]
        circuit: CircuitArgs,
        /// First operand (`a` for blocks).
        #[arg(long, default_value = "0")]
        x: BigUint,
        /// Second operand (`b` for blocks).
        #[arg(long, default_value = "0")]
        y: BigUint,
        /// Control bit for controlled blocks.
        #[arg(long, default_value_t = 0)]
        ctrl: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare a circuit against the classical oracle.
    #[command(group(ArgGroup::new("mode").required(true).args(["exhaustive", "trials"])))]
    Verify {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// Largest input space `--exhaustive` accepts.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form Toffoli count, measured counts and ledger.
    Estimate {
        #[arg(long)]
        kind: MultiplierKind,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        w: Option<u32>,
        #[arg(long)]
        p: Option<BigUint>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form Toffoli count for each window size.
    SweepW {
        #[arg(long)]
        kind: MultiplierKind,
        #[arg(long)]
        n: u32,
        /// Largest window listed (the optimum is searched over all of 1..=n).
        #[arg(long, default_value_t = 24)]
        max_w: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Smallest n at which the add-subtract variant saves `threshold`.
    Crossover {
        #[arg(long)]
        pair: Family,
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
        #[arg(long, default_value_t = DEFAULT_CROSSOVER_CAP)]
        cap: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write a circuit in text or JSON form.
    Emit {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct CircuitArgs {
    /// Multiplier (schoolbook-classic, ..., modp-addsub) or block (adder, subtractor, ctrl-adder, ctrl-addsub).
    #[arg(long)]
    kind: Target,
    #[arg(long)]
    n: u32,
    /// Window size; defaults to the optimal window.
    #[arg(long)]
    w: Option<u32>,
    /// Modulus; defaults to the largest prime below 2^n.
    #[arg(long)]
    p: Option<BigUint>,
    /// Reject composite moduli.
    #[arg(long)]
    strict: bool,
    /// Blocks: drop the carry (borrow) qubit.
    #[arg(long)]
    no_carry: bool,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn mod_p_params(kind: MultiplierKind, n: u32, w: Option<u32>, p: Option<BigUint>, strict: bool) -> Result<ModPParams> {
    let w = match w {
        Some(w) => w,
        None => optimal_window(kind, n)?.w,
    };
    let p = p.unwrap_or_else(|| largest_prime_of_width(n));
    let params = if strict { ModPParams::new_strict(p, n, w)? } else { ModPParams::new(p, n, w)? };
    if !params.is_prime() {
        eprintln!("warning: modulus {} is not prime", params.modulus());
    }
    Ok(params)
}

impl CircuitArgs {
    fn spec(&self) -> Result<VerifySpec> {
        let params = match self.kind {
            Target::Multiplier(kind) if kind.is_mod_p() => {
                Some(mod_p_params(kind, self.n, self.w, self.p.clone(), self.strict)?)
            }
            _ => {
                if self.w.is_some() || self.p.is_some() {
                    bail!("--w and --p only apply to mod-p kinds");
                }
                None
            }
        };
        Ok(VerifySpec::new(self.kind, self.n, params)?.with_carry_out(!self.no_carry))
    }
}

fn params_of(spec: &VerifySpec) -> ReportParams {
    ReportParams {
        p: spec.params.as_ref().map(|p| p.modulus().to_string()),
        w: spec.params.as_ref().map(ModPParams::w),
        carry_out: matches!(spec.target, Target::Block(_)).then_some(spec.carry_out),
    }
}

fn write_output(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct LedgerRow {
    label: String,
    cost: f64,
    counted: u64,
}

#[derive(Serialize)]
struct BuildReport {
    kind: String,
    n: u32,
    params: ReportParams,
    qubits: u32,
    gates: usize,
    counted: u64,
    strict: u64,
    nominal: f64,
    ledger: Vec<LedgerRow>,
}

#[derive(Serialize)]
struct SimulationReport {
    kind: String,
    n: u32,
    params: ReportParams,
    registers: BTreeMap<String, String>,
}

fn run_command(command: Command) -> Result<ExitCode> {
    match command {
        Command::Build { circuit, output } => {
            let spec = circuit.spec()?;
            let c = spec.build()?;
            let r = count_resources(&c);
            let report = BuildReport {
                kind: spec.target.name().to_string(),
                n: spec.n,
                params: params_of(&spec),
                qubits: r.qubit_count,
                gates: r.gate_count,
                counted: r.counted_toffoli,
                strict: r.strict_toffoli,
                nominal: r.nominal_toffoli,
                ledger: r
                    .block_ledger
                    .into_iter()
                    .map(|e| LedgerRow { label: e.label, cost: e.nominal, counted: e.counted })
                    .collect(),
            };
            let body = if output.json {
                json(&report)
            } else {
                let mut s = format!(
                    "{} n={}\nqubits   {}\ngates    {}\ncounted  {}\nstrict   {}\nnominal  {}\n",
                    report.kind, report.n, report.qubits, report.gates, report.counted, report.strict, report.nominal
                );
                for row in &report.ledger {
                    s.push_str(&format!("  {:<28} {:>12} {:>8}\n", row.label, row.cost, row.counted));
                }
                s
            };
            write_output(&output.out, &body)?;
        }
        Command::Simulate { circuit, x, y, ctrl, output } => {
            let spec = circuit.spec()?;
            if let Some(params) = &spec.params {
                if &x >= params.modulus() || &y >= params.modulus() {
                    bail!("inputs must be below p = {}", params.modulus());
                }
            }
            let c = spec.build()?;
            let (first, second) = match spec.target {
                Target::Multiplier(_) => ("x", "y"),
                Target::Block(_) => ("a", "b"),
            };
            let mut inputs = BTreeMap::from([(first.to_string(), x), (second.to_string(), y)]);
            if c.register("ctrl").is_some() {
                inputs.insert("ctrl".to_string(), BigUint::from(ctrl));
            }
            let registers: BTreeMap<String, String> =
                run(&c, &inputs)?.into_iter().map(|(k, v)| (k, v.to_string())).collect();
            let body = if output.json {
                json(&SimulationReport { kind: spec.target.name().to_string(), n: spec.n, params: params_of(&spec), registers })
            } else {
                registers.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
            };
            write_output(&output.out, &body)?;
        }
        Command::Verify { circuit, exhaustive, trials, seed, jobs, budget, output } => {
            let spec = circuit.spec()?;
            let report = if exhaustive {
                verify_exhaustive(&spec, budget, jobs)?
            } else {
                verify_randomized(&spec, trials.unwrap_or(0), seed, jobs)?
            };
            let body = if output.json {
                json(&report)
            } else {
                let mut s = format!(
                    "{} n={} {}: {} cases, {} mismatches, {} ancilla violations\n",
                    report.kind,
                    report.n,
                    report.mode,
                    report.cases_run,
                    report.mismatches.len(),
                    report.ancilla_violations.len()
                );
                for m in report.mismatches.iter().take(20) {
                    s.push_str(&format!("  {:?}: {} expected {} got {}\n", m.inputs, m.register, m.expected, m.actual));
                }
                for v in report.ancilla_violations.iter().take(20) {
                    s.push_str(&format!("  {:?}: {} on q{} at {}\n", v.inputs, v.kind, v.qubit, v.position));
                }
                s
            };
            write_output(&output.out, &body)?;
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Estimate { kind, n, w, p, output } => {
            let report = EstimateReport::new(kind, n, w, p)?;
            let body = if output.json {
                json(&report)
            } else {
                let mut s = format!("{} n={}", report.kind, report.n);
                if let Some(w) = report.w {
                    s.push_str(&format!(" w={w}"));
                }
                s.push_str(&format!("\nformula    {}\n", report.formula));
                if let (Some(c), Some(nominal)) = (report.counted, report.nominal) {
                    s.push_str(&format!("counted    {c}\nnominal    {nominal}\n"));
                }
                if let Some(stages) = report.stage_ledger {
                    s.push_str(&format!("stages     {stages} (offset {})\n", stages - report.formula));
                }
                s.push_str(&format!("reduction  {:.4}\n", report.reduction_vs_classic));
                s
            };
            write_output(&output.out, &body)?;
        }
        Command::SweepW { kind, n, max_w, output } => {
            let best = optimal_window(kind, n)?;
            let rows: Vec<WindowRow> = (1..=n.min(max_w.max(best.w)))
                .map(|w| Ok(WindowRow { w, formula: formula_toffoli(kind, n, Some(w))?, optimal: w == best.w }))
                .collect::<Result<_>>()?;
            let body = if output.json {
                #[derive(Serialize)]
                struct Sweep {
                    kind: String,
                    n: u32,
                    optimal: u32,
                    approximation: f64,
                    rows: Vec<WindowRow>,
                }
                json(&Sweep { kind: kind.name().to_string(), n, optimal: best.w, approximation: window_approximation(n), rows })
            } else {
                let mut s = format!("{kind} n={n}: optimal w={} (approximation {:.3})\n", best.w, best.approximation);
                for row in &rows {
                    s.push_str(&format!("{:>4} {:>14.3}{}\n", row.w, row.formula, if row.optimal { "  *" } else { "" }));
                }
                s
            };
            write_output(&output.out, &body)?;
        }
        Command::Crossover { pair, threshold, cap, output } => {
            let c = crossover(pair, threshold, cap)?;
            let report = CrossoverReport { pair: pair.name().to_string(), threshold, n: c.n, reduction: c.reduction };
            let body = if output.json {
                json(&report)
            } else {
                format!("{}: n={} (reduction {:.4} >= {})\n", report.pair, report.n, report.reduction, report.threshold)
            };
            write_output(&output.out, &body)?;
        }
        Command::Emit { circuit, format, out } => {
            let c = circuit.spec()?.build()?;
            let body = match format {
                Format::Text => text::emit(&c),
                Format::Json => {
                    let mut s = text::emit_json(&c);
                    s.push('\n');
                    s
                }
            };
            write_output(&out, &body)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
