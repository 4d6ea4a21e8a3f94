//! Command-line front end: criterion evaluation on the built-in noisy state
//! families, closed-form thresholds, curve/threshold sweeps, partition
//! counts, the random-separable-state falsification oracle, and local
//! observable export.
//!
//! Output is JSON for single reports and CSV for sweeps; every float is
//! printed with 12 significant digits so outputs diff cleanly. Identical
//! arguments (and seed) produce byte-identical output.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use ksep::criteria::{dicke, qudit_w, CriterionReport, VIOLATION_TOLERANCE};
use ksep::noise::{
    bisect_delta_root, bisect_gamma_root, noise_threshold_dicke, noise_threshold_qudit_w,
    sweep_curves, Family, NoiseCurve, SweepMode, SweepSpec,
};
use ksep::observables::{
    dicke_pattern_inventory, observable_count_dicke, observable_count_qudit, pauli_diag_observable,
    pauli_offdiag_observables, qudit_diag_observable, qudit_offdiag_observables,
    qudit_pattern_inventory, ObservableSet,
};
use ksep::partitions::{count_partitions_formula, enumerate_partitions, random_k_separable_state};
use ksep::state::{dicke_state, qudit_w_state, white_noise_mixture};

#[derive(Parser)]
#[command(
    name = "ksep",
    version,
    about = "Non-k-separability detection for Dicke-class and qudit W-class states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the N-qubit inequality on a Dicke state with white noise
    Criterion1(Criterion1Args),
    /// Evaluate the N-qudit inequality (d = N) on a W state with white noise
    Criterion2(Criterion2Args),
    /// Closed-form white-noise tolerance, cross-checked by bisection
    Threshold(ThresholdArgs),
    /// Sample detection curves or threshold tables over a parameter grid
    Sweep(SweepArgs),
    /// Count (and optionally list) the k-block partitions of N subsystems
    Partitions(PartitionsArgs),
    /// Sample random k-separable states and verify neither criterion fires
    Oracle(OracleArgs),
    /// Export local-observable decompositions and inventories
    #[command(subcommand)]
    Observables(ObservablesCommand),
}

#[derive(Args)]
struct Criterion1Args {
    /// Qubit count
    #[arg(long)]
    n: usize,
    /// Excitation count of the Dicke state
    #[arg(long)]
    m: usize,
    /// Separability level under test
    #[arg(long)]
    k: usize,
    /// White-noise fraction
    #[arg(long)]
    p: f64,
    /// Violation tolerance on the margin
    #[arg(long, default_value_t = VIOLATION_TOLERANCE)]
    tolerance: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Criterion2Args {
    /// Subsystem count (local dimension equals it)
    #[arg(long)]
    n: usize,
    /// Separability level under test
    #[arg(long)]
    k: usize,
    /// White-noise fraction
    #[arg(long)]
    p: f64,
    /// Violation tolerance on the margin
    #[arg(long, default_value_t = VIOLATION_TOLERANCE)]
    tolerance: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Dicke,
    Wqudit,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Dicke => Family::Dicke,
            FamilyArg::Wqudit => Family::WQudit,
        }
    }
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: usize,
    /// Excitation count (Dicke family only)
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SweepModeArg {
    /// Detection-function values over the p grid
    Curve,
    /// One (threshold, 1.0) row per parameter combination
    Threshold,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Subsystem counts: comma-separated values and a..b ranges, e.g. "4,6..9"
    #[arg(long, value_parser = parse_usize_list)]
    n: UsizeList,
    /// Excitation counts (Dicke family only), same list syntax
    #[arg(long, value_parser = parse_usize_list, default_value = "")]
    m: UsizeList,
    /// Separability levels, same list syntax
    #[arg(long, value_parser = parse_usize_list)]
    k: UsizeList,
    #[arg(long, value_enum, default_value = "curve")]
    mode: SweepModeArg,
    #[arg(long, default_value_t = 0.0)]
    p_min: f64,
    #[arg(long, default_value_t = 0.95)]
    p_max: f64,
    #[arg(long, default_value_t = 20)]
    p_count: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PartitionsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Include the partitions themselves in the report
    #[arg(long)]
    list: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Subsystem count
    #[arg(long)]
    n: usize,
    /// Separability level of the sampled states and of the evaluation
    #[arg(long)]
    k: usize,
    /// Excitation count for the qubit criterion (required when d = 2)
    #[arg(long)]
    m: Option<usize>,
    /// Local dimension: 2 runs the qubit criterion, d = n the qudit one
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    samples: usize,
    /// Base seed; sample i uses seed + i
    #[arg(long)]
    seed: u64,
    /// Pure states per sampled mixture
    #[arg(long, default_value_t = 4)]
    terms: usize,
    #[arg(long, default_value_t = VIOLATION_TOLERANCE)]
    tolerance: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ObservablesCommand {
    /// Terms reconstructing one matrix element
    Element(ElementArgs),
    /// Distinct-pattern inventory versus the counting formula
    Inventory(InventoryArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PartArg {
    Real,
    Imag,
}

#[derive(Args)]
struct ElementArgs {
    #[arg(long)]
    n: usize,
    /// Local dimension (2 = Pauli construction, else Gell-Mann)
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// One-based row index
    #[arg(long)]
    row: usize,
    /// One-based column index; omitted means the diagonal element
    #[arg(long)]
    col: Option<usize>,
    /// Which off-diagonal component the terms reconstruct
    #[arg(long, value_enum, default_value = "real")]
    part: PartArg,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InventoryArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: usize,
    /// Excitation count (Dicke family only)
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Comma-separated values and inclusive a..b ranges, deduplicated.
#[derive(Clone)]
struct UsizeList(Vec<usize>);

fn parse_usize_list(raw: &str) -> Result<UsizeList, String> {
    let mut out = Vec::new();
    if raw.is_empty() {
        return Ok(UsizeList(out));
    }
    for part in raw.split(',') {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a
                .trim()
                .parse()
                .map_err(|_| format!("bad range start '{a}'"))?;
            let b: usize = b
                .trim()
                .parse()
                .map_err(|_| format!("bad range end '{b}'"))?;
            if a > b {
                return Err(format!("empty range {a}..{b}"));
            }
            out.extend(a..=b);
        } else {
            out.push(
                part.trim()
                    .parse()
                    .map_err(|_| format!("bad list item '{part}'"))?,
            );
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|v| seen.insert(*v));
    Ok(UsizeList(out))
}

/// Round to 12 significant digits for diff-stable output.
fn sig12(x: f64) -> Value {
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float");
    Value::from(rounded)
}

fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

fn emit(output: Option<&PathBuf>, content: &str) -> Result<()> {
    match output {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn report_json(report: &CriterionReport, params: Value) -> Value {
    let mut map = Map::new();
    map.insert("lhs".into(), sig12(report.lhs));
    map.insert("rhs".into(), sig12(report.rhs));
    map.insert("margin".into(), sig12(report.margin));
    map.insert("violated".into(), Value::from(report.violated));
    map.insert("tolerance".into(), sig12(report.tolerance));
    if let Some(note) = &report.note {
        map.insert("note".into(), Value::from(note.clone()));
    }
    map.insert("params".into(), params);
    Value::Object(map)
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Criterion1(args) => cmd_criterion1(args),
        Command::Criterion2(args) => cmd_criterion2(args),
        Command::Threshold(args) => cmd_threshold(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Partitions(args) => cmd_partitions(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Observables(cmd) => cmd_observables(cmd),
    }
}

fn cmd_criterion1(args: Criterion1Args) -> Result<ExitCode> {
    if args.n > 12 {
        bail!("matrix evaluation supported for n <= 12; use `threshold`/`sweep` for larger n");
    }
    let psi = dicke_state(args.n, args.m)?;
    let rho = white_noise_mixture(&psi, args.p)?;
    let report = dicke::evaluate_state(&rho, args.n, args.m, args.k, args.tolerance)?;
    let params = json!({
        "family": "dicke",
        "n": args.n,
        "m": args.m,
        "k": args.k,
        "p": sig12(args.p),
    });
    emit(args.output.as_ref(), &pretty(&report_json(&report, params)))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_criterion2(args: Criterion2Args) -> Result<ExitCode> {
    if args.n > 6 {
        bail!("matrix evaluation supported for n <= 6; use `threshold`/`sweep` for larger n");
    }
    let psi = qudit_w_state(args.n)?;
    let rho = white_noise_mixture(&psi, args.p)?;
    let report = qudit_w::evaluate_state(&rho, args.n, args.k, args.tolerance)?;
    let params = json!({
        "family": "wqudit",
        "n": args.n,
        "d": args.n,
        "k": args.k,
        "p": sig12(args.p),
    });
    emit(args.output.as_ref(), &pretty(&report_json(&report, params)))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_threshold(args: ThresholdArgs) -> Result<ExitCode> {
    let mut map = Map::new();
    map.insert("n".into(), Value::from(args.n));
    map.insert("k".into(), Value::from(args.k));
    match args.family {
        FamilyArg::Dicke => {
            let m = args
                .m
                .ok_or_else(|| anyhow!("--m is required for the dicke family"))?;
            let threshold = noise_threshold_dicke(args.n, m, args.k)?;
            let root = bisect_gamma_root(args.n, m, args.k)?;
            map.insert("family".into(), Value::from("dicke"));
            map.insert("m".into(), Value::from(m));
            map.insert("threshold".into(), sig12(threshold));
            map.insert("bisection_root".into(), sig12(root));
            if threshold == 0.0 {
                map.insert(
                    "note".into(),
                    Value::from(
                        "degenerate excitation count: the inequality is vacuous and never detects",
                    ),
                );
            }
        }
        FamilyArg::Wqudit => {
            if args.m.is_some() {
                bail!("--m does not apply to the wqudit family");
            }
            let threshold = noise_threshold_qudit_w(args.n, args.n, args.k)?;
            let root = bisect_delta_root(args.n, args.n, args.k)?;
            map.insert("family".into(), Value::from("wqudit"));
            map.insert("d".into(), Value::from(args.n));
            map.insert("threshold".into(), sig12(threshold));
            map.insert("bisection_root".into(), sig12(root));
        }
    }
    emit(args.output.as_ref(), &pretty(&Value::Object(map)))?;
    Ok(ExitCode::SUCCESS)
}

fn curves_to_csv(curves: &[NoiseCurve]) -> String {
    let mut out = String::from("family,n,m,d,k,p,value,violated\n");
    for curve in curves {
        let m = curve.m.map(|v| v.to_string()).unwrap_or_default();
        let d = curve.d.map(|v| v.to_string()).unwrap_or_default();
        for &(p, value) in &curve.samples {
            let violated = value < 1.0;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                curve.family.as_str(),
                curve.n,
                m,
                d,
                curve.k,
                fmt12(p),
                fmt12(value),
                violated
            ));
        }
    }
    out
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode> {
    let mode = match args.mode {
        SweepModeArg::Curve => SweepMode::Curve,
        SweepModeArg::Threshold => SweepMode::Threshold,
    };
    let p_grid = if mode == SweepMode::Curve {
        if args.p_count == 0 {
            bail!("--p-count must be at least 1");
        }
        if args.p_count == 1 {
            vec![args.p_min]
        } else {
            let step = (args.p_max - args.p_min) / (args.p_count - 1) as f64;
            (0..args.p_count)
                .map(|i| args.p_min + i as f64 * step)
                .collect()
        }
    } else {
        Vec::new()
    };
    let spec = SweepSpec {
        family: args.family.into(),
        n_values: args.n.0,
        m_values: args.m.0,
        k_values: args.k.0,
        p_grid,
        mode,
    };
    let curves = sweep_curves(&spec)?;
    emit(args.output.as_ref(), &curves_to_csv(&curves))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_partitions(args: PartitionsArgs) -> Result<ExitCode> {
    let count = count_partitions_formula(args.n, args.k)?;
    let mut map = Map::new();
    map.insert("n".into(), Value::from(args.n));
    map.insert("k".into(), Value::from(args.k));
    map.insert("count".into(), Value::from(count as u64));
    if args.list {
        if count > 100_000 {
            bail!("{count} partitions is too many to list");
        }
        let partitions = enumerate_partitions(args.n, args.k)?;
        if partitions.len() as u128 != count {
            bail!(
                "internal disagreement: formula {count}, enumeration {}",
                partitions.len()
            );
        }
        let listed: Vec<Value> = partitions
            .iter()
            .map(|p| {
                Value::from(
                    p.blocks()
                        .iter()
                        .map(|b| Value::from(b.clone()))
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        map.insert("partitions".into(), Value::from(listed));
    }
    emit(args.output.as_ref(), &pretty(&Value::Object(map)))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode> {
    if args.samples == 0 {
        bail!("--samples must be at least 1");
    }
    enum Mode {
        Qubit(dicke::IndexSets),
        Qudit(qudit_w::IndexSets),
    }
    let mode = if args.d == 2 {
        let m = args
            .m
            .ok_or_else(|| anyhow!("--m is required for the qubit criterion (d = 2)"))?;
        Mode::Qubit(dicke::index_sets(args.n, m)?)
    } else {
        if args.m.is_some() {
            bail!("--m applies to the qubit criterion only");
        }
        if args.d != args.n {
            bail!(
                "the qudit criterion requires d = n, got d = {}, n = {}",
                args.d,
                args.n
            );
        }
        if args.n > 5 {
            bail!("qudit oracle supported for n <= 5");
        }
        Mode::Qudit(qudit_w::index_sets(args.n)?)
    };

    let mut violations = 0usize;
    let mut max_margin = f64::NEG_INFINITY;
    for i in 0..args.samples {
        let seed = args.seed.wrapping_add(i as u64);
        let rho = random_k_separable_state(args.n, args.k, args.d, args.terms, seed)?;
        let report = match &mode {
            Mode::Qubit(sets) => dicke::evaluate(&rho, sets, args.k, args.tolerance)?,
            Mode::Qudit(sets) => qudit_w::evaluate(&rho, sets, args.k, args.tolerance)?,
        };
        max_margin = max_margin.max(report.margin);
        if report.violated {
            violations += 1;
        }
    }

    let pass = violations == 0;
    let mut map = Map::new();
    map.insert("n".into(), Value::from(args.n));
    map.insert("k".into(), Value::from(args.k));
    map.insert("d".into(), Value::from(args.d));
    if let Some(m) = args.m {
        map.insert("m".into(), Value::from(m));
    }
    map.insert("samples".into(), Value::from(args.samples));
    map.insert("terms".into(), Value::from(args.terms));
    map.insert("seed".into(), Value::from(args.seed));
    map.insert("tolerance".into(), sig12(args.tolerance));
    map.insert("violations".into(), Value::from(violations));
    map.insert("max_margin".into(), sig12(max_margin));
    map.insert("pass".into(), Value::from(pass));
    emit(args.output.as_ref(), &pretty(&Value::Object(map)))?;

    if pass {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "error: {violations} of {} sampled k-separable states violated the criterion",
            args.samples
        );
        Ok(ExitCode::FAILURE)
    }
}

fn observable_terms_json(set: &ObservableSet) -> Value {
    Value::from(
        set.terms
            .iter()
            .map(|term| {
                json!({
                    "coefficient": sig12(term.coefficient),
                    "factors": term
                        .factors
                        .iter()
                        .map(|op| op.to_string())
                        .collect::<Vec<_>>(),
                })
            })
            .collect::<Vec<_>>(),
    )
}

fn cmd_observables(cmd: ObservablesCommand) -> Result<ExitCode> {
    match cmd {
        ObservablesCommand::Element(args) => {
            let set = match (args.col, args.d) {
                (None, 2) => pauli_diag_observable(args.n, args.row)?,
                (None, _) => qudit_diag_observable(args.n, args.d, args.row)?,
                (Some(col), d) => {
                    let (re, im) = if d == 2 {
                        pauli_offdiag_observables(args.n, args.row, col)?
                    } else {
                        qudit_offdiag_observables(args.n, d, args.row, col)?
                    };
                    match args.part {
                        PartArg::Real => re,
                        PartArg::Imag => im,
                    }
                }
            };
            emit(args.output.as_ref(), &pretty(&observable_terms_json(&set)))?;
        }
        ObservablesCommand::Inventory(args) => {
            let mut map = Map::new();
            map.insert("n".into(), Value::from(args.n));
            match args.family {
                FamilyArg::Dicke => {
                    let m = args
                        .m
                        .ok_or_else(|| anyhow!("--m is required for the dicke family"))?;
                    let formula = observable_count_dicke(args.n, m)?;
                    let inventory = dicke_pattern_inventory(args.n, m)?;
                    map.insert("family".into(), Value::from("dicke"));
                    map.insert("m".into(), Value::from(m));
                    map.insert("formula_count".into(), Value::from(formula as u64));
                    map.insert("distinct_patterns".into(), Value::from(inventory.len()));
                }
                FamilyArg::Wqudit => {
                    if args.m.is_some() {
                        bail!("--m does not apply to the wqudit family");
                    }
                    let formula = observable_count_qudit(args.n, args.n)?;
                    let inventory = qudit_pattern_inventory(args.n)?;
                    map.insert("family".into(), Value::from("wqudit"));
                    map.insert("d".into(), Value::from(args.n));
                    map.insert("formula_count".into(), Value::from(formula as u64));
                    map.insert("distinct_patterns".into(), Value::from(inventory.len()));
                }
            }
            emit(args.output.as_ref(), &pretty(&Value::Object(map)))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
