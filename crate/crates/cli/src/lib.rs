//! Command-line front end: every computation of the core library exposed
//! as a subcommand that emits a structured run record (key/value text by
//! default, strict JSON with `--json`) or, for `scan`, a CSV table.
//!
//! Exit codes: `0` success, `2` invalid arguments, `3` numerical failure
//! (no bracket, vanishing denominator, failed consistency guard, ...),
//! `4` admissibility violation.

use clap::{Args, Parser, Subcommand, ValueEnum};
use loewner_core::admissibility::{check_admissible, AdmissibilityReport};
use loewner_core::closed_form::sigma32;
use loewner_core::error::Error;
use loewner_core::integrate::{IntegratorOptions, Method};
use loewner_core::oracle::{fd_hessian, ControlSolverOptions};
use loewner_core::problem::{Bound, ProblemSpec};
use loewner_core::solver::{scan, solve, RootScanConfig, ScanRow, SolverResult, Target};
use loewner_core::variational::{hessian_of_f, HessianF};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Entrywise tolerance for `oracle-verify` agreement.
pub const ORACLE_AGREEMENT: f64 = 1e-5;

// ---------------------------------------------------------------------
// Run record: the single structured result document every subcommand
// (except plain-CSV `scan`) prints. Serialized output round-trips.
// ---------------------------------------------------------------------

/// Hessian of the objective with its derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianReport {
    pub hessian: HessianF,
    pub det: f64,
    pub negative_definite: bool,
}

/// Side-by-side finite-difference oracle vs variational-system Hessian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleVerifyReport {
    pub oracle: HessianF,
    pub variational: HessianF,
    pub max_entry_diff: f64,
    pub agrees: bool,
}

/// Payload of a run record, tagged by result kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum ResultPayload {
    Solver(SolverResult),
    Hessian(HessianReport),
    Admissibility(AdmissibilityReport),
    OracleVerify(OracleVerifyReport),
    Scan(Vec<ScanRow>),
}

/// One executed command with its echoed settings and result. All floats
/// are rounded to 12 significant digits before serialization, so
/// `parse(serialize(r)) == r` holds bitwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Bound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bisect_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
    /// For `sigma32` only: the analytic closed-form value alongside the
    /// ODE-pipeline root in the result.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form_value: Option<f64>,
    pub result: ResultPayload,
    /// Wall-clock seconds for the computation (varies run to run).
    pub wall_time: f64,
    pub tool_version: String,
}

/// Rounds to 12 significant digits; all printed floats go through this.
fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        x
    } else {
        format!("{x:.11e}").parse().expect("rounded float reparses")
    }
}

fn round_solver(mut r: SolverResult) -> SolverResult {
    r.value = round12(r.value);
    r.root_param = round12(r.root_param);
    r.bracket = (round12(r.bracket.0), round12(r.bracket.1));
    r.g_values_at_bracket = (
        round12(r.g_values_at_bracket.0),
        round12(r.g_values_at_bracket.1),
    );
    r.admissibility_margin = round12(r.admissibility_margin);
    r
}

fn round_hessian(mut h: HessianF) -> HessianF {
    h.fpp = round12(h.fpp);
    h.fqq = round12(h.fqq);
    h.fpq = round12(h.fpq);
    h
}

fn round_admissibility(mut a: AdmissibilityReport) -> AdmissibilityReport {
    a.min_gap = round12(a.min_gap);
    a.min_abs_huu = round12(a.min_abs_huu);
    a.worst_t = round12(a.worst_t);
    a
}

fn round_row(mut r: ScanRow) -> ScanRow {
    r.param = round12(r.param);
    r.g1 = round12(r.g1);
    r.g2 = round12(r.g2);
    r.admissibility_margin = round12(r.admissibility_margin);
    r
}

// ---------------------------------------------------------------------
// Argument grammar
// ---------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "loewner",
    version,
    about = "Sharp second-order comparison constants for coefficient functionals \
             of a controlled ODE system"
)]
struct CliArgs {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Third-vs-second constant: first-minor root on the mu axis
    /// (closed form included in the record).
    Sigma32(SolveCmd),
    /// Fourth-coefficient second-order constant: determinant root on the
    /// nu axis.
    Sigma42(SolveCmd),
    /// Fourth-vs-second constant.
    Sigma24(SolveCmd),
    /// Fourth-vs-third constant.
    Sigma34(SolveCmd),
    /// Bound threshold: smallest bound above which the second-order test
    /// certifies a local maximum.
    M0(SolveCmd),
    /// Hessian of the objective at one parameter point, from the
    /// variational ODE system.
    Hessian(HessianCmd),
    /// Admissibility of one parameter point: the constant control must
    /// maximize the Hamiltonian along the whole trajectory.
    DomainCheck(DomainCmd),
    /// Cross-check the variational Hessian against a finite-difference
    /// oracle built from full nonlinear simulations.
    OracleVerify(OracleCmd),
    /// Tabulate the monitored equations over a parameter interval as CSV
    /// (param, g1, g2, admissibility_margin).
    Scan(ScanArgsCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Rk4,
    Abm4,
}

impl MethodArg {
    fn core(self) -> Method {
        match self {
            MethodArg::Rk4 => Method::Rk4,
            MethodArg::Abm4 => Method::Abm4,
        }
    }
    fn name(self) -> &'static str {
        match self {
            MethodArg::Rk4 => "rk4",
            MethodArg::Abm4 => "abm4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Two-parameter functional combining the first three monitored
    /// coefficients (uses --mu, --nu, --M).
    L,
    /// One-parameter fourth-vs-second family (uses --nu).
    S24,
    /// One-parameter fourth-vs-third family (uses --mu).
    S34,
    /// Pure fourth-coefficient functional under a finite bound (uses --M).
    A4,
}

impl VariantArg {
    fn name(self) -> &'static str {
        match self {
            VariantArg::L => "L",
            VariantArg::S24 => "s24",
            VariantArg::S34 => "s34",
            VariantArg::A4 => "a4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Sigma32,
    Sigma42,
    Sigma24,
    Sigma34,
    M0,
}

impl TargetArg {
    fn core(self) -> Target {
        match self {
            TargetArg::Sigma32 => Target::Sigma32,
            TargetArg::Sigma42 => Target::Sigma42,
            TargetArg::Sigma24 => Target::Sigma24,
            TargetArg::Sigma34 => Target::Sigma34,
            TargetArg::M0 => Target::M0,
        }
    }
}

fn target_cli_name(target: Target) -> &'static str {
    match target {
        Target::Sigma32 => "sigma32",
        Target::Sigma42 => "sigma42",
        Target::Sigma24 => "sigma24",
        Target::Sigma34 => "sigma34",
        Target::M0 => "m0",
    }
}

/// Parameter point of a functional.
#[derive(Args, Debug)]
struct SpecArgs {
    /// Functional family.
    #[arg(long, value_enum, ignore_case = true)]
    variant: VariantArg,
    /// First comparison weight (L and s34) [default: 0]
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    /// Second comparison weight (L and s24) [default: 0]
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    nu: f64,
    /// Bound parameter: a number >= 1, or `inf` [default: inf]
    #[arg(long = "M", default_value = "inf")]
    m: String,
}

impl SpecArgs {
    fn build(&self) -> Result<ProblemSpec, Error> {
        let m = Bound::parse(&self.m)?;
        match self.variant {
            VariantArg::L => ProblemSpec::l_functional(self.mu, self.nu, m),
            VariantArg::S24 => ProblemSpec::sigma24(self.nu),
            VariantArg::S34 => ProblemSpec::sigma34(self.mu),
            VariantArg::A4 => ProblemSpec::a4_bound(match m {
                Bound::Finite(v) => v,
                Bound::Infinite => f64::INFINITY,
            }),
        }
    }
}

/// Integrator settings.
#[derive(Args, Debug)]
struct IntegArgs {
    /// Integration steps per trajectory [default: 20000]
    #[arg(long, default_value_t = 20000)]
    steps: usize,
    /// Fixed-step integrator family [default: rk4]
    #[arg(long, value_enum, default_value_t = MethodArg::Rk4, ignore_case = true)]
    method: MethodArg,
}

impl IntegArgs {
    fn options(&self) -> IntegratorOptions {
        IntegratorOptions {
            method: self.method.core(),
            steps: self.steps,
            record_trajectory: false,
        }
    }
}

#[derive(Args, Debug)]
struct SolveCmd {
    #[command(flatten)]
    integ: IntegArgs,
    /// Bisection tolerance on the root parameter [default: 1e-7]
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Interior scan grid points [default: 200]
    #[arg(long, default_value_t = 200)]
    grid: usize,
    /// Emit the run record as strict JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct HessianCmd {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    integ: IntegArgs,
    /// Emit the run record as strict JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct DomainCmd {
    #[command(flatten)]
    spec: SpecArgs,
    /// Time-grid intervals for the admissibility check [default: 2048]
    #[arg(long, default_value_t = 2048)]
    grid: usize,
    /// Emit the run record as strict JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct OracleCmd {
    #[command(flatten)]
    spec: SpecArgs,
    /// Integration steps per simulated trajectory [default: 2000]
    #[arg(long, default_value_t = 2000)]
    steps: usize,
    /// Fixed-step integrator family [default: rk4]
    #[arg(long, value_enum, default_value_t = MethodArg::Rk4, ignore_case = true)]
    method: MethodArg,
    /// Finite-difference step for the Hessian oracle [default: 1e-3]
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    /// Emit the run record as strict JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ScanArgsCmd {
    /// Constant family whose equations to tabulate.
    #[arg(long, value_enum, ignore_case = true)]
    target: TargetArg,
    /// Lower end of the scan interval [default: the target's own]
    #[arg(long, allow_negative_numbers = true)]
    from: Option<f64>,
    /// Upper end of the scan interval [default: the target's own]
    #[arg(long, allow_negative_numbers = true)]
    to: Option<f64>,
    /// Interior scan grid points [default: 200]
    #[arg(long, default_value_t = 200)]
    grid: usize,
    #[command(flatten)]
    integ: IntegArgs,
    /// Write the CSV table to this file instead of standard output.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Emit the rows as a JSON run record instead of CSV.
    #[arg(long)]
    json: bool,
}

// ---------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------

/// Parses arguments from the process environment and runs the command.
/// Returns the process exit code.
pub fn run() -> i32 {
    let cli = CliArgs::parse();
    loewner_core::init_thread_pool();
    match execute(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Maps every library error to the documented exit code family.
fn exit_code(e: &Error) -> i32 {
    use Error::*;
    match e {
        TimeOutOfRange { .. } | InvalidBound { .. } | InvalidParameter(_) | InvalidOptions(_) => 2,
        DenominatorVanishing { .. }
        | LogDomain(_)
        | NoSignChange { .. }
        | StepHalvingDisagreement { .. }
        | AmbiguousMaximizer { .. }
        | ControlSolveFailed { .. }
        | LeftBaseNeighborhood { .. }
        | BadTimeSpan { .. } => 3,
        NotAdmissible(_) | IndeterminateAdmissibility { .. } | BracketOnBoundary { .. } => 4,
    }
}

fn execute(cmd: Command) -> Result<i32, Error> {
    match cmd {
        Command::Sigma32(a) => solve_cmd(Target::Sigma32, &a),
        Command::Sigma42(a) => solve_cmd(Target::Sigma42, &a),
        Command::Sigma24(a) => solve_cmd(Target::Sigma24, &a),
        Command::Sigma34(a) => solve_cmd(Target::Sigma34, &a),
        Command::M0(a) => solve_cmd(Target::M0, &a),
        Command::Hessian(a) => hessian_cmd(&a),
        Command::DomainCheck(a) => domain_cmd(&a),
        Command::OracleVerify(a) => oracle_cmd(&a),
        Command::Scan(a) => scan_cmd(&a),
    }
}

fn base_record(command: &str) -> RunRecord {
    RunRecord {
        command: command.to_owned(),
        variant: None,
        mu: None,
        nu: None,
        bound: None,
        target: None,
        steps: None,
        method: None,
        bisect_tol: None,
        grid: None,
        fd_step: None,
        closed_form_value: None,
        result: ResultPayload::Scan(Vec::new()),
        wall_time: 0.0,
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
    }
}

fn with_spec(mut rec: RunRecord, arg: &SpecArgs, spec: &ProblemSpec) -> RunRecord {
    rec.variant = Some(arg.variant.name().to_owned());
    rec.mu = Some(round12(spec.mu));
    rec.nu = Some(round12(spec.nu));
    rec.bound = Some(spec.m);
    rec
}

fn solve_cmd(target: Target, a: &SolveCmd) -> Result<i32, Error> {
    let t0 = Instant::now();
    let mut cfg = RootScanConfig::default_for(target);
    cfg.scan_points = a.grid;
    cfg.bisect_tol = a.tol;
    cfg.integ = a.integ.options();
    let result = solve(target, &cfg)?;

    let mut rec = base_record(target_cli_name(target));
    rec.steps = Some(a.integ.steps);
    rec.method = Some(a.integ.method.name().to_owned());
    rec.bisect_tol = Some(round12(a.tol));
    rec.grid = Some(a.grid);
    if target == Target::Sigma32 {
        rec.closed_form_value = Some(round12(sigma32()));
    }
    rec.result = ResultPayload::Solver(round_solver(result));
    rec.wall_time = round12(t0.elapsed().as_secs_f64());
    emit(&rec, a.json);
    Ok(0)
}

fn hessian_cmd(a: &HessianCmd) -> Result<i32, Error> {
    let t0 = Instant::now();
    let spec = a.spec.build()?;
    let h = hessian_of_f(&spec, a.integ.options())?;

    let mut rec = with_spec(base_record("hessian"), &a.spec, &spec);
    rec.steps = Some(a.integ.steps);
    rec.method = Some(a.integ.method.name().to_owned());
    rec.result = ResultPayload::Hessian(HessianReport {
        hessian: round_hessian(h),
        det: round12(h.det()),
        negative_definite: h.is_negative_definite(),
    });
    rec.wall_time = round12(t0.elapsed().as_secs_f64());
    emit(&rec, a.json);
    Ok(0)
}

fn domain_cmd(a: &DomainCmd) -> Result<i32, Error> {
    let t0 = Instant::now();
    let spec = a.spec.build()?;
    let report = check_admissible(&spec, a.grid)?;

    let mut rec = with_spec(base_record("domain-check"), &a.spec, &spec);
    rec.grid = Some(a.grid);
    rec.result = ResultPayload::Admissibility(round_admissibility(report));
    rec.wall_time = round12(t0.elapsed().as_secs_f64());
    emit(&rec, a.json);

    if report.admissible {
        Ok(0)
    } else {
        let reason = format!(
            "the constant control fails to maximize the Hamiltonian \
             (worst gap {:.3e} at t = {:.6})",
            report.min_gap, report.worst_t
        );
        eprintln!("error: {}", Error::NotAdmissible(reason));
        Ok(4)
    }
}

fn oracle_cmd(a: &OracleCmd) -> Result<i32, Error> {
    let t0 = Instant::now();
    let spec = a.spec.build()?;
    let integ = IntegratorOptions {
        method: a.method.core(),
        steps: a.steps,
        record_trajectory: false,
    };
    let opts = ControlSolverOptions::default();
    let fd = fd_hessian(&spec, a.h, integ, &opts)?;
    let ode = hessian_of_f(&spec, integ)?;
    let max_entry_diff = (fd.fpp - ode.fpp)
        .abs()
        .max((fd.fqq - ode.fqq).abs())
        .max((fd.fpq - ode.fpq).abs());
    let agrees = max_entry_diff <= ORACLE_AGREEMENT;

    let mut rec = with_spec(base_record("oracle-verify"), &a.spec, &spec);
    rec.steps = Some(a.steps);
    rec.method = Some(a.method.name().to_owned());
    rec.fd_step = Some(round12(a.h));
    rec.result = ResultPayload::OracleVerify(OracleVerifyReport {
        oracle: round_hessian(fd),
        variational: round_hessian(ode),
        max_entry_diff: round12(max_entry_diff),
        agrees,
    });
    rec.wall_time = round12(t0.elapsed().as_secs_f64());
    emit(&rec, a.json);

    if agrees {
        Ok(0)
    } else {
        eprintln!(
            "error: oracle disagreement: max Hessian entry difference {max_entry_diff:.3e} \
             exceeds {ORACLE_AGREEMENT:.0e}"
        );
        Ok(3)
    }
}

fn scan_cmd(a: &ScanArgsCmd) -> Result<i32, Error> {
    let t0 = Instant::now();
    let target = a.target.core();
    let mut cfg = RootScanConfig::default_for(target);
    if let Some(from) = a.from {
        cfg.scan_interval.0 = from;
    }
    if let Some(to) = a.to {
        cfg.scan_interval.1 = to;
    }
    cfg.scan_points = a.grid;
    cfg.integ = a.integ.options();
    let rows: Vec<ScanRow> = scan(target, &cfg)?.into_iter().map(round_row).collect();

    if let Some(path) = &a.out {
        std::fs::write(path, csv_table(&rows)).map_err(|e| {
            Error::InvalidOptions(format!("cannot write {}: {e}", path.display()))
        })?;
    }
    if a.json {
        let mut rec = base_record("scan");
        rec.target = Some(target_cli_name(target).to_owned());
        rec.steps = Some(a.integ.steps);
        rec.method = Some(a.integ.method.name().to_owned());
        rec.grid = Some(a.grid);
        rec.result = ResultPayload::Scan(rows);
        rec.wall_time = round12(t0.elapsed().as_secs_f64());
        emit(&rec, true);
    } else if a.out.is_none() {
        print!("{}", csv_table(&rows));
    }
    Ok(0)
}

/// CSV table with a single header row; floats already rounded, printed in
/// their shortest round-trip form so every cell reparses exactly.
fn csv_table(rows: &[ScanRow]) -> String {
    let mut s = String::from("param,g1,g2,admissibility_margin\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{}\n",
            r.param, r.g1, r.g2, r.admissibility_margin
        ));
    }
    s
}

fn emit(rec: &RunRecord, json: bool) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(rec).expect("run record serializes")
        );
    } else {
        let value = serde_json::to_value(rec).expect("run record serializes");
        let mut out = String::new();
        flatten("", &value, &mut out);
        print!("{out}");
    }
}

/// Key/value text: nested structure flattened with dotted keys.
fn flatten(prefix: &str, v: &serde_json::Value, out: &mut String) {
    use serde_json::Value;
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, val, out);
            }
        }
        Value::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), val, out);
            }
        }
        Value::String(s) => {
            out.push_str(prefix);
            out.push_str(": ");
            out.push_str(s);
            out.push('\n');
        }
        other => {
            out.push_str(prefix);
            out.push_str(": ");
            out.push_str(&other.to_string());
            out.push('\n');
        }
    }
}
