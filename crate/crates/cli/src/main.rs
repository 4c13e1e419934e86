// SPDX-License-Identifier: Apache-2.0

//! `enrel`: energy-reliability bounds, allocations and exact evaluation for
//! formulas of noisy gates.
//!
//! Exit codes: 0 success, 1 internal failure, 2 usage or domain error,
//! 3 solver did not converge or could not certify its result.

mod output;
mod source;

use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use energy_reliability::alloc::{self, max_reliability_alloc, min_energy_alloc, AllocError, KktReport, SolveStats};
use energy_reliability::bounds::{
    bound_corollary1, bound_graph_specific, bound_theorem1, make_target, BoundReport, BoundsError,
};
use energy_reliability::circuit::{CircuitError, GateTree};
use energy_reliability::efmodel::{EnergyFailureModel, ModelError};
use energy_reliability::evaluate::{eval_report, info_audit, EvalError, EvalReport, InfoAudit};
use energy_reliability::sweep::{linear_grid, run_sweep, SweepConfig, SweepError};

use output::{num, nums, write_csv, write_json};
use source::{load_circuit, parse_kind};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Solver(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Usage(_) | CliError::Domain(_) => 2,
            CliError::Solver(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Solver(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<AllocError> for CliError {
    fn from(e: AllocError) -> Self {
        match e {
            AllocError::NonConvergence { .. } => CliError::Solver(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Alloc(a) => a.into(),
            other => CliError::Domain(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "enrel", version, about = "Energy-reliability analysis of formulas built from noisy gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower bounds on total energy at a uniform operating point.
    Bound(BoundArgs),
    /// Minimum-energy or maximum-reliability allocation.
    Alloc(AllocArgs),
    /// Exact error probabilities and information audit.
    Evaluate(EvalArgs),
    /// Budget sweep comparing optimized and uniform allocations.
    Sweep(SweepArgs),
    /// Emit a circuit file.
    Gen(GenArgs),
    /// Check that an energy-failure model is physical.
    ValidateModel(ModelArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ModelArgs {
    /// `exp:eps0:c`, `poly:eps0:beta` or `sexp:eps0:c:beta`.
    #[arg(long, default_value = "exp:0.5:1")]
    model: String,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<String>,
}

impl ModelArgs {
    fn model(&self) -> Result<EnergyFailureModel, CliError> {
        Ok(self.model.parse()?)
    }
}

#[derive(Args)]
struct BoundArgs {
    /// Circuit file or generator spec (`balanced:k:d:kind`, `line:m:kind`).
    #[arg(long, conflicts_with_all = ["n", "scaling"])]
    circuit: Option<String>,
    /// Number of inputs.
    #[arg(long)]
    n: Option<usize>,
    /// Maximum gate fan-in.
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated input counts for a scaling table.
    #[arg(long, value_delimiter = ',')]
    scaling: Vec<usize>,
    #[arg(long)]
    delta: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    common: ModelArgs,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("goal").required(true).args(["gamma", "delta", "budget"])))]
struct AllocArgs {
    #[arg(long)]
    circuit: String,
    /// Common path sum for the minimum-energy problem.
    #[arg(long)]
    gamma: Option<f64>,
    /// Reliability target for the minimum-energy problem.
    #[arg(long)]
    delta: Option<f64>,
    /// Energy budget for the maximum-reliability problem.
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long, default_value_t = alloc::DEFAULT_ETA)]
    eta: f64,
    #[arg(long, default_value_t = alloc::DEFAULT_THETA)]
    theta: f64,
    #[command(flatten)]
    common: ModelArgs,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("noise").required(true).args(["eps", "allocation"])))]
struct EvalArgs {
    #[arg(long)]
    circuit: String,
    /// Per-gate failure probabilities (comma-separated), or one value for all gates.
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Allocation JSON as written by `alloc`.
    #[arg(long)]
    allocation: Option<String>,
    /// Comma-separated inputs to audit.
    #[arg(long, value_delimiter = ',')]
    audit: Vec<usize>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// Budget grid in units of 1/c, as `start:stop:steps`.
    #[arg(long, default_value = "2:12:11")]
    grid: String,
    /// Comma-separated gate kinds.
    #[arg(long, value_delimiter = ',', default_value = "AND,OR,XOR")]
    kinds: Vec<String>,
    #[arg(long, default_value_t = alloc::DEFAULT_ETA)]
    eta: f64,
    #[arg(long, default_value_t = alloc::DEFAULT_THETA)]
    theta: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    common: ModelArgs,
}

#[derive(Args)]
struct GenArgs {
    /// Generator spec (`balanced:k:d:kind`, `line:m:kind`) or circuit file.
    spec: String,
    #[arg(long)]
    out: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bound(a) => cmd_bound(a),
        Command::Alloc(a) => cmd_alloc(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Gen(a) => cmd_gen(a),
        Command::ValidateModel(a) => cmd_validate_model(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

const BOUND_HEADER: [&str; 8] = ["n", "k", "delta", "model", "kind", "bound", "bound_per_input", "flag"];

fn bound_row(r: &BoundReport) -> Vec<String> {
    let flag = serde_json::to_value(r.flag).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    vec![
        r.n.to_string(),
        r.k.to_string(),
        num(r.target.delta),
        r.model.to_string(),
        r.kind.to_string(),
        num(r.bound_energy),
        num(r.per_input()),
        flag,
    ]
}

fn cmd_bound(a: &BoundArgs) -> Result<u8, CliError> {
    let model = a.common.model()?;
    let target = make_target(a.delta)?;
    let reports = if let Some(src) = &a.circuit {
        vec![bound_graph_specific(&load_circuit(src)?, &model, &target)?]
    } else {
        let k = a.k.ok_or_else(|| CliError::Usage("--k is required without --circuit".into()))?;
        let ns: Vec<usize> = match (a.n, a.scaling.is_empty()) {
            (Some(n), true) => vec![n],
            (None, false) => a.scaling.clone(),
            (Some(n), false) => std::iter::once(n).chain(a.scaling.iter().copied()).collect(),
            (None, true) => return Err(CliError::Usage("give --circuit, --n or --scaling".into())),
        };
        let mut out = Vec::new();
        for n in ns {
            out.push(bound_theorem1(n, k, &model, &target)?);
            out.push(bound_corollary1(n, k, &model, &target)?);
        }
        out
    };
    match a.format {
        Format::Json => write_json(a.common.out.as_deref(), &reports)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports.iter().map(bound_row).collect();
            write_csv(a.common.out.as_deref(), &BOUND_HEADER, &rows)?
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct AllocOutput {
    model: String,
    mode: &'static str,
    total_energy: f64,
    gates: Vec<alloc::GateAllocation>,
    kkt: KktReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<SolveStats>,
    certified: bool,
}

fn check_tolerances(eta: f64, theta: f64) -> Result<(), CliError> {
    for (name, v) in [("eta", eta), ("theta", theta)] {
        if !(v > 0.0 && v <= 1e-2) {
            return Err(CliError::Domain(format!("--{name} must lie in (0, 0.01], got {v}")));
        }
    }
    Ok(())
}

fn cmd_alloc(a: &AllocArgs) -> Result<u8, CliError> {
    check_tolerances(a.eta, a.theta)?;
    let model = a.common.model()?;
    let tree = load_circuit(&a.circuit)?;
    let out = if let Some(budget) = a.budget {
        let sol = max_reliability_alloc(&tree, &model, budget, a.theta, a.eta)?;
        AllocOutput {
            model: model.to_string(),
            mode: "max_reliability",
            total_energy: sol.allocation.total_energy,
            gates: sol.allocation.gates(),
            kkt: sol.kkt,
            gamma: None,
            delta: None,
            budget: Some(budget),
            eth: Some(sol.eth),
            y_min: Some(sol.y_min),
            delta_min: Some(sol.delta_min),
            stats: None,
            certified: sol.kkt.certified(a.eta, a.theta),
        }
    } else {
        let (gamma, delta) = match (a.gamma, a.delta) {
            (Some(g), _) => (g, None),
            (None, Some(d)) => (make_target(d)?.gamma, Some(d)),
            (None, None) => unreachable!("clap requires a goal"),
        };
        let sol = min_energy_alloc(&tree, &model, gamma, a.eta)?;
        let certified = sol.kkt.certified(a.eta, a.theta);
        AllocOutput {
            model: model.to_string(),
            mode: "min_energy",
            total_energy: sol.allocation.total_energy,
            gates: sol.allocation.gates(),
            kkt: sol.kkt,
            gamma: Some(gamma),
            delta,
            budget: None,
            eth: None,
            y_min: None,
            delta_min: None,
            stats: Some(sol.stats),
            certified,
        }
    };
    write_json(a.common.out.as_deref(), &out)?;
    if out.certified {
        Ok(0)
    } else {
        eprintln!("error: allocation residuals exceed the requested tolerance");
        Ok(3)
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum AuditRow {
    Sensitive(InfoAudit),
    Insensitive { input: usize, sensitive: bool },
}

#[derive(Serialize)]
struct EvalOutput {
    #[serde(flatten)]
    report: EvalReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    audit: Vec<AuditRow>,
}

fn read_allocation(path: &str) -> Result<Vec<f64>, CliError> {
    #[derive(serde::Deserialize)]
    struct Gate {
        id: usize,
        eps: f64,
    }
    #[derive(serde::Deserialize)]
    struct File {
        gates: Vec<Gate>,
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read `{path}`: {e}")))?;
    let file: File =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed allocation `{path}`: {e}")))?;
    let mut eps = vec![f64::NAN; file.gates.len()];
    for g in file.gates {
        *eps.get_mut(g.id).ok_or_else(|| CliError::Usage(format!("gate id {} out of range", g.id)))? = g.eps;
    }
    Ok(eps)
}

fn noise(a: &EvalArgs, tree: &GateTree) -> Result<Vec<f64>, CliError> {
    if let Some(path) = &a.allocation {
        return read_allocation(path);
    }
    match a.eps.as_slice() {
        [single] => Ok(vec![*single; tree.len()]),
        many => Ok(many.to_vec()),
    }
}

fn cmd_evaluate(a: &EvalArgs) -> Result<u8, CliError> {
    let tree = load_circuit(&a.circuit)?;
    let eps = noise(a, &tree)?;
    let report = eval_report(&tree, &eps)?;
    let mut audit = Vec::new();
    for &i in &a.audit {
        audit.push(match info_audit(&tree, &eps, i)? {
            Some(row) => AuditRow::Sensitive(row),
            None => AuditRow::Insensitive { input: i, sensitive: false },
        });
    }
    write_json(a.out.as_deref(), &EvalOutput { report, audit })?;
    Ok(0)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("grid must be start:stop:steps, got `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, steps] = parts.as_slice() else {
        return Err(bad());
    };
    let start: f64 = start.parse().map_err(|_| bad())?;
    let stop: f64 = stop.parse().map_err(|_| bad())?;
    let steps: usize = steps.parse().map_err(|_| bad())?;
    if steps == 0 {
        return Err(CliError::Usage("grid is empty".into()));
    }
    Ok(linear_grid(start, stop, steps))
}

const SWEEP_HEADER: [&str; 13] = [
    "gridpoint",
    "budget",
    "structure",
    "gate_kind",
    "allocation_kind",
    "status",
    "total_energy",
    "energies",
    "eps",
    "max_path_sum",
    "entropy_limit",
    "worst_delta",
    "cond_error_entropy",
];

fn cmd_sweep(a: &SweepArgs) -> Result<u8, CliError> {
    check_tolerances(a.eta, a.theta)?;
    let model = a.common.model()?;
    let grid = parse_grid(&a.grid)?;
    let kinds = a.kinds.iter().map(|k| parse_kind(k)).collect::<Result<Vec<_>, _>>()?;
    let mut cfg = SweepConfig::new(model, grid, kinds);
    cfg.eta = a.eta;
    cfg.theta = a.theta;
    let rows = run_sweep(&cfg)?;
    match a.format {
        Format::Json => write_json(a.common.out.as_deref(), &rows)?,
        Format::Csv => {
            let records: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        num(r.gridpoint),
                        num(r.budget),
                        r.structure.name().to_string(),
                        r.gate_kind.clone(),
                        r.allocation_kind.name().to_string(),
                        r.status.name().to_string(),
                        num(r.total_energy),
                        nums(&r.energies),
                        nums(&r.eps),
                        num(r.max_path_sum),
                        num(r.entropy_limit),
                        num(r.worst_delta),
                        num(r.cond_error_entropy),
                    ]
                })
                .collect();
            write_csv(a.common.out.as_deref(), &SWEEP_HEADER, &records)?
        }
    }
    Ok(0)
}

fn cmd_gen(a: &GenArgs) -> Result<u8, CliError> {
    let tree = load_circuit(&a.spec)?;
    let mut w = output::sink(a.out.as_deref())?;
    writeln!(w, "{}", tree.to_json()).and_then(|_| w.flush()).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(0)
}

fn cmd_validate_model(a: &ModelArgs) -> Result<u8, CliError> {
    let report = a.model()?.validate_physical();
    write_json(a.out.as_deref(), &report)?;
    Ok(if report.passed() { 0 } else { 1 })
}
