//! `orlicz-lab`: command-line front end over the core toolkit. Every
//! subcommand reads a JSON config, runs the relevant solvers, and
//! emits a RunReport (JSON) with per-assertion verdicts plus optional
//! CSV traces.
//!
//! Exit codes: 0 all declared assertions pass, 1 a verdict failed,
//! 2 config/parse error, 3 unknown scenario, 4 solver consistency
//! error.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use orlicz_core::config::{RvConfig, ScenarioConfig, YoungConfig};
use orlicz_core::estimates::{cesaro_disjoint_bounds, verify_upper_q_estimate, DisjointFamily};
use orlicz_core::gallery;
use orlicz_core::komlos::komlos_extract;
use orlicz_core::komlos::ExtractMode;
use orlicz_core::norms::{dual_orlicz_norm, holder_check, luxemburg_norm, NormError};
use orlicz_core::risk::{
    continuity_from_above, continuity_from_below, dual_representation_check, penalty,
    MonetaryUtility, PenaltyConfig,
};
use orlicz_core::space::{ui_modulus, RandomVariable};
use orlicz_core::young::{delta2_index, Delta2Config, Grid};

#[derive(Parser)]
#[command(name = "orlicz-lab", version, about = "Numerical Orlicz-space toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON config file for the subcommand
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// write the JSON report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// comparison tolerance for assertions
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// seed recorded in the report (reserved for randomized configs)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// refinement ladder "k1,k2,..." overriding the config's ladder
    #[arg(long, global = true)]
    ladder: Option<String>,
    /// write trace rows as CSV here
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Luxemburg and dual Orlicz norms of one random variable
    Norm,
    /// Closed-form vs numeric Legendre conjugate on a grid
    Conjugate,
    /// Δ2 growth indices and classification
    Delta2,
    /// Inequality audits
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    /// Run the extraction engine on a scenario
    Komlos {
        /// named scenario from the built-in gallery
        #[arg(long)]
        scenario: Option<String>,
        /// combination mode: cesaro | forward
        #[arg(long, default_value = "cesaro")]
        mode: String,
    },
    /// Utility value, dual gap, and continuity probes for a position
    Risk,
    /// Built-in scenario gallery
    Scenario {
        #[command(subcommand)]
        what: ScenarioCommand,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Upper q-estimate ratios over a disjoint family
    QEstimate,
    /// Cesàro decay bounds and the exact sup identity
    Cesaro,
    /// Hölder inequality slack for one pairing
    Holder,
    /// Uniform-integrability modulus across truncation cuts
    Ui,
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// List the built-in scenarios
    List,
    /// Run one scenario (or --all) against its declared verdicts
    Run {
        name: Option<String>,
        #[arg(long)]
        all: bool,
    },
}

/// One checked claim inside a report.
#[derive(Serialize)]
struct Assertion {
    name: String,
    pass: bool,
    value: f64,
    tolerance: f64,
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    inputs_digest: String,
    seed: u64,
    assertions: Vec<Assertion>,
    wall_ms: f64,
    payload: Value,
}

enum CliError {
    Parse(String),
    UnknownScenario(String),
    SolverConsistency(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::UnknownScenario(_) => 3,
            CliError::SolverConsistency(_) => 4,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::UnknownScenario(m) | CliError::SolverConsistency(m) => m,
        }
    }
}

fn parse_err(e: impl std::fmt::Display) -> CliError {
    CliError::Parse(e.to_string())
}

fn norm_err(e: NormError) -> CliError {
    match e {
        NormError::SolverDisagreement { .. } => CliError::SolverConsistency(e.to_string()),
        other => CliError::Parse(other.to_string()),
    }
}

fn read_config(common: &Common) -> Result<(Value, String), CliError> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Parse("--config is required for this subcommand".into()))?;
    let bytes = fs::read(path).map_err(parse_err)?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let value: Value = serde_json::from_slice(&bytes).map_err(parse_err)?;
    Ok((value, digest))
}

fn field<T: serde::de::DeserializeOwned>(cfg: &Value, name: &str) -> Result<T, CliError> {
    let v = cfg
        .get(name)
        .ok_or_else(|| CliError::Parse(format!("config field '{name}' is missing")))?;
    serde_json::from_value(v.clone()).map_err(parse_err)
}

fn field_or<T: serde::de::DeserializeOwned>(cfg: &Value, name: &str, default: T) -> Result<T, CliError> {
    match cfg.get(name) {
        None => Ok(default),
        Some(v) => serde_json::from_value(v.clone()).map_err(parse_err),
    }
}

fn write_csv(common: &Common, header: &str, rows: &[Vec<f64>]) -> Result<(), CliError> {
    if let Some(path) = &common.csv {
        let mut out = String::from(header);
        out.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        fs::write(path, out).map_err(parse_err)?;
    }
    Ok(())
}

fn emit(common: &Common, report: &RunReport) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).map_err(parse_err)?;
    match &common.out {
        Some(path) => fs::write(path, text).map_err(parse_err)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn ladder_override(common: &Common) -> Result<Option<Vec<u32>>, CliError> {
    match &common.ladder {
        None => Ok(None),
        Some(s) => s
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(parse_err))
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
    }
}

fn worker_threads() -> usize {
    std::env::var("ORLICZ_LAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = dispatch(&cli);
    match result {
        Ok((name, digest, assertions, payload)) => {
            let all_pass = assertions.iter().all(|a| a.pass);
            let report = RunReport {
                command: name,
                inputs_digest: digest,
                seed: cli.common.seed,
                assertions,
                wall_ms: started.elapsed().as_secs_f64() * 1e3,
                payload,
            };
            if let Err(e) = emit(&cli.common, &report) {
                eprintln!("error: {}", e.message());
                return ExitCode::from(e.exit_code());
            }
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

type Outcome = (String, String, Vec<Assertion>, Value);

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let common = &cli.common;
    match &cli.command {
        Command::Norm => cmd_norm(common),
        Command::Conjugate => cmd_conjugate(common),
        Command::Delta2 => cmd_delta2(common),
        Command::Verify { what } => match what {
            VerifyCommand::QEstimate => cmd_verify_q(common),
            VerifyCommand::Cesaro => cmd_verify_cesaro(common),
            VerifyCommand::Holder => cmd_verify_holder(common),
            VerifyCommand::Ui => cmd_verify_ui(common),
        },
        Command::Komlos { scenario, mode } => cmd_komlos(common, scenario.as_deref(), mode),
        Command::Risk => cmd_risk(common),
        Command::Scenario { what } => match what {
            ScenarioCommand::List => cmd_scenario_list(),
            ScenarioCommand::Run { name, all } => cmd_scenario_run(common, name.as_deref(), *all),
        },
    }
}

fn cmd_norm(common: &Common) -> Result<Outcome, CliError> {
    let (cfg, digest) = read_config(common)?;
    let young: YoungConfig = field(&cfg, "young")?;
    let rv: RvConfig = field(&cfg, "rv")?;
    let phi = young.build().map_err(parse_err)?;
    let xi = rv.build().map_err(parse_err)?;
    let lux = luxemburg_norm(&xi, &phi);
    let dual = dual_orlicz_norm(&xi, &phi, common.tol).map_err(norm_err)?;
    let lux_star = luxemburg_norm(&xi, &phi.conjugate());
    let assertions = vec![
        Assertion {
            name: "dual solvers agree".into(),
            pass: dual.residual <= 10.0 * common.tol,
            value: dual.residual,
            tolerance: 10.0 * common.tol,
        },
        Assertion {
            name: "sandwich ‖ξ‖_Φ* ≤ ‖ξ‖_(Φ*) ≤ 2‖ξ‖_Φ*".into(),
            pass: lux_star.value <= dual.value + common.tol
                && dual.value <= 2.0 * lux_star.value + common.tol,
            value: dual.value,
            tolerance: common.tol,
        },
    ];
    let payload = json!({
        "luxemburg": {"value": lux.value, "solver": lux.solver, "residual": lux.residual},
        "dual": {"value": dual.value, "solver": dual.solver, "residual": dual.residual},
        "conjugate_luxemburg": {"value": lux_star.value},
    });
    Ok(("norm".into(), digest, assertions, payload))
}

fn cmd_conjugate(common: &Common) -> Result<Outcome, CliError> {
    let (cfg, digest) = read_config(common)?;
    let young: YoungConfig = field(&cfg, "young")?;
    let y_max: f64 = field_or(&cfg, "y_max", 10.0)?;
    let samples: usize = field_or(&cfg, "samples", 101)?;
    let grid_hi: f64 = field_or(&cfg, "grid_hi", 4.0 * y_max.max(1.0))?;
    let phi = young.build().map_err(parse_err)?;
    let closed = phi.conjugate();
    let numeric = phi.conjugate_numeric(&Grid::new(0.0, grid_hi, 4001));
    let mut rows = Vec::with_capacity(samples);
    let mut worst = 0.0f64;
    for i in 0..samples {
        let y = y_max * i as f64 / (samples.max(2) - 1) as f64;
        let (c, n) = (closed.eval(y), numeric.eval(y));
        let rel = (n - c).abs() / (1.0 + c.abs());
        worst = worst.max(rel);
        rows.push(vec![y, c, n, rel]);
    }
    write_csv(common, "y,closed,numeric,rel_err", &rows)?;
    let assertions = vec![Assertion {
        name: "numeric conjugate matches closed form".into(),
        pass: worst <= common.tol,
        value: worst,
        tolerance: common.tol,
    }];
    let payload = json!({
        "kind": phi.kind_tag(),
        "conjugate_kind": closed.kind_tag(),
        "worst_rel_err": worst,
        "samples": rows.iter().map(|r| json!({"y": r[0], "closed": r[1], "numeric": r[2]})).collect::<Vec<_>>(),
    });
    Ok(("conjugate".into(), digest, assertions, payload))
}

fn cmd_delta2(common: &Common) -> Result<Outcome, CliError> {
    let (cfg, digest) = read_config(common)?;
    let young: YoungConfig = field(&cfg, "young")?;
    let phi = young.build().map_err(parse_err)?;
    let rep = delta2_index(&phi, &Delta2Config::default()).map_err(parse_err)?;
    let assertions = vec![Assertion {
        name: "index scan stabilized or diverged monotonically".into(),
        pass: rep
            .cutoff_trace
            .windows(2)
            .all(|w| w[1].1 >= w[0].1 - 1e-6),
        value: rep.p_phi,
        tolerance: 1e-6,
    }];
    let payload = json!({
        "kind": phi.kind_tag(),
        "p_phi": if rep.p_phi.is_finite() { json!(rep.p_phi) } else { json!("infinity") },
        "q_phi": rep.q_phi,
        "is_delta2": rep.is_delta2,
        "cutoff_trace": rep.cutoff_trace,
        "scan_grid": rep.scan_grid,
    });
    Ok(("delta2".into(), digest, assertions, payload))
}

/// Unit atom spikes: the standard disjoint family for estimate audits.
fn spike_family(cfg: &Value) -> Result<DisjointFamily, CliError> {
    let res: u32 = field_or(cfg, "resolution", 6)?;
    let count: usize = field_or(cfg, "count", 16)?;
    let height: f64 = field_or(cfg, "height", 1.0)?;
    let space = orlicz_core::space::DyadicSpace::uniform(res);
    let count = count.min(space.atoms());
    let members = (0..count)
        .map(|i| RandomVariable::indicator(space.clone(), &[i], height))
        .collect();
    DisjointFamily::new(members).map_err(parse_err)
}

fn cmd_verify_q(common: &Common) -> Result<Outcome, CliError> {
    let (cfg, digest) = read_config(common)?;
    let young: YoungConfig = field(&cfg, "young")?;
    let phi = young.build().map_err(parse_err)?;
    let q: f64 = field(&cfg, "q")?;
    let fam = spike_family(&cfg)?;
    let mut rows = Vec::new();
    let mut battery_c = 0.0f64;
    for n in 1..=fam.len() {
        let prefix = DisjointFamily::new(fam.members()[..n].to_vec()).map_err(parse_err)?;
        let rep = verify_upper_q_estimate(&prefix, &phi, q, common.tol).map_err(parse_err)?;
        battery_c = battery_c.max(rep.empirical_c);
        rows.push(vec![n as f64, rep.lhs, rep.rhs_sum, rep.empirical_c]);
    }
    write_csv(common, "n,lhs,rhs,ratio", &rows)?;
    let assertions = vec![Assertion {
        name: "q-estimate holds with the battery constant".into(),
        pass: rows.iter().all(|r| r[1] <= battery_c * r[2] + common.tol),
        value: battery_c,
        tolerance: common.tol,
    }];
    let payload = json!({
        "q": q,
        "battery_constant": battery_c,
        "rows": rows.iter().map(|r| json!({"n": r[0], "lhs": r[1], "rhs": r[2], "ratio": r[3]})).collect::<Vec<_>>(),
    });
    Ok(("verify q-estimate".into(), digest, assertions, payload))
}

fn cmd_verify_cesaro(common: &Common) -> Result<Outcome, CliError> {
    let (cfg, digest) = read_config(common)?;
    let young: YoungConfig = field(&cfg, "young")?;
    let phi = young.build().map_err(parse_err)?;
    let q: f64 = field(&cfg, "q")?;
    let fam = spike_family(&cfg)?;
    let rep = cesaro_disjoint_bounds(&fam, &phi, q, common.tol).map_err(parse_err)?;
    let target = 1.0 / q - 1.0;
    let rows: Vec<Vec<f64>> = rep
        .norms
        .iter()
        .map(|&(n, v)| vec![n as f64, v])
        .collect();
    write_csv(common, "n,cesaro_norm", &rows)?;
    let assertions = vec![
        Assertion {
            name: "sup identity exact".into(),
            pass: rep.sup_identity_err == 0.0,
            value: rep.sup_identity_err,
            tolerance: 0.0,
        },
        Assertion {
            name: "decay exponent matches 1/q - 1".into(),
            pass: (rep.fitted_exponent - target).abs() <= 0.05,
            value: rep.fitted_exponent,
            tolerance: 0.05,
        },
        Assertion {
            name: "sup norm within the q-estimate bound".into(),
            pass: rep.sup_norm <= rep.sup_bound + common.tol,
            value: rep.sup_norm,
            tolerance: common.tol,
        },
    ];
    let payload = json!({
        "q": q,
        "fitted_exponent": rep.fitted_exponent,
        "target_exponent": target,
        "sup_norm": rep.sup_norm,
        "sup_bound": rep.sup_bound,
        "norms": rep.norms,
    });
    Ok(("verify cesaro".into(), digest, assertions, payload))
}

fn cmd_verify_holder(common: &Common) -> Result<Outcome, CliError> {
    let (cfg, digest) = read_config(common)?;
    let young: YoungConfig = field(&cfg, "young")?;
    let phi = young.build().map_err(parse_err)?;
    let eta: RvConfig = field(&cfg, "eta")?;
    let xi: RvConfig = field(&cfg, "xi")?;
    let eta = eta.build().map_err(parse_err)?;
    let xi = xi.build().map_err(parse_err)?;
    let rep = holder_check(&eta, &xi, &phi, common.tol).map_err(norm_err)?;
    let assertions = vec![Assertion {
        name: "Hölder slack nonnegative".into(),
        pass: rep.slack >= -common.tol,
        value: rep.slack,
        tolerance: common.tol,
    }];
    let payload = json!({
        "pairing": rep.pairing,
        "eta_luxemburg": rep.eta_luxemburg,
        "xi_dual": rep.xi_dual,
        "slack": rep.slack,
    });
    Ok(("verify holder".into(), digest, assertions, payload))
}

fn cmd_verify_ui(common: &Common) -> Result<Outcome, CliError> {
    let (cfg, digest) = read_config(common)?;
    let family_cfg: Vec<RvConfig> = field(&cfg, "family")?;
    let xi: RvConfig = field(&cfg, "xi")?;
    let cuts: Vec<f64> = field_or(&cfg, "cuts", vec![1.0, 2.0, 4.0, 8.0, 16.0])?;
    let family = family_cfg
        .iter()
        .map(|c| c.build().map_err(parse_err))
        .collect::<Result<Vec<_>, _>>()?;
    let xi = xi.build().map_err(parse_err)?;
    let mut rows = Vec::new();
    for &cut in &cuts {
        let m = ui_modulus(&family, &xi, cut).map_err(parse_err)?;
        rows.push(vec![cut, m]);
    }
    write_csv(common, "cut,modulus", &rows)?;
    let assertions = vec![Assertion {
        name: "UI modulus nonincreasing in the cut".into(),
        pass: rows.windows(2).all(|w| w[1][1] <= w[0][1] + 1e-12),
        value: rows.last().map(|r| r[1]).unwrap_or(0.0),
        tolerance: 1e-12,
    }];
    let payload = json!({
        "moduli": rows.iter().map(|r| json!({"cut": r[0], "modulus": r[1]})).collect::<Vec<_>>(),
    });
    Ok(("verify ui".into(), digest, assertions, payload))
}

fn cmd_komlos(common: &Common, scenario: Option<&str>, mode: &str) -> Result<Outcome, CliError> {
    let mode = match mode {
        "cesaro" => ExtractMode::Cesaro,
        "forward" => ExtractMode::ForwardConvex,
        other => return Err(CliError::Parse(format!("unknown mode '{other}'"))),
    };
    let (mut cfg, digest): (ScenarioConfig, String) = match scenario {
        Some(name) => {
            let src = gallery::scenario_source(name)
                .map_err(|e| CliError::UnknownScenario(e.to_string()))?;
            let digest = hex::encode(Sha256::digest(src.as_bytes()));
            (serde_json::from_str(src).map_err(parse_err)?, digest)
        }
        None => {
            let (value, digest) = read_config(common)?;
            (serde_json::from_value(value).map_err(parse_err)?, digest)
        }
    };
    if let Some(ladder) = ladder_override(common)? {
        cfg.ladder = ladder;
    }
    let phi = cfg.young.build().map_err(parse_err)?;
    let seq = gallery::build_sequence(&cfg).map_err(parse_err)?;
    let cert = komlos_extract(&seq, &phi.conjugate(), mode).map_err(parse_err)?;
    let rows: Vec<Vec<f64>> = cert
        .as_convergence
        .iter()
        .enumerate()
        .map(|(i, &d)| vec![(i + 1) as f64, d])
        .collect();
    write_csv(common, "combination,l0_to_limit", &rows)?;
    let shrank = cert
        .as_convergence
        .last()
        .map(|&l| l <= cert.as_convergence[0] + 1e-12)
        .unwrap_or(false);
    let assertions = vec![Assertion {
        name: "metric trace nonincreasing end to end".into(),
        pass: shrank,
        value: cert.as_convergence.last().copied().unwrap_or(0.0),
        tolerance: 1e-12,
    }];
    let payload = json!({
        "scenario": cfg.name,
        "indices": cert.indices,
        "weights": cert.weights,
        "order_bound_norm": cert.order_bound_norm,
        "modular_sum": cert.modular_sum,
        "metric_trace": cert.as_convergence,
        "stage_log": cert.stage_log,
        "limit": cert.limit.values(),
    });
    Ok(("komlos".into(), digest, assertions, payload))
}

fn build_utility(cfg: &Value) -> Result<MonetaryUtility, CliError> {
    let spec: BTreeMap<String, Value> = field(cfg, "utility")?;
    let name = spec
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Parse("utility.name is missing".into()))?;
    match name {
        "entropic" => Ok(MonetaryUtility::entropic()),
        "ess_inf" => Ok(MonetaryUtility::ess_inf()),
        "avar" => {
            let alpha = spec
                .get("alpha")
                .and_then(Value::as_f64)
                .ok_or_else(|| CliError::Parse("avar needs utility.alpha".into()))?;
            Ok(MonetaryUtility::avar(alpha))
        }
        other => Err(CliError::Parse(format!("unknown utility '{other}'"))),
    }
}

fn cmd_risk(common: &Common) -> Result<Outcome, CliError> {
    let (cfg, digest) = read_config(common)?;
    let u = build_utility(&cfg)?;
    let position: RvConfig = field(&cfg, "position")?;
    let xi = position.build().map_err(parse_err)?;
    let rep = dual_representation_check(&u, &xi, &[], common.tol).map_err(parse_err)?;
    let optimizer = rep.optimizer.clone();
    let penalty_at_optimizer = optimizer
        .as_ref()
        .map(|d| match u.closed_form_penalty(d) {
            Some(c) => Ok(c),
            None => penalty(&u, d, &PenaltyConfig::default())
                .map(|r| r.value)
                .map_err(parse_err),
        })
        .transpose()?;

    // continuity probes along a geometric envelope around the position
    let space = xi.space().clone();
    let env = RandomVariable::constant(space, 0.5);
    let down: Vec<RandomVariable> = (0..40)
        .map(|n| xi.add(&env.scale(0.5f64.powi(n))).unwrap())
        .collect();
    let up: Vec<RandomVariable> = (0..40)
        .map(|n| xi.sub(&env.scale(0.5f64.powi(n))).unwrap())
        .collect();
    let above = continuity_from_above(&u, &down, &xi, 1e-9).map_err(parse_err)?;
    let below = continuity_from_below(&u, &up, &xi, 1e-9).map_err(parse_err)?;

    let assertions = vec![
        Assertion {
            name: "dual bound dominates and closes".into(),
            pass: rep.gap >= -common.tol && rep.gap <= common.tol,
            value: rep.gap,
            tolerance: common.tol,
        },
        Assertion {
            name: "continuity from above".into(),
            pass: above.final_gap <= 1e-9,
            value: above.final_gap,
            tolerance: 1e-9,
        },
        Assertion {
            name: "continuity from below with concavity sandwich".into(),
            pass: below.final_gap <= 1e-9 && below.sandwich_slack >= -1e-9,
            value: below.sandwich_slack,
            tolerance: 1e-9,
        },
    ];
    let payload = json!({
        "utility": u.name(),
        "value": rep.u_value,
        "dual_gap": rep.gap,
        "best_bound": rep.best_bound,
        "optimizer_density": optimizer.as_ref().map(|d| d.values().to_vec()),
        "penalty_at_optimizer": penalty_at_optimizer,
        "probe_results": {
            "from_above": {"values": above.values, "final_gap": above.final_gap},
            "from_below": {"values": below.values, "final_gap": below.final_gap,
                            "sandwich_slack": below.sandwich_slack},
        },
    });
    Ok(("risk".into(), digest, assertions, payload))
}

fn cmd_scenario_list() -> Result<Outcome, CliError> {
    let names = gallery::list_scenarios();
    let digest = hex::encode(Sha256::digest(names.join(",").as_bytes()));
    Ok((
        "scenario list".into(),
        digest,
        Vec::new(),
        json!({ "scenarios": names }),
    ))
}

fn cmd_scenario_run(common: &Common, name: Option<&str>, all: bool) -> Result<Outcome, CliError> {
    let mut names: Vec<String> = if all {
        gallery::list_scenarios().iter().map(|s| s.to_string()).collect()
    } else {
        vec![name
            .ok_or_else(|| CliError::Parse("give a scenario name or --all".into()))?
            .to_string()]
    };
    names.sort();
    let mut digest_input = String::new();
    let mut configs = Vec::new();
    for n in &names {
        let src = gallery::scenario_source(n)
            .map_err(|e| CliError::UnknownScenario(e.to_string()))?;
        digest_input.push_str(src);
        let mut cfg: ScenarioConfig = serde_json::from_str(src).map_err(parse_err)?;
        if let Some(ladder) = ladder_override(common)? {
            cfg.ladder = ladder;
        }
        configs.push(cfg);
    }
    let digest = hex::encode(Sha256::digest(digest_input.as_bytes()));

    // fan out across worker threads, then merge by scenario name order
    let threads = worker_threads().min(configs.len().max(1));
    let chunk = configs.len().div_ceil(threads);
    let mut reports: Vec<gallery::ScenarioReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .chunks(chunk)
            .map(|batch| {
                scope.spawn(move || {
                    batch
                        .iter()
                        .map(|cfg| gallery::run_scenario(cfg).map_err(|e| e.to_string()))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("scenario worker panicked"))
            .collect::<Result<Vec<_>, _>>()
    })
    .map_err(CliError::Parse)?;
    reports.sort_by(|a, b| a.name.cmp(&b.name));

    let assertions = reports
        .iter()
        .map(|r| Assertion {
            name: format!("scenario {} as declared", r.name),
            pass: r.all_as_declared,
            value: r.outcomes.len() as f64,
            tolerance: 0.0,
        })
        .collect();
    let payload = json!({ "reports": reports });
    Ok(("scenario run".into(), digest, assertions, payload))
}
