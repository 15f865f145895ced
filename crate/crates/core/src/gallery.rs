//! Named scenario registry: parameterized fixture constructions with
//! declared verdict tables, loaded from embedded JSON so other tools
//! can share the same data files.

use thiserror::Error;

use crate::config::{ConfigError, ScenarioConfig};
use crate::estimates::{cesaro_disjoint_bounds, DisjointFamily, EstimateError};
use crate::komlos::{komlos_extract, non_delta2_counterexample, ExtractMode, KomlosError, RvSequence};
use crate::norms::luxemburg_norm;
use crate::space::{l0_metric, DyadicSpace, RandomVariable, SpaceError};
use crate::young::YoungFunction;

#[derive(Debug, Error)]
pub enum GalleryError {
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("unknown sequence generator '{0}'")]
    UnknownGenerator(String),
    #[error("unknown check '{0}'")]
    UnknownCheck(String),
    #[error("scenario file is malformed: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Komlos(#[from] KomlosError),
}

const SCENARIOS: &[(&str, &str)] = &[
    ("remark_2_4", include_str!("../scenarios/remark_2_4.json")),
    (
        "identity_sequence",
        include_str!("../scenarios/identity_sequence.json"),
    ),
    ("thm_3_9_exp", include_str!("../scenarios/thm_3_9_exp.json")),
    (
        "thm_3_9_quadratic_control",
        include_str!("../scenarios/thm_3_9_quadratic_control.json"),
    ),
    (
        "mixed_bounded_spikes",
        include_str!("../scenarios/mixed_bounded_spikes.json"),
    ),
    (
        "disjoint_l2_unit",
        include_str!("../scenarios/disjoint_l2_unit.json"),
    ),
];

pub fn list_scenarios() -> Vec<&'static str> {
    SCENARIOS.iter().map(|&(n, _)| n).collect()
}

pub fn scenario_source(name: &str) -> Result<&'static str, GalleryError> {
    SCENARIOS
        .iter()
        .find(|&&(n, _)| n == name)
        .map(|&(_, s)| s)
        .ok_or_else(|| GalleryError::UnknownScenario(name.into()))
}

pub fn load_scenario(name: &str) -> Result<ScenarioConfig, GalleryError> {
    Ok(serde_json::from_str(scenario_source(name)?)?)
}

/// A deterministic non-flat base position: values cycle through a
/// small signed pattern so means, norms, and spikes all differ.
fn ramp(space: &std::sync::Arc<DyadicSpace>) -> RandomVariable {
    let values = (0..space.atoms())
        .map(|i| ((i * 7 % 5) as f64 - 2.0) / 4.0)
        .collect();
    RandomVariable::new(space.clone(), values).expect("length matches")
}

/// Spikes ξ_n = P(B_n)^{-1/2}·1_{B_n} on the shrinking dyadic blocks
/// B_n = [2^{-n}, 2^{-n+1}): unit L2 norm, l0-null.
fn normalized_spike(space: &std::sync::Arc<DyadicSpace>, n: usize) -> RandomVariable {
    let block = space.atoms_in(2f64.powi(-(n as i32)), 2f64.powi(-(n as i32) + 1));
    RandomVariable::indicator(space.clone(), &block, 2f64.powf(n as f64 / 2.0))
}

/// Materializes a scenario's sequence on the top rung of its ladder.
pub fn build_sequence(cfg: &ScenarioConfig) -> Result<RvSequence, GalleryError> {
    let res = *cfg.ladder.last().expect("nonempty ladder");
    let space = DyadicSpace::uniform(res);
    let n = cfg.sequence.prefix_len;
    match cfg.sequence.name.as_str() {
        "normalized_disjoint_spikes" => {
            let count = n.min(res as usize);
            let terms = (1..=count).map(|k| normalized_spike(&space, k)).collect();
            Ok(RvSequence::new(terms, 1.0)?.with_limit(RandomVariable::zero(space)))
        }
        "constant_position" => {
            let xi = ramp(&space);
            let terms = vec![xi.clone(); n];
            Ok(RvSequence::new(terms, 1.0)?.with_limit(xi))
        }
        "unit_atom_spikes" => {
            let count = n.min(space.atoms());
            let h = (space.atoms() as f64).sqrt();
            let terms = (0..count)
                .map(|i| RandomVariable::indicator(space.clone(), &[i], h))
                .collect();
            Ok(RvSequence::new(terms, 1.0)?.with_limit(RandomVariable::zero(space)))
        }
        "mixed_bounded_spikes" => {
            // ξ_n = ζ(1 + 1/(n+1)) + spike at block log2(n) when n is a
            // power of two: the bounded part converges to ζ, the spikes
            // are disjoint and l0-null
            let zeta = ramp(&space);
            let terms = (1..=n)
                .map(|k| {
                    let mut t = zeta.scale(1.0 + 1.0 / (k + 1) as f64);
                    if k.is_power_of_two() {
                        let j = k.trailing_zeros() as usize + 1;
                        if j <= res as usize {
                            t = t.add(&normalized_spike(&space, j))?;
                        }
                    }
                    Ok(t)
                })
                .collect::<Result<Vec<_>, SpaceError>>()?;
            Ok(RvSequence::new(terms, 4.0)?.with_limit(zeta))
        }
        other => Err(GalleryError::UnknownGenerator(other.into())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub expected_pass: bool,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub outcomes: Vec<CheckOutcome>,
    pub all_as_declared: bool,
}

/// Executes every declared check of a scenario and compares the
/// verdicts against the declarations.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport, GalleryError> {
    let phi = cfg.young.build()?;
    let seq = build_sequence(cfg)?;
    let mut outcomes = Vec::new();
    for v in &cfg.verdicts {
        let (passed, detail) = run_check(&v.check, cfg, &phi, &seq, v)?;
        outcomes.push(CheckOutcome {
            check: v.check.clone(),
            expected_pass: v.expect_pass,
            verdict: if passed { Verdict::Pass } else { Verdict::Fail },
            detail,
        });
    }
    let all_as_declared = outcomes
        .iter()
        .all(|o| (o.verdict == Verdict::Pass) == o.expected_pass);
    Ok(ScenarioReport {
        name: cfg.name.clone(),
        outcomes,
        all_as_declared,
    })
}

fn run_check(
    check: &str,
    cfg: &ScenarioConfig,
    phi: &YoungFunction,
    seq: &RvSequence,
    v: &crate::config::VerdictConfig,
) -> Result<(bool, String), GalleryError> {
    match check {
        "unit_l2_norms" => {
            let tol = v.param("tol").unwrap_or(1e-9);
            let q = YoungFunction::quadratic();
            let worst = seq
                .terms()
                .iter()
                .map(|t| (luxemburg_norm(t, &q).value - 1.0).abs())
                .fold(0.0f64, f64::max);
            Ok((worst <= tol, format!("max |L2 norm - 1| = {worst:.3e}")))
        }
        "l0_null" => {
            let zero = RandomVariable::zero(seq.terms()[0].space().clone());
            let dists = seq
                .terms()
                .iter()
                .map(|t| l0_metric(t, &zero))
                .collect::<Result<Vec<_>, _>>()?;
            let monotone = dists.windows(2).all(|w| w[1] <= w[0] + 1e-15);
            let shrank = dists.last().unwrap() < &(0.5 * dists[0]);
            Ok((
                monotone && shrank,
                format!("l0 trace {:.3e} -> {:.3e}", dists[0], dists.last().unwrap()),
            ))
        }
        "extraction_trivial" => {
            let cert = komlos_extract(seq, &phi.conjugate(), ExtractMode::Cesaro)?;
            let last = *cert.as_convergence.last().unwrap();
            Ok((last < 1e-12, format!("final metric {last:.3e}")))
        }
        "komlos_certificate" => {
            let bound = v.param("order_bound_norm")?;
            let cert = komlos_extract(seq, &phi.conjugate(), ExtractMode::Cesaro)?;
            let truth = seq.declared_limit().expect("declared limit");
            let limit_err = cert.limit.sub(truth)?.max_abs();
            let last = *cert.as_convergence.last().unwrap();
            let ok = limit_err < 1e-9 && cert.order_bound_norm <= bound && last < 0.1;
            Ok((
                ok,
                format!(
                    "limit err {limit_err:.3e}, order bound norm {:.4} (cap {bound}), final metric {last:.3e}",
                    cert.order_bound_norm
                ),
            ))
        }
        "cesaro_decay" => {
            let q = v.param("q")?;
            let fam = DisjointFamily::new(seq.terms().to_vec())?;
            let rep = cesaro_disjoint_bounds(&fam, phi, q, 1e-6)?;
            let target = 1.0 / q - 1.0;
            let exp_ok = (rep.fitted_exponent - target).abs() <= 0.05;
            let ident_ok = rep.sup_identity_err == 0.0;
            let bound_ok = rep.sup_norm <= rep.sup_bound + 1e-6;
            Ok((
                exp_ok && ident_ok && bound_ok,
                format!(
                    "exponent {:.4} (target {target:.4}), sup identity err {:.1e}, sup norm {:.4} <= {:.4}",
                    rep.fitted_exponent, rep.sup_identity_err, rep.sup_norm, rep.sup_bound
                ),
            ))
        }
        "obstruction" => {
            let rep = non_delta2_counterexample(phi, &cfg.ladder)?;
            Ok((
                rep.obstruction_found && rep.convex_floor_ok,
                format!(
                    "eps {:.4} -> {:.4}, convex floor ok: {}",
                    rep.eps_first, rep.eps_last, rep.convex_floor_ok
                ),
            ))
        }
        other => Err(GalleryError::UnknownCheck(other.into())),
    }
}
