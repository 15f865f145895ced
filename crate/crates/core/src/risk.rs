//! Monetary utility functions on finite spaces: evaluation, penalty
//! functions, dual representations, monotone-continuity probes, and
//! the constructive closure certificate for convex sets.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::komlos::{komlos_extract, ExtractMode, KomlosCertificate, KomlosError, RvSequence};
use crate::norms::luxemburg_norm;
use crate::space::{DyadicSpace, RandomVariable, SpaceError};
use crate::young::YoungFunction;

#[derive(Debug, Error)]
pub enum RiskError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Komlos(#[from] KomlosError),
    #[error("chain is not monotone at step {at}")]
    NonMonotoneChain { at: usize },
    #[error("axiom failure: {0}")]
    AxiomFailure(String),
    #[error("dual bound undercuts the utility by {gap} (beyond tolerance)")]
    RepresentationViolation { gap: f64 },
    #[error("sequence member {n} is outside the declared convex set")]
    MemberOutsideSet { n: usize },
}

enum Kind {
    Entropic,
    EssInf,
    /// Expected-shortfall utility at level α ∈ (0, 1]:
    /// inf{E_Q[ξ] : dQ/dP ≤ 1/α}.
    Avar(f64),
    Custom {
        name: String,
        eval: Arc<dyn Fn(&RandomVariable) -> f64 + Send + Sync>,
    },
}

/// A concave, cash-invariant, normalized functional u with u(0) = 0.
/// Carries a closed-form penalty and optimizer density when the family
/// admits one.
pub struct MonetaryUtility {
    kind: Kind,
}

impl fmt::Debug for MonetaryUtility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonetaryUtility({})", self.name())
    }
}

impl MonetaryUtility {
    /// u(ξ) = −ln E[e^{−ξ}].
    pub fn entropic() -> Self {
        MonetaryUtility {
            kind: Kind::Entropic,
        }
    }

    /// u(ξ) = min atom value (worst case).
    pub fn ess_inf() -> Self {
        MonetaryUtility { kind: Kind::EssInf }
    }

    /// Expected-shortfall utility at level α.
    pub fn avar(alpha: f64) -> Self {
        assert!(0.0 < alpha && alpha <= 1.0, "alpha in (0,1]");
        MonetaryUtility {
            kind: Kind::Avar(alpha),
        }
    }

    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(&RandomVariable) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MonetaryUtility {
            kind: Kind::Custom {
                name: name.into(),
                eval: Arc::new(eval),
            },
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            Kind::Entropic => "entropic".into(),
            Kind::EssInf => "ess_inf".into(),
            Kind::Avar(a) => format!("avar({a})"),
            Kind::Custom { name, .. } => name.clone(),
        }
    }

    pub fn eval(&self, xi: &RandomVariable) -> f64 {
        match &self.kind {
            Kind::Entropic => {
                // −ln Σ p_i e^{−ξ_i}, stabilized against overflow
                let m = xi.values().iter().cloned().fold(f64::INFINITY, f64::min);
                let z = xi.expect(|v| (-(v - m)).exp());
                m - z.ln()
            }
            Kind::EssInf => xi
                .values()
                .iter()
                .enumerate()
                .filter(|(i, _)| xi.space().weight(*i) > 0.0)
                .map(|(_, &v)| v)
                .fold(f64::INFINITY, f64::min),
            Kind::Avar(alpha) => xi.pair(&self.avar_density(xi, *alpha)).expect("same space"),
            Kind::Custom { eval, .. } => eval(xi),
        }
    }

    /// Worst density with dQ/dP ≤ 1/α: mass 1/α on the lowest atoms
    /// until the α-budget is used, a fractional atom at the boundary.
    fn avar_density(&self, xi: &RandomVariable, alpha: f64) -> RandomVariable {
        let space = xi.space().clone();
        let mut order: Vec<usize> = (0..space.atoms()).collect();
        order.sort_by(|&a, &b| xi.values()[a].partial_cmp(&xi.values()[b]).unwrap());
        let mut density = vec![0.0; space.atoms()];
        let mut remaining = 1.0f64;
        for &i in &order {
            let p = space.weight(i);
            if p == 0.0 {
                continue;
            }
            let q = (p / alpha).min(remaining);
            density[i] = q / p;
            remaining -= q;
            if remaining <= 0.0 {
                break;
            }
        }
        RandomVariable::new(space, density).expect("matching length")
    }

    /// Closed-form penalty c(Q) when the family admits one; the
    /// density is dQ/dP.
    pub fn closed_form_penalty(&self, density: &RandomVariable) -> Option<f64> {
        match &self.kind {
            Kind::Entropic => {
                // relative entropy Σ p_i d_i ln d_i
                Some(density.expect(|d| if d > 0.0 { d * d.ln() } else { 0.0 }))
            }
            Kind::EssInf => Some(0.0),
            Kind::Avar(alpha) => {
                let cap = 1.0 / alpha + 1e-9;
                if density.values().iter().all(|&d| d <= cap) {
                    Some(0.0)
                } else {
                    Some(f64::INFINITY)
                }
            }
            Kind::Custom { .. } => None,
        }
    }

    /// The density attaining the dual representation at ξ, when known
    /// in closed form.
    pub fn kkt_density(&self, xi: &RandomVariable) -> Option<RandomVariable> {
        match &self.kind {
            Kind::Entropic => {
                let m = xi.values().iter().cloned().fold(f64::INFINITY, f64::min);
                let z = xi.expect(|v| (-(v - m)).exp());
                Some(xi.map(|v| (-(v - m)).exp() / z))
            }
            Kind::EssInf => {
                let space = xi.space().clone();
                let i = (0..space.atoms())
                    .filter(|&i| space.weight(i) > 0.0)
                    .min_by(|&a, &b| xi.values()[a].partial_cmp(&xi.values()[b]).unwrap())?;
                Some(RandomVariable::indicator(
                    space.clone(),
                    &[i],
                    1.0 / space.weight(i),
                ))
            }
            Kind::Avar(alpha) => Some(self.avar_density(xi, *alpha)),
            Kind::Custom { .. } => None,
        }
    }
}

/// Search controls for the numeric penalty ascent.
#[derive(Debug, Clone)]
pub struct PenaltyConfig {
    pub passes: usize,
    pub line_iters: usize,
    pub initial_step: f64,
    /// objective still improving past this position scale → declared
    /// unbounded
    pub divergence_scale: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig {
            passes: 60,
            line_iters: 48,
            initial_step: 1.0,
            divergence_scale: 1e4,
        }
    }
}

/// Outcome of the penalty ascent: finite value with near-maximizer, or
/// +∞ with the direction along which the objective keeps growing.
#[derive(Debug, Clone)]
pub struct PenaltyResult {
    pub value: f64,
    pub argmax: Option<RandomVariable>,
    pub diverging_direction: Option<RandomVariable>,
}

/// c(Q) = sup_ξ (u(ξ) − E_Q[ξ]), by coordinate ascent with golden line
/// search from several starts, cross-checkable against
/// `closed_form_penalty`.
pub fn penalty(
    u: &MonetaryUtility,
    density: &RandomVariable,
    cfg: &PenaltyConfig,
) -> Result<PenaltyResult, RiskError> {
    let space = density.space().clone();
    let objective = |xi: &RandomVariable| -> f64 {
        let v = u.eval(xi);
        if v.is_finite() {
            v - density.pair(xi).expect("same space")
        } else {
            f64::NEG_INFINITY
        }
    };
    let starts = vec![
        RandomVariable::zero(space.clone()),
        RandomVariable::constant(space.clone(), 1.0),
        RandomVariable::constant(space.clone(), -1.0),
        density.map(|d| -d),
        density.map(|d| if d > 0.0 { -d.ln().max(-20.0) } else { 20.0 }),
    ];
    let mut best = f64::NEG_INFINITY;
    let mut best_xi = RandomVariable::zero(space.clone());
    for start in starts {
        let mut xi = start;
        let mut val = objective(&xi);
        let mut step = cfg.initial_step;
        for _ in 0..cfg.passes {
            let mut improved = false;
            for i in 0..space.atoms() {
                let base = xi.values().to_vec();
                let f = |t: f64| {
                    let mut v = base.clone();
                    v[i] = t;
                    objective(&RandomVariable::new(space.clone(), v).expect("length"))
                };
                let c = base[i];
                let (t, fv) = crate::solvers::golden_max(f, c - step, c + step, cfg.line_iters);
                if fv > val + 1e-14 {
                    let mut v = base;
                    v[i] = t;
                    xi = RandomVariable::new(space.clone(), v).expect("length");
                    val = fv;
                    improved = true;
                }
            }
            if improved {
                step *= 1.5;
            } else {
                step *= 0.5;
                if step < 1e-10 {
                    break;
                }
            }
            if xi.max_abs() > cfg.divergence_scale {
                let dir = xi.scale(1.0 / xi.max_abs());
                return Ok(PenaltyResult {
                    value: f64::INFINITY,
                    argmax: None,
                    diverging_direction: Some(dir),
                });
            }
        }
        if val > best {
            best = val;
            best_xi = xi;
        }
    }
    Ok(PenaltyResult {
        value: best,
        argmax: Some(best_xi),
        diverging_direction: None,
    })
}

/// Dual-representation audit at one position: the infimum of
/// E_Q[ξ] + c(Q) over a density family must dominate u(ξ) and close
/// the gap at the optimizer.
#[derive(Debug, Clone)]
pub struct DualCheckReport {
    pub u_value: f64,
    pub best_bound: f64,
    pub gap: f64,
    pub optimizer: Option<RandomVariable>,
}

pub fn dual_representation_check(
    u: &MonetaryUtility,
    xi: &RandomVariable,
    densities: &[RandomVariable],
    tol: f64,
) -> Result<DualCheckReport, RiskError> {
    let u_value = u.eval(xi);
    let mut best_bound = f64::INFINITY;
    let mut optimizer = None;
    let mut family: Vec<RandomVariable> = densities.to_vec();
    if let Some(kkt) = u.kkt_density(xi) {
        family.push(kkt);
    }
    for d in &family {
        let c = match u.closed_form_penalty(d) {
            Some(c) => c,
            None => penalty(u, d, &PenaltyConfig::default())?.value,
        };
        if !c.is_finite() {
            continue;
        }
        let bound = d.pair(xi)? + c;
        if bound < best_bound {
            best_bound = bound;
            optimizer = Some(d.clone());
        }
    }
    let gap = best_bound - u_value;
    if gap < -tol {
        return Err(RiskError::RepresentationViolation { gap });
    }
    Ok(DualCheckReport {
        u_value,
        best_bound,
        gap,
        optimizer,
    })
}

/// All probability densities with Q-masses on a granularity-g simplex
/// mesh: Q(atom i) = k_i/g, Σk_i = g. Exact on small spaces; guards
/// the ascent-based penalty against local maxima.
pub fn simplex_mesh_densities(space: &Arc<DyadicSpace>, granularity: usize) -> Vec<RandomVariable> {
    fn compositions(n: usize, total: usize, out: &mut Vec<Vec<usize>>, acc: &mut Vec<usize>) {
        if n == 1 {
            acc.push(total);
            out.push(acc.clone());
            acc.pop();
            return;
        }
        for k in 0..=total {
            acc.push(k);
            compositions(n - 1, total - k, out, acc);
            acc.pop();
        }
    }
    let mut parts = Vec::new();
    compositions(space.atoms(), granularity, &mut parts, &mut Vec::new());
    parts
        .into_iter()
        .filter_map(|ks| {
            let values: Vec<f64> = ks
                .iter()
                .enumerate()
                .map(|(i, &k)| {
                    let p = space.weight(i);
                    if p > 0.0 {
                        (k as f64 / granularity as f64) / p
                    } else if k == 0 {
                        0.0
                    } else {
                        f64::NAN
                    }
                })
                .collect();
            if values.iter().all(|v| v.is_finite()) {
                RandomVariable::new(space.clone(), values).ok()
            } else {
                None
            }
        })
        .collect()
}

/// Trace of a monotone-continuity probe along one chain.
#[derive(Debug, Clone)]
pub struct ChainReport {
    pub values: Vec<f64>,
    pub limit_value: f64,
    pub final_gap: f64,
    /// min over the chain of u(ξ) − ½u(ξ_n) − ½u(2ξ−ξ_n); meaningful
    /// for the from-below probe, NAN otherwise.
    pub sandwich_slack: f64,
}

fn check_monotone(chain: &[RandomVariable], decreasing: bool) -> Result<(), RiskError> {
    for (at, w) in chain.windows(2).enumerate() {
        let ok = if decreasing {
            w[1].le(&w[0], 1e-12)?
        } else {
            w[0].le(&w[1], 1e-12)?
        };
        if !ok {
            return Err(RiskError::NonMonotoneChain { at });
        }
    }
    Ok(())
}

/// ξ_n ↓ ξ ⇒ u(ξ_n) ↓ u(ξ): checks the chain is decreasing, the
/// utility values are nonincreasing, and the gap to u(ξ) closes.
pub fn continuity_from_above(
    u: &MonetaryUtility,
    chain: &[RandomVariable],
    limit: &RandomVariable,
    tol: f64,
) -> Result<ChainReport, RiskError> {
    check_monotone(chain, true)?;
    let values: Vec<f64> = chain.iter().map(|x| u.eval(x)).collect();
    for (at, w) in values.windows(2).enumerate() {
        if w[1] > w[0] + tol {
            return Err(RiskError::AxiomFailure(format!(
                "u increases along a decreasing chain at step {at}"
            )));
        }
    }
    let limit_value = u.eval(limit);
    let final_gap = (values.last().copied().unwrap_or(limit_value) - limit_value).abs();
    if final_gap > tol {
        return Err(RiskError::AxiomFailure(format!(
            "chain stalls {final_gap} away from the limit value"
        )));
    }
    Ok(ChainReport {
        values,
        limit_value,
        final_gap,
        sandwich_slack: f64::NAN,
    })
}

/// ξ_n ↑ ξ ⇒ u(ξ_n) ↑ u(ξ), plus the concavity sandwich
/// u(ξ) ≥ ½u(ξ_n) + ½u(2ξ−ξ_n) on every chain element.
pub fn continuity_from_below(
    u: &MonetaryUtility,
    chain: &[RandomVariable],
    limit: &RandomVariable,
    tol: f64,
) -> Result<ChainReport, RiskError> {
    check_monotone(chain, false)?;
    let values: Vec<f64> = chain.iter().map(|x| u.eval(x)).collect();
    for (at, w) in values.windows(2).enumerate() {
        if w[1] < w[0] - tol {
            return Err(RiskError::AxiomFailure(format!(
                "u decreases along an increasing chain at step {at}"
            )));
        }
    }
    let limit_value = u.eval(limit);
    let final_gap = (values.last().copied().unwrap_or(limit_value) - limit_value).abs();
    if final_gap > tol {
        return Err(RiskError::AxiomFailure(format!(
            "chain stalls {final_gap} away from the limit value"
        )));
    }
    let mut sandwich_slack = f64::INFINITY;
    for x in chain {
        let reflected = limit.scale(2.0).sub(x)?;
        let slack = limit_value - 0.5 * u.eval(x) - 0.5 * u.eval(&reflected);
        sandwich_slack = sandwich_slack.min(slack);
    }
    Ok(ChainReport {
        values,
        limit_value,
        final_gap,
        sandwich_slack,
    })
}

/// ξ ≤ η atomwise ⇒ u(ξ) ≤ u(η), over a batch of ordered pairs.
pub fn monotonicity_check(
    u: &MonetaryUtility,
    pairs: &[(RandomVariable, RandomVariable)],
    tol: f64,
) -> Result<(), RiskError> {
    for (k, (lo, hi)) in pairs.iter().enumerate() {
        if !lo.le(hi, 1e-12)? {
            return Err(RiskError::NonMonotoneChain { at: k });
        }
        let (ul, uh) = (u.eval(lo), u.eval(hi));
        if ul > uh + tol {
            return Err(RiskError::AxiomFailure(format!(
                "pair {k}: u(lo)={ul} > u(hi)={uh}"
            )));
        }
    }
    Ok(())
}

/// A convex set given by a membership predicate — a norm ball, an
/// acceptance set {u ≥ 0}, or any custom level set.
pub struct ConvexSetProbe {
    membership: Arc<dyn Fn(&RandomVariable) -> bool + Send + Sync>,
    pub description: String,
}

impl fmt::Debug for ConvexSetProbe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConvexSetProbe({})", self.description)
    }
}

impl ConvexSetProbe {
    pub fn new(
        description: impl Into<String>,
        membership: impl Fn(&RandomVariable) -> bool + Send + Sync + 'static,
    ) -> Self {
        ConvexSetProbe {
            membership: Arc::new(membership),
            description: description.into(),
        }
    }

    /// {‖·‖_{Φ*} ≤ λ} with slack tol.
    pub fn norm_ball(phistar: YoungFunction, lambda: f64, tol: f64) -> Self {
        ConvexSetProbe::new(format!("norm ball radius {lambda}"), move |xi| {
            luxemburg_norm(xi, &phistar).value <= lambda + tol
        })
    }

    /// Acceptance set {u ≥ 0} with slack tol.
    pub fn acceptance(u: MonetaryUtility, tol: f64) -> Self {
        let desc = format!("acceptance set of {}", u.name());
        ConvexSetProbe::new(desc, move |xi| u.eval(xi) >= -tol)
    }

    /// Half-space {E[ηξ] ≥ level}.
    pub fn half_space(eta: RandomVariable, level: f64, tol: f64) -> Self {
        ConvexSetProbe::new(format!("half-space at level {level}"), move |xi| {
            eta.pair(xi).map(|p| p >= level - tol).unwrap_or(false)
        })
    }

    pub fn contains(&self, xi: &RandomVariable) -> bool {
        (self.membership)(xi)
    }
}

/// Constructive closure audit: run the forward-convex extraction on a
/// sequence inside C, check every combination stays in C, and report
/// whether the limit (with its order bound) is a member.
#[derive(Debug)]
pub struct ClosureReport {
    pub certificate: KomlosCertificate,
    pub combinations_in_set: bool,
    pub limit_in_set: bool,
    pub limit_order_bounded: bool,
}

pub fn closure_certificate(
    set: &ConvexSetProbe,
    seq: &RvSequence,
    phistar: &YoungFunction,
) -> Result<ClosureReport, RiskError> {
    for (n, t) in seq.terms().iter().enumerate() {
        if !set.contains(t) {
            return Err(RiskError::MemberOutsideSet { n });
        }
    }
    let certificate = komlos_extract(seq, phistar, ExtractMode::ForwardConvex)?;
    let mut combinations_in_set = true;
    if let Some(rows) = &certificate.weights {
        for row in rows {
            let mut combo = RandomVariable::zero(seq.terms()[0].space().clone());
            for &(col, w) in row {
                combo = combo.add(&seq.terms()[col].scale(w))?;
            }
            if !set.contains(&combo) {
                combinations_in_set = false;
            }
        }
    }
    let limit_in_set = set.contains(&certificate.limit);
    let limit_order_bounded = certificate
        .limit
        .abs()
        .le(&certificate.order_bound, 1e-9)?;
    Ok(ClosureReport {
        certificate,
        combinations_in_set,
        limit_in_set,
        limit_order_bounded,
    })
}
