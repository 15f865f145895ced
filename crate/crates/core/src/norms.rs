//! Luxemburg norm, dual Orlicz norm, and Hölder checks on finite
//! spaces.
//!
//! The Luxemburg norm is the gauge of the modular ball
//! B_Φ = {E[Φ(ξ)] ≤ 1}. The dual Orlicz norm sup_{η ∈ B_Φ} E[ηξ] is
//! computed twice — a KKT solve on the atom vector and the
//! one-dimensional Amemiya form inf_{k>0}(1 + E[Φ*(kξ)])/k — and the
//! two routes are cross-checked.

use serde::Serialize;
use thiserror::Error;

use crate::solvers::{bisect_boundary, golden_min};
use crate::space::{RandomVariable, SpaceError};
use crate::young::YoungFunction;

#[derive(Debug, Error)]
pub enum NormError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("dual-norm solvers disagree: kkt={kkt}, amemiya={amemiya} (tol {tol})")]
    SolverDisagreement { kkt: f64, amemiya: f64, tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverTag {
    Bisection,
    Amemiya,
    DirectKkt,
}

/// Outcome of a norm computation: the value, which solver produced it,
/// the achieved residual, and (for the dual norm) the maximizing η.
#[derive(Debug, Clone)]
pub struct NormResult {
    pub value: f64,
    pub solver: SolverTag,
    pub residual: f64,
    pub witness: Option<RandomVariable>,
}

/// ‖ξ‖_Φ = inf{λ > 0 : E[Φ(ξ/λ)] ≤ 1}, by bisection on λ. On a finite
/// space the modular is continuous in λ, so at the boundary the
/// modular equals 1 for any Φ positive off zero.
pub fn luxemburg_norm(xi: &RandomVariable, phi: &YoungFunction) -> NormResult {
    let sup = xi.max_abs();
    if sup == 0.0 {
        return NormResult {
            value: 0.0,
            solver: SolverTag::Bisection,
            residual: 0.0,
            witness: None,
        };
    }
    let modular = |lam: f64| xi.expect(|v| phi.eval(v / lam));
    // grow a bracket [lo, hi] with modular(lo) > 1 >= modular(hi)
    let mut hi = sup.max(1e-12);
    while modular(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while modular(lo) <= 1.0 && lo > 1e-300 {
        lo *= 0.5;
    }
    let value = bisect_boundary(|lam| modular(lam) <= 1.0, lo, hi, 200);
    NormResult {
        value,
        solver: SolverTag::Bisection,
        residual: (modular(value) - 1.0).abs(),
        witness: None,
    }
}

/// KKT route for sup{E[ηξ] : E[Φ(η)] ≤ 1}: the maximizer satisfies
/// η_i = sign(ξ_i) (Φ')⁻¹(|ξ_i|/μ) with the multiplier μ pinned by
/// E[Φ(η)] = 1. Returns (value, witness, modular residual).
fn dual_norm_kkt(xi: &RandomVariable, phi: &YoungFunction) -> (f64, RandomVariable, f64) {
    let eta_of_mu = |mu: f64| xi.map(|v| v.signum() * phi.deriv_inverse(v.abs() / mu));
    let modular = |mu: f64| eta_of_mu(mu).expect(|v| phi.eval(v));
    let mut lo = 1.0;
    let mut hi = 1.0;
    while modular(lo) < 1.0 && lo > 1e-300 {
        lo *= 0.5;
    }
    while modular(hi) >= 1.0 && hi < 1e300 {
        hi *= 2.0;
    }
    // modular is nonincreasing in μ: boundary where it drops below 1
    let mu = bisect_boundary(|m| modular(m) <= 1.0, lo, hi, 200);
    let eta = eta_of_mu(mu);
    let value = eta.pair(xi).expect("same space");
    let residual = (eta.expect(|v| phi.eval(v)) - 1.0).abs();
    (value, eta, residual)
}

/// Amemiya route: ‖ξ‖_{(Φ*)} = inf_{k>0} (1 + E[Φ*(kξ)])/k, a
/// unimodal one-dimensional problem solved by golden section after a
/// geometric bracketing sweep.
fn dual_norm_amemiya(xi: &RandomVariable, phistar: &YoungFunction) -> f64 {
    let objective = |k: f64| {
        let m = xi.expect(|v| phistar.eval(k * v));
        if m.is_finite() {
            (1.0 + m) / k
        } else {
            f64::INFINITY
        }
    };
    let mut best_j = 0i32;
    let mut best = f64::INFINITY;
    for j in -60..=60 {
        let v = objective(2f64.powi(j));
        if v < best {
            best = v;
            best_j = j;
        }
    }
    let (_, value) = golden_min(
        objective,
        2f64.powi(best_j - 1),
        2f64.powi(best_j + 1),
        160,
    );
    value.min(best)
}

/// The dual Orlicz norm ‖ξ‖_{(Φ*)} = sup_{η∈B_Φ} E[ηξ], computed by
/// both routes and cross-checked to `tol`. A disagreement beyond 10×
/// tol flags a conjugate that was computed too coarsely.
pub fn dual_orlicz_norm(
    xi: &RandomVariable,
    phi: &YoungFunction,
    tol: f64,
) -> Result<NormResult, NormError> {
    if xi.max_abs() == 0.0 {
        return Ok(NormResult {
            value: 0.0,
            solver: SolverTag::DirectKkt,
            residual: 0.0,
            witness: None,
        });
    }
    let (kkt, eta, kkt_residual) = dual_norm_kkt(xi, phi);
    let amemiya = dual_norm_amemiya(xi, &phi.conjugate());
    let gap = (kkt - amemiya).abs();
    if gap > 10.0 * tol {
        return Err(NormError::SolverDisagreement {
            kkt,
            amemiya,
            tol,
        });
    }
    Ok(NormResult {
        value: kkt,
        solver: SolverTag::DirectKkt,
        residual: gap.max(kkt_residual),
        witness: Some(eta),
    })
}

/// Hölder slack report: E[ηξ] ≤ ‖η‖_Φ · ‖ξ‖_{(Φ*)}.
#[derive(Debug, Clone)]
pub struct HolderReport {
    pub pairing: f64,
    pub eta_luxemburg: f64,
    pub xi_dual: f64,
    pub slack: f64,
}

pub fn holder_check(
    eta: &RandomVariable,
    xi: &RandomVariable,
    phi: &YoungFunction,
    tol: f64,
) -> Result<HolderReport, NormError> {
    let pairing = eta.pair(xi)?;
    let eta_luxemburg = luxemburg_norm(eta, phi).value;
    let xi_dual = dual_orlicz_norm(xi, phi, tol)?.value;
    Ok(HolderReport {
        pairing,
        eta_luxemburg,
        xi_dual,
        slack: eta_luxemburg * xi_dual - pairing,
    })
}
