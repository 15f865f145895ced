//! Young functions, their left-derivatives, numerical Legendre
//! conjugates, and growth-index (Δ2) computation.
//!
//! A Young function here is a finite coercive even convex Φ with
//! Φ(0)=0. Closed-form families carry exact conjugates through a
//! registry; everything else falls back to a numeric conjugate that
//! maximizes xy - Φ(x) by grid argmax plus golden-section refinement
//! (the objective is concave in x, so the bracket is reliable).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solvers::{bisect_boundary, golden_max};

#[derive(Debug, Error)]
pub enum YoungError {
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("grid too coarse to certify convexity near x = {0}")]
    GridTooCoarse(f64),
    #[error("Φ vanishes at scanned point y = {0}")]
    ZeroOnScan(f64),
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

/// Uniform scan grid on [lo, hi].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        assert!(points >= 3 && hi > lo);
        Grid { lo, hi, points }
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points).map(move |i| self.lo + step * i as f64)
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }
}

#[derive(Debug, Clone)]
enum Kind {
    /// coeff · |x|^p
    Power { p: f64, coeff: f64 },
    /// e^|x| - |x| - 1
    Entropic,
    /// (1+|y|)·ln(1+|y|) - |y|; conjugate of `Entropic`
    EntropicStar,
    /// e^|x| - 1
    ExpMinusOne,
    /// |y|·ln|y| - |y| + 1 on |y| ≥ 1, zero inside; conjugate of `ExpMinusOne`
    ExpMinusOneStar,
    /// linear with `slope` on [0, x0], base Φ beyond (Ψ of the
    /// truncation construction)
    Truncated {
        base: Box<YoungFunction>,
        x0: f64,
        slope: f64,
    },
    /// breakpoints (x_i, Φ(x_i)) for 0 = x_0 < x_1 < ...; piecewise
    /// linear, extended by the last slope, evaluated evenly
    Piecewise { points: Vec<(f64, f64)> },
    /// numeric conjugate of `base`, evaluated on demand
    NumericConjugate { base: Box<YoungFunction>, grid: Grid },
}

/// A finite coercive even convex function with Φ(0)=0, together with a
/// scan cutoff `X_max` for numerical work.
#[derive(Debug, Clone)]
pub struct YoungFunction {
    kind: Kind,
    domain_cutoff: f64,
}

const DEFAULT_CUTOFF: f64 = 30.0;

impl YoungFunction {
    /// Φ(x) = |x|^p / p (the spec'd `power` family).
    pub fn power(p: f64) -> Self {
        assert!(p > 1.0, "power family needs p > 1");
        YoungFunction {
            kind: Kind::Power { p, coeff: 1.0 / p },
            domain_cutoff: DEFAULT_CUTOFF,
        }
    }

    /// Φ(x) = coeff · |x|^p.
    pub fn scaled_power(coeff: f64, p: f64) -> Self {
        assert!(p > 1.0 && coeff > 0.0);
        YoungFunction {
            kind: Kind::Power { p, coeff },
            domain_cutoff: DEFAULT_CUTOFF,
        }
    }

    /// Φ(x) = x².
    pub fn quadratic() -> Self {
        Self::scaled_power(1.0, 2.0)
    }

    /// Φ(x) = e^|x| - |x| - 1.
    pub fn entropic() -> Self {
        YoungFunction {
            kind: Kind::Entropic,
            domain_cutoff: DEFAULT_CUTOFF,
        }
    }

    /// Φ(y) = (1+|y|)ln(1+|y|) - |y|.
    pub fn entropic_star() -> Self {
        YoungFunction {
            kind: Kind::EntropicStar,
            domain_cutoff: DEFAULT_CUTOFF.exp(),
        }
    }

    /// Φ(x) = e^|x| - 1.
    pub fn exp_minus_one() -> Self {
        YoungFunction {
            kind: Kind::ExpMinusOne,
            domain_cutoff: DEFAULT_CUTOFF,
        }
    }

    /// Φ(y) = |y|ln|y| - |y| + 1 for |y| ≥ 1, 0 inside.
    pub fn exp_minus_one_star() -> Self {
        YoungFunction {
            kind: Kind::ExpMinusOneStar,
            domain_cutoff: DEFAULT_CUTOFF.exp(),
        }
    }

    /// Piecewise-linear from breakpoints `(x_i, Φ(x_i))`; must start at
    /// (0,0) with strictly increasing x and convex values. Extended by
    /// the last slope, evaluated evenly in x.
    pub fn piecewise(points: Vec<(f64, f64)>) -> Result<Self, YoungError> {
        if points.len() < 2 || points[0] != (0.0, 0.0) {
            return Err(YoungError::InvariantViolation(
                "piecewise spec must start at (0,0) with at least two points".into(),
            ));
        }
        let mut prev_slope = f64::NEG_INFINITY;
        for w in points.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if x1 <= x0 {
                return Err(YoungError::InvariantViolation(
                    "breakpoints must be strictly increasing".into(),
                ));
            }
            let slope = (y1 - y0) / (x1 - x0);
            if slope < prev_slope - 1e-12 || y1 < y0 {
                return Err(YoungError::InvariantViolation(
                    "breakpoint values must be convex and nondecreasing".into(),
                ));
            }
            prev_slope = slope;
        }
        let cutoff = points.last().unwrap().0.max(DEFAULT_CUTOFF);
        Ok(YoungFunction {
            kind: Kind::Piecewise { points },
            domain_cutoff: cutoff,
        })
    }

    pub fn with_cutoff(mut self, x_max: f64) -> Self {
        assert!(x_max > 0.0);
        self.domain_cutoff = x_max;
        self
    }

    pub fn domain_cutoff(&self) -> f64 {
        self.domain_cutoff
    }

    /// A short tag naming the family, for reports.
    pub fn kind_tag(&self) -> String {
        match &self.kind {
            Kind::Power { p, coeff } => format!("power(p={p}, coeff={coeff})"),
            Kind::Entropic => "entropic".into(),
            Kind::EntropicStar => "entropic_star".into(),
            Kind::ExpMinusOne => "exp_minus_one".into(),
            Kind::ExpMinusOneStar => "exp_minus_one_star".into(),
            Kind::Truncated { x0, .. } => format!("truncated(x0={x0})"),
            Kind::Piecewise { .. } => "piecewise".into(),
            Kind::NumericConjugate { base, .. } => format!("conjugate({})", base.kind_tag()),
        }
    }

    /// Φ(x).
    pub fn eval(&self, x: f64) -> f64 {
        let t = x.abs();
        match &self.kind {
            Kind::Power { p, coeff } => coeff * t.powf(*p),
            Kind::Entropic => t.exp_m1() - t,
            Kind::EntropicStar => (1.0 + t) * t.ln_1p() - t,
            Kind::ExpMinusOne => t.exp_m1(),
            Kind::ExpMinusOneStar => {
                if t <= 1.0 {
                    0.0
                } else {
                    t * t.ln() - t + 1.0
                }
            }
            Kind::Truncated { base, x0, slope } => {
                if t <= *x0 {
                    slope * t
                } else {
                    base.eval(t)
                }
            }
            Kind::Piecewise { points } => {
                let last = points.len() - 1;
                if t >= points[last].0 {
                    let (x0, y0) = points[last - 1];
                    let (x1, y1) = points[last];
                    let slope = (y1 - y0) / (x1 - x0);
                    return y1 + slope * (t - x1);
                }
                let j = points.partition_point(|&(bx, _)| bx <= t).max(1);
                let (x0, y0) = points[j - 1];
                let (x1, y1) = points[j];
                y0 + (y1 - y0) * (t - x0) / (x1 - x0)
            }
            Kind::NumericConjugate { base, grid } => conjugate_value(base, grid, t).1,
        }
    }

    /// Left-derivative Φ'(x) for x > 0. Closed-form families are
    /// differentiable; piecewise kinds return the left segment slope.
    pub fn left_deriv(&self, x: f64) -> f64 {
        let t = x.abs();
        match &self.kind {
            Kind::Power { p, coeff } => coeff * p * t.powf(p - 1.0),
            Kind::Entropic => t.exp_m1(),
            Kind::EntropicStar => t.ln_1p(),
            Kind::ExpMinusOne => t.exp(),
            Kind::ExpMinusOneStar => {
                if t <= 1.0 {
                    0.0
                } else {
                    t.ln()
                }
            }
            Kind::Truncated { base, x0, slope } => {
                if t <= *x0 {
                    *slope
                } else {
                    base.left_deriv(t)
                }
            }
            Kind::Piecewise { points } => {
                let last = points.len() - 1;
                let j = if t >= points[last].0 {
                    last
                } else {
                    points.partition_point(|&(bx, _)| bx < t).max(1)
                };
                let (x0, y0) = points[j - 1];
                let (x1, y1) = points[j];
                (y1 - y0) / (x1 - x0)
            }
            // by Fenchel duality the (left-)derivative of the conjugate
            // at y is the maximizer of xy - Φ(x)
            Kind::NumericConjugate { base, grid } => conjugate_value(base, grid, t).0,
        }
    }

    /// Inverse of Φ on [0, ∞): smallest x with Φ(x) ≥ u.
    pub fn inverse(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            Kind::Power { p, coeff } => return (u / coeff).powf(1.0 / p),
            Kind::ExpMinusOne => return u.ln_1p(),
            _ => {}
        }
        let mut hi = 1.0;
        while self.eval(hi) < u {
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        bisect_boundary(|x| self.eval(x) >= u, 0.0, hi, 200)
    }

    /// Left-continuous inverse of Φ': smallest x with Φ'(x) ≥ t.
    pub fn deriv_inverse(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            Kind::Power { p, coeff } => return (t / (coeff * p)).powf(1.0 / (p - 1.0)),
            Kind::Entropic => return t.ln_1p(),
            Kind::EntropicStar => return t.exp_m1(),
            Kind::ExpMinusOne => return if t <= 1.0 { 0.0 } else { t.ln() },
            Kind::ExpMinusOneStar => return t.exp(),
            _ => {}
        }
        let mut hi = 1.0;
        while self.left_deriv(hi) < t {
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        bisect_boundary(|x| self.left_deriv(x) >= t, 0.0, hi, 200)
    }

    /// Certify the Young-function invariants on a sample grid:
    /// Φ(0)=0, evenness, midpoint convexity, Φ(x)/x nondecreasing,
    /// Φ' nondecreasing with ∫₀ˣ Φ' ≈ Φ(x) by trapezoid quadrature.
    pub fn validate(&self, grid: &Grid, tol: f64) -> Result<(), YoungError> {
        if self.eval(0.0).abs() > tol {
            return Err(YoungError::InvariantViolation("Φ(0) ≠ 0".into()));
        }
        let xs: Vec<f64> = grid.iter().collect();
        for &x in &xs {
            if (self.eval(x) - self.eval(-x)).abs() > tol * (1.0 + self.eval(x).abs()) {
                return Err(YoungError::InvariantViolation(format!("Φ not even at x={x}")));
            }
        }
        let mut prev_slope = 0.0;
        let mut prev_ratio = 0.0;
        let mut integral = 0.0;
        let mut quad_budget = 0.0;
        for w in xs.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            let mid = 0.5 * (a + b);
            let scale = 1.0 + fa.abs().max(fb.abs());
            if self.eval(mid) > 0.5 * (fa + fb) + tol * scale {
                return Err(YoungError::GridTooCoarse(mid));
            }
            if b > 0.0 {
                let ratio = fb / b;
                if ratio < prev_ratio - tol * (1.0 + prev_ratio) {
                    return Err(YoungError::InvariantViolation(format!(
                        "Φ(x)/x decreases at x={b}"
                    )));
                }
                prev_ratio = ratio;
                let slope = self.left_deriv(b);
                if slope < prev_slope - tol * (1.0 + prev_slope) {
                    return Err(YoungError::InvariantViolation(format!(
                        "Φ' decreases at x={b}"
                    )));
                }
                let da = if a > 0.0 { self.left_deriv(a) } else { prev_slope };
                integral += 0.5 * (da + slope) * (b - a);
                prev_slope = slope;
                // quadrature consistency: trapezoid error on a convex
                // integrand is at most (Φ'(b) − Φ'(a))·(b − a)/2 per
                // cell, and the cells accumulate
                quad_budget += 0.5 * (slope - da).abs() * (b - a);
                let quad_tol = tol * scale + quad_budget;
                if (integral - fb).abs() > quad_tol.max(1e-6 * scale) {
                    return Err(YoungError::InvariantViolation(format!(
                        "∫Φ' drifts from Φ at x={b}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Conjugate through the closed-form registry when the family is
    /// known, numeric fallback otherwise.
    pub fn conjugate(&self) -> YoungFunction {
        match &self.kind {
            Kind::Power { p, coeff } => {
                // sup_x xy - c x^p attained at x = (y/(cp))^{1/(p-1)}
                let q = p / (p - 1.0);
                let a = (coeff * p).powf(-1.0 / (p - 1.0));
                let cq = a - coeff * a.powf(*p);
                let mut out = YoungFunction::scaled_power(cq, q);
                out.domain_cutoff = self.left_deriv(self.domain_cutoff).min(1e12);
                out
            }
            Kind::Entropic => YoungFunction::entropic_star()
                .with_cutoff(self.left_deriv(self.domain_cutoff).min(1e12)),
            Kind::EntropicStar => YoungFunction::entropic().with_cutoff(
                self.left_deriv(self.domain_cutoff).clamp(DEFAULT_CUTOFF, 1e12),
            ),
            Kind::ExpMinusOne => YoungFunction::exp_minus_one_star()
                .with_cutoff(self.left_deriv(self.domain_cutoff).min(1e12)),
            Kind::ExpMinusOneStar => YoungFunction::exp_minus_one().with_cutoff(
                self.left_deriv(self.domain_cutoff).clamp(DEFAULT_CUTOFF, 1e12),
            ),
            _ => self.conjugate_numeric(&Grid::new(0.0, self.domain_cutoff, 257)),
        }
    }

    /// Always-numeric conjugate: Φ*(y) = max_{x ∈ grid} (xy - Φ(x))
    /// with golden-section refinement around the argmax. Used as an
    /// independent route against the registry.
    pub fn conjugate_numeric(&self, grid: &Grid) -> YoungFunction {
        let cutoff = self.left_deriv(grid.hi).clamp(1.0, 1e12);
        YoungFunction {
            kind: Kind::NumericConjugate {
                base: Box::new(self.clone()),
                grid: *grid,
            },
            domain_cutoff: cutoff,
        }
    }

    /// `conjugate` as a checked operation: validates the input, builds
    /// the numeric conjugate on `grid`, and certifies the result's
    /// convexity and Young's inequality on the grid.
    pub fn conjugate_checked(&self, grid: &Grid, tol: f64) -> Result<YoungFunction, YoungError> {
        self.validate(grid, tol)?;
        let conj = self.conjugate_numeric(grid);
        // certify convexity of the result on a probe grid
        let probe = Grid::new(0.0, conj.domain_cutoff.min(1e3), 101);
        let ys: Vec<f64> = probe.iter().collect();
        for w in ys.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let (fa, fb) = (conj.eval(w[0]), conj.eval(w[1]));
            if conj.eval(mid) > 0.5 * (fa + fb) + tol * (1.0 + fa.abs().max(fb.abs())) {
                return Err(YoungError::GridTooCoarse(mid));
            }
        }
        // Young's inequality xy ≤ Φ(x) + Φ*(y) on grid pairs
        for x in grid.iter().step_by((grid.points / 16).max(1)) {
            for &y in ys.iter().step_by(8) {
                let slack = self.eval(x) + conj.eval(y) - x * y;
                if slack < -tol * (1.0 + (x * y).abs()) {
                    return Err(YoungError::InvariantViolation(format!(
                        "Young inequality fails at ({x}, {y})"
                    )));
                }
            }
        }
        Ok(conj)
    }
}

/// Numeric conjugate evaluation: returns `(argmax, value)` of
/// x ↦ x·y - Φ(x) over `[grid.lo, grid.hi]`. Grid argmax brackets the
/// maximum (the objective is concave), then three golden-section
/// rounds tighten it.
fn conjugate_value(base: &YoungFunction, grid: &Grid, y: f64) -> (f64, f64) {
    let obj = |x: f64| x * y - base.eval(x);
    let mut best_i = 0usize;
    let mut best = f64::NEG_INFINITY;
    let xs: Vec<f64> = grid.iter().collect();
    for (i, &x) in xs.iter().enumerate() {
        let v = obj(x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = if best_i == 0 { xs[0] } else { xs[best_i - 1] };
    let hi = if best_i + 1 == xs.len() {
        xs[best_i]
    } else {
        xs[best_i + 1]
    };
    let mut bracket = (lo, hi);
    let mut result = (xs[best_i], best);
    for _ in 0..3 {
        let (x, v) = golden_max(obj, bracket.0, bracket.1, 40);
        if v >= result.1 {
            result = (x, v);
        }
        let w = (bracket.1 - bracket.0) * 0.05;
        bracket = ((x - w).max(grid.lo), (x + w).min(grid.hi));
    }
    (result.0, result.1.max(0.0))
}

/// Growth-index report for a Young function: the sampled map
/// x ↦ p(x) = sup_{y>x} yΦ'(y)/Φ(y), its infimum p, the conjugate
/// exponent q = p/(p-1), and the stabilization verdict.
#[derive(Debug, Clone)]
pub struct Delta2Report {
    /// sampled (x, p(x)) pairs at the final cutoff
    pub p_phi_of_x: Vec<(f64, f64)>,
    /// inf over x of p(x); +∞ when the tail sup does not stabilize
    pub p_phi: f64,
    /// p/(p-1); 1.0 when p = +∞
    pub q_phi: f64,
    pub is_delta2: bool,
    /// (cutoff, p at that cutoff) across the doubling schedule
    pub cutoff_trace: Vec<(f64, f64)>,
    /// description of the y-grid used
    pub scan_grid: String,
}

#[derive(Debug, Clone, Copy)]
pub struct Delta2Config {
    /// points per scan
    pub scan_points: usize,
    /// base y-cutoff; the scan re-runs at 2x and 4x this value
    pub y_cutoff: f64,
    /// stabilization threshold across cutoff doublings
    pub stab_tol: f64,
}

impl Default for Delta2Config {
    fn default() -> Self {
        Delta2Config {
            scan_points: 2000,
            y_cutoff: 40.0,
            stab_tol: 1e-4,
        }
    }
}

/// Logarithmic y-grid from `lo` to `hi`.
fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (la, lb) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (la + (lb - la) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Scan start: smallest y in (0, cutoff] with Φ(y) > 0, found on a
/// log grid. Custom families may vanish near 0; the scan starts above
/// the zero set and the report records where.
fn scan_start(phi: &YoungFunction, cutoff: f64) -> Result<f64, YoungError> {
    let probes = log_grid(1e-8 * cutoff.max(1.0), cutoff, 400);
    for &y in &probes {
        if phi.eval(y) > 0.0 {
            return Ok(y);
        }
    }
    Err(YoungError::ZeroOnScan(cutoff))
}

fn p_phi_at_cutoff(phi: &YoungFunction, start: f64, cutoff: f64, points: usize) -> Result<(Vec<(f64, f64)>, f64), YoungError> {
    let ys = log_grid(start, cutoff, points);
    let mut ratios = Vec::with_capacity(ys.len());
    for &y in &ys {
        let f = phi.eval(y);
        if f <= 0.0 {
            return Err(YoungError::ZeroOnScan(y));
        }
        let mut r = y * phi.left_deriv(y) / f;
        if !r.is_finite() {
            // exp-type overflow far out: yΦ'/Φ → y
            r = y;
        }
        ratios.push(r);
    }
    // p(x) = sup over y > x: suffix maximum over the scan grid
    let mut suffix = vec![0.0; ys.len()];
    let mut acc = f64::NEG_INFINITY;
    for i in (0..ys.len()).rev() {
        acc = acc.max(ratios[i]);
        suffix[i] = acc;
    }
    let sampled: Vec<(f64, f64)> = ys.iter().copied().zip(suffix.iter().copied()).collect();
    let p = suffix.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((sampled, p))
}

/// Compute the growth index p_Φ = inf_x sup_{y>x} yΦ'(y)/Φ(y) on a
/// logarithmic scan grid. The tail sup must be stable under two
/// successive doublings of the cutoff for a Δ2 verdict; otherwise the
/// report carries p = +∞ and the divergence trace.
pub fn delta2_index(phi: &YoungFunction, cfg: &Delta2Config) -> Result<Delta2Report, YoungError> {
    let start = scan_start(phi, cfg.y_cutoff)?;
    let mut trace = Vec::new();
    let mut last_sampled = Vec::new();
    for mult in [1.0, 2.0, 4.0] {
        let cutoff = cfg.y_cutoff * mult;
        let (sampled, p) = p_phi_at_cutoff(phi, start, cutoff, cfg.scan_points)?;
        trace.push((cutoff, p));
        last_sampled = sampled;
    }
    let stabilized = (trace[1].1 - trace[0].1).abs() < cfg.stab_tol
        && (trace[2].1 - trace[1].1).abs() < cfg.stab_tol;
    let (p_phi, is_delta2) = if stabilized && trace[2].1.is_finite() {
        (trace[2].1, true)
    } else {
        (f64::INFINITY, false)
    };
    let q_phi = if p_phi.is_finite() {
        if p_phi > 1.0 {
            p_phi / (p_phi - 1.0)
        } else {
            f64::INFINITY
        }
    } else {
        1.0
    };
    Ok(Delta2Report {
        p_phi_of_x: last_sampled,
        p_phi,
        q_phi,
        is_delta2,
        cutoff_trace: trace,
        scan_grid: format!(
            "log grid, {} points on [{start:.3e}, {:.3e}], cutoff doublings x2/x4",
            cfg.scan_points, cfg.y_cutoff * 4.0
        ),
    })
}

/// p_Φ(x0) = sup_{y > x0} yΦ'(y)/Φ(y), stabilized over cutoff
/// doublings; errors with `NotApplicable` when the sup diverges.
pub fn p_phi_at(phi: &YoungFunction, x0: f64, cfg: &Delta2Config) -> Result<f64, YoungError> {
    let start = scan_start(phi, cfg.y_cutoff)?.max(x0 * (1.0 + 1e-9));
    let mut values = Vec::new();
    for mult in [1.0, 2.0, 4.0] {
        // sup over the whole scan starting just above x0, not the inf over x
        let (sampled, p) = p_phi_at_cutoff(phi, start, cfg.y_cutoff * mult, cfg.scan_points)?;
        values.push(sampled.first().map(|&(_, s)| s).unwrap_or(p));
    }
    if (values[1] - values[0]).abs() < cfg.stab_tol && (values[2] - values[1]).abs() < cfg.stab_tol
    {
        Ok(values[2])
    } else {
        Err(YoungError::NotApplicable(format!(
            "p_Φ({x0}) does not stabilize: {values:?}"
        )))
    }
}

/// The classical doubling test: limsup Φ(2x)/Φ(x) < ∞, probed on the
/// same log grid with the same cutoff-doubling stabilization rule.
/// This is the second, independent route to the Δ2 verdict.
pub fn delta2_doubling_probe(phi: &YoungFunction, cfg: &Delta2Config) -> Result<bool, YoungError> {
    let start = scan_start(phi, cfg.y_cutoff)?;
    let mut sups = Vec::new();
    for mult in [1.0, 2.0, 4.0] {
        let ys = log_grid(start, cfg.y_cutoff * mult, cfg.scan_points);
        // tail sup of the doubling ratio over the upper half of the grid
        let mut sup: f64 = 0.0;
        for &y in &ys[ys.len() / 2..] {
            let f = phi.eval(y);
            if f <= 0.0 {
                return Err(YoungError::ZeroOnScan(y));
            }
            let r = phi.eval(2.0 * y) / f;
            sup = sup.max(if r.is_finite() { r } else { f64::INFINITY });
        }
        sups.push(sup);
    }
    let rel = |a: f64, b: f64| (a - b).abs() / (1.0 + a.abs().min(b.abs()));
    Ok(sups.iter().all(|s| s.is_finite()) && rel(sups[1], sups[0]) < 0.05 && rel(sups[2], sups[1]) < 0.05)
}

/// The truncation Ψ of Φ at x0: linear with slope Φ(x0)/x0 on [0, x0],
/// equal to Φ beyond. Ψ is a Δ2-Young function with
/// Ψ(λx) ≤ λ^p Ψ(x) for λ ≥ 1 whenever p ≥ p_Φ(x0).
#[derive(Debug, Clone)]
pub struct TruncatedPsi {
    pub psi: YoungFunction,
    pub x0: f64,
    /// certified growth exponent (p_Φ(x0) by default)
    pub p: f64,
}

impl TruncatedPsi {
    pub fn eval(&self, x: f64) -> f64 {
        self.psi.eval(x)
    }
}

/// Build the truncation Ψ of `phi` at `x0`. Fails with `NotApplicable`
/// when p_Φ(x0) = ∞ (no valid exponent exists). An explicit `p` above
/// the computed p_Φ(x0) may be supplied.
pub fn make_truncated_psi(
    phi: &YoungFunction,
    x0: f64,
    p: Option<f64>,
    cfg: &Delta2Config,
) -> Result<TruncatedPsi, YoungError> {
    assert!(x0 > 0.0);
    let p_at = p_phi_at(phi, x0, cfg)?;
    let p = match p {
        Some(explicit) => {
            if explicit < p_at - cfg.stab_tol {
                return Err(YoungError::NotApplicable(format!(
                    "requested p={explicit} is below p_Φ(x0)={p_at}"
                )));
            }
            explicit
        }
        None => p_at,
    };
    let fx0 = phi.eval(x0);
    if fx0 <= 0.0 {
        return Err(YoungError::NotApplicable("Φ(x0) must be positive".into()));
    }
    let slope = fx0 / x0;
    let psi = YoungFunction {
        kind: Kind::Truncated {
            base: Box::new(phi.clone()),
            x0,
            slope,
        },
        domain_cutoff: phi.domain_cutoff,
    };
    Ok(TruncatedPsi { psi, x0, p })
}
