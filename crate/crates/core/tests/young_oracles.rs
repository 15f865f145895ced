//! Test-side oracles for conjugates, growth indices, and truncations:
//! every closed-form claim is recomputed here by brute force,
//! independently of the library's own solvers.

use orlicz_core::young::{
    delta2_index, make_truncated_psi, p_phi_at, Delta2Config, Grid, YoungFunction,
};

/// Brute-force conjugate: max over a dense x-grid of xy − Φ(x), no
/// refinement, no registry. Accurate to O(step²·curvature).
fn brute_conjugate(phi: &YoungFunction, y: f64, x_hi: f64, points: usize) -> f64 {
    (0..points)
        .map(|i| {
            let x = x_hi * i as f64 / (points - 1) as f64;
            x * y - phi.eval(x)
        })
        .fold(0.0f64, f64::max)
}

#[test]
fn registry_conjugates_match_brute_force() {
    // x_hi must cover the maximizer x*(y) for every scanned y: y/2 for
    // the quadratic, y^{1/(p-1)} for powers (y² = 400 for p = 3/2)
    let cases = [
        (YoungFunction::quadratic(), 12.0),
        (YoungFunction::power(3.0), 10.0),
        (YoungFunction::power(1.5), 450.0),
        (YoungFunction::entropic(), 8.0),
        (YoungFunction::exp_minus_one(), 8.0),
    ];
    for (phi, x_hi) in cases {
        let star = phi.conjugate();
        for i in 0..80 {
            let y = 0.25 * i as f64;
            let oracle = brute_conjugate(&phi, y, x_hi, 400_001);
            assert!(
                (star.eval(y) - oracle).abs() < 1e-6 * (1.0 + oracle),
                "{}: y={y}, {} vs {oracle}",
                phi.kind_tag(),
                star.eval(y)
            );
        }
    }
}

#[test]
fn numeric_conjugate_agrees_with_registry() {
    for phi in [
        YoungFunction::quadratic(),
        YoungFunction::power(3.0),
        YoungFunction::entropic(),
    ] {
        let numeric = phi.conjugate_numeric(&Grid::new(0.0, 25.0, 513));
        let closed = phi.conjugate();
        for i in 0..=100 {
            let y = 0.2 * i as f64;
            assert!(
                (numeric.eval(y) - closed.eval(y)).abs() < 1e-6 * (1.0 + closed.eval(y)),
                "{}: y={y}",
                phi.kind_tag()
            );
        }
    }
}

#[test]
fn youngs_inequality_with_equality_at_the_gradient() {
    for phi in [YoungFunction::power(2.5), YoungFunction::entropic()] {
        let star = phi.conjugate();
        for i in 1..=40 {
            let x = 0.1 * i as f64;
            for j in 1..=40 {
                let y = 0.1 * j as f64;
                assert!(x * y <= phi.eval(x) + star.eval(y) + 1e-9);
            }
            // equality when y = Φ'(x)
            let y = phi.left_deriv(x);
            let gap = phi.eval(x) + star.eval(y) - x * y;
            assert!(gap.abs() < 1e-7 * (1.0 + phi.eval(x)), "x={x}: gap {gap}");
        }
    }
}

#[test]
fn delta2_verdict_matches_doubling_ratio_oracle() {
    // classical test: limsup Φ(2x)/Φ(x) finite ⟺ Δ2, computed on the
    // same log range the index scan uses
    let cases = [
        (YoungFunction::power(1.5), true),
        (YoungFunction::quadratic(), true),
        (YoungFunction::power(4.0), true),
        (YoungFunction::exp_minus_one(), false),
        (YoungFunction::entropic(), false),
    ];
    for (phi, expect) in cases {
        let report = delta2_index(&phi, &Delta2Config::default()).unwrap();
        assert_eq!(report.is_delta2, expect, "{}", phi.kind_tag());
        // oracle: ratio at the far end of the scan
        let ratios: Vec<f64> = (1..=40)
            .map(|i| {
                let x = (i as f64).exp2().clamp(1.0, 1e15);
                phi.eval(2.0 * x.min(100.0)) / phi.eval(x.min(100.0))
            })
            .collect();
        let diverging = ratios.windows(2).all(|w| w[1] >= w[0] - 1e-9)
            && ratios.last().unwrap() > &(8.0 * ratios[0]);
        assert_eq!(!diverging, expect, "{}", phi.kind_tag());
    }
}

#[test]
fn p_index_is_exact_for_power_families() {
    for p in [1.5, 2.0, 3.0, 4.0] {
        let report = delta2_index(&YoungFunction::power(p), &Delta2Config::default()).unwrap();
        assert!((report.p_phi - p).abs() < 1e-6, "p={p}: {}", report.p_phi);
        assert!((report.q_phi - p / (p - 1.0)).abs() < 1e-6);
    }
}

#[test]
fn truncation_growth_inequality_on_grid_triples() {
    // Ψ(λx) ≤ λ^p Ψ(x) for λ ≥ 1 and any certified p
    let phi = YoungFunction::quadratic();
    let cfg = Delta2Config::default();
    for (x0, p) in [(1.0, None), (1.0, Some(2.5)), (0.5, None)] {
        let trunc = make_truncated_psi(&phi, x0, p, &cfg).unwrap();
        for lam in [1.0, 2.0, 4.0] {
            for i in 1..=60 {
                let x = 0.1 * i as f64;
                let lhs = trunc.eval(lam * x);
                let rhs = lam.powf(trunc.p) * trunc.eval(x);
                assert!(
                    lhs <= rhs * (1.0 + 1e-12) + 1e-12,
                    "x0={x0}, lam={lam}, x={x}: {lhs} vs {rhs}"
                );
            }
        }
    }
}

#[test]
fn truncation_norm_modular_inequality() {
    // ‖η‖_Ψ ≤ E[Ψ(η)]^{1/p} for test η with ‖η‖_Ψ ≤ 1
    use orlicz_core::norms::luxemburg_norm;
    use orlicz_core::space::{DyadicSpace, RandomVariable};

    let phi = YoungFunction::quadratic();
    let trunc = make_truncated_psi(&phi, 1.0, None, &Delta2Config::default()).unwrap();
    let space = DyadicSpace::uniform(2);
    let candidates = [
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.5, 0.5, 0.5, 0.5],
        vec![1.2, 0.3, 0.0, 0.4],
        vec![0.9, -0.9, 0.2, -0.1],
    ];
    for values in candidates {
        let eta = RandomVariable::new(space.clone(), values).unwrap();
        let norm = luxemburg_norm(&eta, &trunc.psi).value;
        if norm > 1.0 + 1e-9 {
            continue;
        }
        let modular = eta.expect(|v| trunc.eval(v));
        assert!(
            norm <= modular.powf(1.0 / trunc.p) + 1e-9,
            "norm {norm} vs modular^(1/p) {}",
            modular.powf(1.0 / trunc.p)
        );
    }
}

#[test]
fn p_of_x_certificate_choice_is_recorded() {
    // for each x0, the truncation records which exponent certifies it
    let phi = YoungFunction::power(3.0);
    let cfg = Delta2Config::default();
    for x0 in [0.25, 1.0, 4.0] {
        let p_at = p_phi_at(&phi, x0, &cfg).unwrap();
        let trunc = make_truncated_psi(&phi, x0, None, &cfg).unwrap();
        assert!((trunc.p - p_at).abs() < 1e-12);
        assert!(p_at >= 3.0 - 1e-6);
    }
}
