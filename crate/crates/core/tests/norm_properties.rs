//! Property-based checks of the norm axioms and the classical
//! inequalities tying the modular, the Luxemburg norm, and the dual
//! norm together.

use std::sync::Arc;

use proptest::prelude::*;

use orlicz_core::norms::{dual_orlicz_norm, holder_check, luxemburg_norm};
use orlicz_core::space::{DyadicSpace, OrderInterval, RandomVariable};
use orlicz_core::young::YoungFunction;

fn arb_phi() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        (1.5..4.0f64).prop_map(YoungFunction::power),
        Just(YoungFunction::quadratic()),
    ]
}

fn arb_rv(k: u32) -> impl Strategy<Value = RandomVariable> {
    let atoms = 1usize << k;
    proptest::collection::vec(-3.0..3.0f64, atoms).prop_map(move |values| {
        RandomVariable::new(DyadicSpace::uniform(k), values).unwrap()
    })
}

fn arb_pair(k: u32) -> impl Strategy<Value = (RandomVariable, RandomVariable)> {
    let atoms = 1usize << k;
    (
        proptest::collection::vec(-3.0..3.0f64, atoms),
        proptest::collection::vec(-3.0..3.0f64, atoms),
    )
        .prop_map(move |(a, b)| {
            let s = DyadicSpace::uniform(k);
            (
                RandomVariable::new(Arc::clone(&s), a).unwrap(),
                RandomVariable::new(s, b).unwrap(),
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn luxemburg_homogeneity(phi in arb_phi(), xi in arb_rv(3), c in -4.0..4.0f64) {
        let base = luxemburg_norm(&xi, &phi).value;
        let scaled = luxemburg_norm(&xi.scale(c), &phi).value;
        prop_assert!((scaled - c.abs() * base).abs() < 1e-7 * (1.0 + base));
    }

    #[test]
    fn luxemburg_triangle(phi in arb_phi(), (a, b) in arb_pair(3)) {
        let lhs = luxemburg_norm(&a.add(&b).unwrap(), &phi).value;
        let rhs = luxemburg_norm(&a, &phi).value + luxemburg_norm(&b, &phi).value;
        prop_assert!(lhs <= rhs + 1e-8);
    }

    #[test]
    fn luxemburg_zero_iff_zero(phi in arb_phi(), xi in arb_rv(2)) {
        let norm = luxemburg_norm(&xi, &phi).value;
        prop_assert_eq!(norm == 0.0, xi.max_abs() == 0.0);
    }

    #[test]
    fn both_norms_are_monotone(phi in arb_phi(), (a, b) in arb_pair(3)) {
        // |ξ| ≤ |η| atomwise ⇒ both norms ordered
        let small = a.abs().inf(&b.abs()).unwrap();
        let large = a.abs().sup(&b.abs()).unwrap();
        prop_assert!(
            luxemburg_norm(&small, &phi).value <= luxemburg_norm(&large, &phi).value + 1e-9
        );
        let d_small = dual_orlicz_norm(&small, &phi, 1e-6).unwrap().value;
        let d_large = dual_orlicz_norm(&large, &phi, 1e-6).unwrap().value;
        prop_assert!(d_small <= d_large + 1e-6);
    }

    #[test]
    fn modular_at_the_norm_is_one(phi in arb_phi(), xi in arb_rv(3)) {
        // E[Φ(ξ/‖ξ‖_Φ)] = 1 for ξ ≠ 0 — the Δ2 modular-norm identity
        // (every family generated here is Δ2)
        prop_assume!(xi.max_abs() > 1e-6);
        let norm = luxemburg_norm(&xi, &phi).value;
        let modular = xi.expect(|v| phi.eval(v / norm));
        prop_assert!((modular - 1.0).abs() < 1e-9, "modular {modular}");
    }

    #[test]
    fn holder_slack_nonnegative(phi in arb_phi(), (eta, xi) in arb_pair(3)) {
        let rep = holder_check(&eta, &xi, &phi, 1e-6).unwrap();
        prop_assert!(rep.slack >= -1e-6, "slack {}", rep.slack);
    }

    #[test]
    fn dual_norm_sandwich(phi in arb_phi(), xi in arb_rv(3)) {
        // ‖ξ‖_{Φ*} ≤ ‖ξ‖_{(Φ*)} ≤ 2‖ξ‖_{Φ*}
        let dual = dual_orlicz_norm(&xi, &phi, 1e-6).unwrap().value;
        let lux = luxemburg_norm(&xi, &phi.conjugate()).value;
        prop_assert!(lux <= dual + 1e-6, "{lux} vs {dual}");
        prop_assert!(dual <= 2.0 * lux + 1e-6, "{dual} vs 2*{lux}");
    }

    #[test]
    fn order_interval_is_norm_bounded(phi in arb_phi(), (zeta_raw, xi_raw) in arb_pair(3)) {
        // every ξ ∈ [−ζ,ζ] satisfies ‖ξ‖_{Φ*} ≤ ‖ζ‖_{Φ*}
        let zeta = zeta_raw.abs();
        let xi = xi_raw.inf(&zeta).unwrap().sup(&zeta.scale(-1.0)).unwrap();
        let interval = OrderInterval::new(zeta.clone()).unwrap();
        prop_assert!(interval.contains(&xi, 1e-12).unwrap());
        let phistar = phi.conjugate();
        prop_assert!(
            luxemburg_norm(&xi, &phistar).value
                <= luxemburg_norm(&zeta, &phistar).value + 1e-9
        );
    }

    #[test]
    fn dual_witness_is_feasible_and_tight(phi in arb_phi(), xi in arb_rv(2)) {
        prop_assume!(xi.max_abs() > 1e-3);
        let res = dual_orlicz_norm(&xi, &phi, 1e-6).unwrap();
        let eta = res.witness.unwrap();
        let modular = eta.expect(|v| phi.eval(v));
        prop_assert!(modular <= 1.0 + 1e-7, "witness modular {modular}");
        let pairing = eta.pair(&xi).unwrap();
        prop_assert!((pairing - res.value).abs() < 1e-7 * (1.0 + res.value));
    }
}
