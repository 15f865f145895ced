//! Utility-functional integration: penalty ascent against the relative
//! entropy closed form, dual-representation gaps over simplex meshes,
//! monotone-continuity chains in both directions, the Lipschitz shadow
//! of cash invariance, and constructive closure certificates.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orlicz_core::komlos::RvSequence;
use orlicz_core::risk::{
    closure_certificate, continuity_from_above, continuity_from_below, dual_representation_check,
    monotonicity_check, penalty, simplex_mesh_densities, ConvexSetProbe, MonetaryUtility,
    PenaltyConfig,
};
use orlicz_core::space::{DyadicSpace, RandomVariable};
use orlicz_core::young::YoungFunction;

fn ramp(space: &Arc<DyadicSpace>, scale: f64) -> RandomVariable {
    let values = (0..space.atoms())
        .map(|i| scale * (((i * 7 % 5) as f64 - 2.0) / 4.0))
        .collect();
    RandomVariable::new(space.clone(), values).unwrap()
}

fn random_density(space: &Arc<DyadicSpace>, rng: &mut ChaCha8Rng) -> RandomVariable {
    // positive values normalized so E[d] = 1
    let raw: Vec<f64> = (0..space.atoms()).map(|_| rng.gen_range(0.1..3.0)).collect();
    let d = RandomVariable::new(space.clone(), raw).unwrap();
    let mean = d.mean();
    d.scale(1.0 / mean)
}

#[test]
fn entropic_penalty_ascent_matches_relative_entropy() {
    // c(Q) = E[dQ/dP · ln dQ/dP]; the ascent includes the exact argmax
    // ξ = −ln(dQ/dP) among its starts, so it lands on the closed form
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = MonetaryUtility::entropic();
    for k in [1u32, 2] {
        let space = DyadicSpace::uniform(k);
        for _ in 0..5 {
            let d = random_density(&space, &mut rng);
            let closed = u.closed_form_penalty(&d).unwrap();
            let numeric = penalty(&u, &d, &PenaltyConfig::default()).unwrap();
            assert!(
                (numeric.value - closed).abs() < 1e-8,
                "atoms=2^{k}: {} vs {closed}",
                numeric.value
            );
        }
    }
}

#[test]
fn avar_penalty_diverges_past_the_density_cap() {
    // dQ/dP > 1/α on some atom ⇒ c(Q) = +∞; the ascent reports the
    // diverging direction instead of a finite value
    let space = DyadicSpace::uniform(1);
    let u = MonetaryUtility::avar(0.5);
    let over_cap = RandomVariable::new(space.clone(), vec![2.5, -0.5]).unwrap();
    assert_eq!(u.closed_form_penalty(&over_cap), Some(f64::INFINITY));
    let numeric = penalty(&u, &over_cap, &PenaltyConfig::default()).unwrap();
    assert!(numeric.value.is_infinite());
    assert!(numeric.diverging_direction.is_some());
    // within the cap the penalty is zero
    let inside = RandomVariable::new(space, vec![1.6, 0.4]).unwrap();
    let numeric = penalty(&u, &inside, &PenaltyConfig::default()).unwrap();
    assert!(numeric.value.abs() < 1e-6, "got {}", numeric.value);
}

#[test]
fn dual_representation_closes_on_mesh_plus_kkt() {
    // inf_Q (E_Q[ξ] + c(Q)) over a simplex mesh dominates u(ξ) and the
    // appended KKT density closes the gap
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let space = DyadicSpace::uniform(2);
    let mesh = simplex_mesh_densities(&space, 8);
    for u in [
        MonetaryUtility::entropic(),
        MonetaryUtility::ess_inf(),
        MonetaryUtility::avar(0.4),
    ] {
        for _ in 0..5 {
            let values: Vec<f64> = (0..space.atoms()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let xi = RandomVariable::new(space.clone(), values).unwrap();
            let rep = dual_representation_check(&u, &xi, &mesh, 1e-9).unwrap();
            assert!(rep.gap >= -1e-9, "{}: gap {}", u.name(), rep.gap);
            assert!(rep.gap < 1e-7, "{}: gap {} did not close", u.name(), rep.gap);
        }
    }
}

#[test]
fn monotone_chains_converge_in_both_directions() {
    // ξ_n ↓ ξ and ξ_n ↑ ξ with geometric envelopes: utility values
    // track the chain and close the gap at the limit
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let space = DyadicSpace::uniform(3);
    for u in [
        MonetaryUtility::entropic(),
        MonetaryUtility::ess_inf(),
        MonetaryUtility::avar(0.3),
    ] {
        for _ in 0..20 {
            let values: Vec<f64> = (0..space.atoms()).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let xi = RandomVariable::new(space.clone(), values).unwrap();
            let env_vals: Vec<f64> = (0..space.atoms()).map(|_| rng.gen_range(0.1..1.0)).collect();
            let envelope = RandomVariable::new(space.clone(), env_vals).unwrap();
            let down: Vec<RandomVariable> = (0..40)
                .map(|n| xi.add(&envelope.scale(0.5f64.powi(n))).unwrap())
                .collect();
            let up: Vec<RandomVariable> = (0..40)
                .map(|n| xi.sub(&envelope.scale(0.5f64.powi(n))).unwrap())
                .collect();
            let above = continuity_from_above(&u, &down, &xi, 1e-9).unwrap();
            assert!(above.final_gap <= 1e-9);
            let below = continuity_from_below(&u, &up, &xi, 1e-9).unwrap();
            assert!(below.final_gap <= 1e-9);
            // concavity sandwich holds on every rung of the rising chain
            assert!(below.sandwich_slack >= -1e-9, "{}", below.sandwich_slack);
        }
    }
}

#[test]
fn from_below_implies_from_above_on_mirrored_chains() {
    // the reflected chain 2ξ − ξ_n of a rising chain is a falling
    // chain to the same limit; continuity transfers across reflection
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let space = DyadicSpace::uniform(2);
    for u in [MonetaryUtility::entropic(), MonetaryUtility::avar(0.6)] {
        for _ in 0..10 {
            let values: Vec<f64> = (0..space.atoms()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let xi = RandomVariable::new(space.clone(), values).unwrap();
            let env = RandomVariable::constant(space.clone(), rng.gen_range(0.2..0.8));
            let up: Vec<RandomVariable> = (0..40)
                .map(|n| xi.sub(&env.scale(0.5f64.powi(n))).unwrap())
                .collect();
            continuity_from_below(&u, &up, &xi, 1e-9).unwrap();
            let mirrored: Vec<RandomVariable> =
                up.iter().map(|x| xi.scale(2.0).sub(x).unwrap()).collect();
            continuity_from_above(&u, &mirrored, &xi, 1e-9).unwrap();
        }
    }
}

#[test]
fn cash_invariance_gives_a_lipschitz_shadow() {
    // |u(ξ + h) − u(ξ)| ≤ ‖h‖_∞ follows from monotonicity plus cash
    // invariance; along an order-bounded alternating perturbation the
    // utility values converge at the perturbation's own rate
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let space = DyadicSpace::uniform(3);
    for u in [
        MonetaryUtility::entropic(),
        MonetaryUtility::ess_inf(),
        MonetaryUtility::avar(0.25),
    ] {
        let values: Vec<f64> = (0..space.atoms()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let xi = RandomVariable::new(space.clone(), values).unwrap();
        let delta = ramp(&space, 1.0);
        let base = u.eval(&xi);
        for n in 1..60usize {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let pert = xi.add(&delta.scale(sign / n as f64)).unwrap();
            let cap = delta.max_abs() / n as f64;
            assert!(
                (u.eval(&pert) - base).abs() <= cap + 1e-12,
                "{} at n={n}",
                u.name()
            );
        }
    }
}

#[test]
fn monotonicity_over_ordered_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let space = DyadicSpace::uniform(3);
    let mut pairs = Vec::new();
    for _ in 0..30 {
        let lo_vals: Vec<f64> = (0..space.atoms()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let bump: Vec<f64> = (0..space.atoms()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let lo = RandomVariable::new(space.clone(), lo_vals).unwrap();
        let hi = lo
            .add(&RandomVariable::new(space.clone(), bump).unwrap())
            .unwrap();
        pairs.push((lo, hi));
    }
    for u in [
        MonetaryUtility::entropic(),
        MonetaryUtility::ess_inf(),
        MonetaryUtility::avar(0.5),
    ] {
        monotonicity_check(&u, &pairs, 1e-10).unwrap();
    }
}

#[test]
fn closure_certificate_for_a_norm_ball() {
    // terms shrink toward ζ inside a norm ball: every forward convex
    // combination stays in the ball and so does the limit
    let space = DyadicSpace::uniform(6);
    let phistar = YoungFunction::quadratic();
    let zeta = ramp(&space, 1.0);
    let terms: Vec<RandomVariable> = (1..=48usize)
        .map(|n| zeta.scale(1.0 + 1.0 / (n + 1) as f64))
        .collect();
    let seq = RvSequence::new(terms, 2.0).unwrap().with_limit(zeta.clone());
    let radius = orlicz_core::norms::luxemburg_norm(&zeta.scale(1.5), &phistar).value + 0.01;
    let ball = ConvexSetProbe::norm_ball(phistar.clone(), radius, 1e-9);
    let report = closure_certificate(&ball, &seq, &phistar).unwrap();
    assert!(report.combinations_in_set);
    assert!(report.limit_in_set);
    assert!(report.limit_order_bounded);
}

#[test]
fn closure_certificate_for_an_acceptance_set() {
    // positions 1 + ζ/(n+1) are all acceptable under the entropic
    // utility and so is the constant limit
    let space = DyadicSpace::uniform(6);
    let phistar = YoungFunction::quadratic();
    let one = RandomVariable::constant(space.clone(), 1.0);
    let zeta = ramp(&space, 1.0);
    let terms: Vec<RandomVariable> = (1..=48usize)
        .map(|n| one.add(&zeta.scale(1.0 / (n + 1) as f64)).unwrap())
        .collect();
    let seq = RvSequence::new(terms, 3.0).unwrap().with_limit(one.clone());
    let set = ConvexSetProbe::acceptance(MonetaryUtility::entropic(), 1e-9);
    assert!(set.contains(&one));
    let report = closure_certificate(&set, &seq, &phistar).unwrap();
    assert!(report.combinations_in_set);
    assert!(report.limit_in_set);
    assert!(report.limit_order_bounded);
}

#[test]
fn closure_certificate_detects_an_escaping_half_space()
{
    // disjoint spikes keep a constant pairing with η, so every convex
    // combination stays in the half-space, but the l0 limit is zero
    // and falls out: the certificate must report that honestly
    let space = DyadicSpace::uniform(10);
    let phistar = YoungFunction::quadratic();
    let spikes: Vec<RandomVariable> = (1..=10usize)
        .map(|n| {
            let block = space.atoms_in(2f64.powi(-(n as i32)), 2f64.powi(-(n as i32) + 1));
            RandomVariable::indicator(space.clone(), &block, 2f64.powf(n as f64 / 2.0))
        })
        .collect();
    // η matches each spike on its own block: E[η ξ_n] = 1 for all n
    let mut eta = RandomVariable::zero(space.clone());
    for s in &spikes {
        eta = eta.add(s).unwrap();
    }
    let set = ConvexSetProbe::half_space(eta, 0.9, 1e-9);
    for s in &spikes {
        assert!(set.contains(s));
    }
    let seq = RvSequence::new(spikes, 1.5).unwrap();
    let report = closure_certificate(&set, &seq, &phistar).unwrap();
    assert!(report.combinations_in_set, "convex combinations stay in");
    assert!(!report.limit_in_set, "the l0 limit escapes the half-space");
}
