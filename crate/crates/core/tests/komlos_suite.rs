//! Extraction-engine integration: splitting known mixtures, selection
//! index growth, certificate soundness, and the partial-progress error
//! paths.

use orlicz_core::komlos::{
    komlos_extract, kp_split, non_delta2_counterexample, order_bounded_subsequence, ExtractMode,
    KomlosError, RvSequence,
};
use orlicz_core::space::{l0_metric, DyadicSpace, RandomVariable};
use orlicz_core::young::YoungFunction;

fn ramp(space: &std::sync::Arc<DyadicSpace>, scale: f64) -> RandomVariable {
    let values = (0..space.atoms())
        .map(|i| scale * (((i * 7 % 5) as f64 - 2.0) / 4.0))
        .collect();
    RandomVariable::new(space.clone(), values).unwrap()
}

fn spike(space: &std::sync::Arc<DyadicSpace>, k: usize) -> RandomVariable {
    let block = space.atoms_in(2f64.powi(-(k as i32)), 2f64.powi(-(k as i32) + 1));
    RandomVariable::indicator(space.clone(), &block, 2f64.powf(k as f64 / 2.0))
}

#[test]
fn split_recovers_a_constructed_mixture() {
    // ξ_n = small bounded part + tall disjoint spike: the split must
    // route each late spike's support into the disjoint sets
    let space = DyadicSpace::uniform(9);
    let phistar = YoungFunction::quadratic();
    let bounded: Vec<RandomVariable> = (0..6).map(|_| ramp(&space, 0.2)).collect();
    let terms: Vec<RandomVariable> = bounded
        .iter()
        .enumerate()
        .map(|(n, b)| b.add(&spike(&space, n + 2).scale(0.5)).unwrap())
        .collect();
    let seq = RvSequence::new(terms, 2.0).unwrap();
    let split = kp_split(&seq, &phistar).unwrap();
    for (n, sets) in split.disjoint_sets.iter().enumerate().skip(2) {
        let spike_support = spike(&space, n + 2).support();
        for atom in &spike_support {
            assert!(
                sets.contains(atom),
                "term {n}: spike atom {atom} not in the singular set"
            );
        }
    }
    // the regular parts stay uniformly small in modular
    let last = split.ui_profile.last().unwrap();
    let first = split.ui_profile.first().unwrap();
    assert!(last.1 <= first.1 + 1e-12, "UI profile must not grow");
}

#[test]
fn selection_index_growth_is_geometric() {
    // E[Φ*(ξ_n)] = 1/(n+1): the k-th pick needs 1/(n+1) ≤ 2^{-k}
    let space = DyadicSpace::uniform(2);
    let terms: Vec<RandomVariable> = (0..200)
        .map(|n| RandomVariable::constant(space.clone(), (1.0 / (n + 1) as f64).sqrt()))
        .collect();
    let seq = RvSequence::new(terms, 1.0).unwrap();
    let cert = order_bounded_subsequence(&seq, &YoungFunction::quadratic()).unwrap();
    for (k, &n) in cert.indices.iter().enumerate() {
        let budget = 2f64.powi(-(k as i32 + 1));
        assert!(1.0 / (n + 1) as f64 <= budget + 1e-12, "pick {k} at {n}");
        // minimality: the previous index would not have met the budget
        if n > 0 && (k == 0 || cert.indices[k - 1] < n - 1) {
            assert!(1.0 / n as f64 > budget);
        }
    }
    assert!(cert.modular_sum <= 1.0);
}

#[test]
fn selection_reports_progress_when_prefix_is_short() {
    let space = DyadicSpace::uniform(2);
    // modulars never fall below 2^-1: selection cannot even start twice
    let terms: Vec<RandomVariable> = (0..6)
        .map(|_| RandomVariable::constant(space.clone(), 0.9))
        .collect();
    let seq = RvSequence::new(terms, 1.0).unwrap();
    match order_bounded_subsequence(&seq, &YoungFunction::quadratic()) {
        Err(KomlosError::ExtractionIncomplete {
            stage, achieved, ..
        }) => {
            assert_eq!(stage, "subsequence selection");
            assert!(achieved < 2);
        }
        other => panic!("expected incomplete extraction, got {other:?}"),
    }
}

#[test]
fn normalization_precondition_is_enforced() {
    let space = DyadicSpace::uniform(2);
    let terms = vec![RandomVariable::constant(space, 5.0)];
    let seq = RvSequence::new(terms, 10.0).unwrap();
    assert!(matches!(
        kp_split(&seq, &YoungFunction::quadratic()),
        Err(KomlosError::PreconditionUnmet(_))
    ));
}

#[test]
fn mixture_extraction_recovers_the_bounded_limit() {
    // bounded part converging to ζ plus vanishing disjoint spikes: the
    // certificate limit is ζ and the order bound norm decomposes
    let space = DyadicSpace::uniform(8);
    let phistar = YoungFunction::quadratic();
    let zeta = ramp(&space, 1.0);
    let terms: Vec<RandomVariable> = (1..=48usize)
        .map(|n| {
            let mut t = zeta.scale(1.0 + 1.0 / (n + 1) as f64);
            if n.is_power_of_two() {
                let j = n.trailing_zeros() as usize + 1;
                if j <= 8 {
                    t = t.add(&spike(&space, j)).unwrap();
                }
            }
            t
        })
        .collect();
    let seq = RvSequence::new(terms, 4.0).unwrap().with_limit(zeta.clone());
    seq.verify_norm_bound(&phistar, 1e-9).unwrap();
    let cert = komlos_extract(&seq, &phistar, ExtractMode::Cesaro).unwrap();
    assert_eq!(cert.limit.values(), zeta.values());
    // Cesàro recombination converges like 1/N over the selected picks
    let trace = &cert.as_convergence;
    assert!(trace.last().unwrap() < &0.12, "trace {trace:?}");
    let tail = &trace[trace.len() / 2..];
    assert!(tail.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(cert.order_bound_norm.is_finite());
    // sound atomwise: the bound dominates the limit and every mean
    assert!(zeta.abs().le(&cert.order_bound, 1e-9).unwrap());
}

#[test]
fn forward_mode_composes_row_stochastic_tail_weights() {
    let space = DyadicSpace::uniform(4);
    let zeta = ramp(&space, 1.0);
    let terms: Vec<RandomVariable> = (0..64)
        .map(|n| zeta.scale(1.0 / (n + 1) as f64))
        .collect();
    let seq = RvSequence::new(terms.clone(), 1.0).unwrap();
    let cert = komlos_extract(&seq, &YoungFunction::quadratic(), ExtractMode::ForwardConvex)
        .unwrap();
    let rows = cert.weights.as_ref().unwrap();
    assert!(cert.weights_are_forward());
    // reconstruct each combination from its weights and check the
    // metric trace matches what the certificate reports
    for (n, row) in rows.iter().enumerate() {
        let mut combo = RandomVariable::zero(space.clone());
        for &(col, w) in row {
            combo = combo.add(&terms[col].scale(w)).unwrap();
        }
        let d = l0_metric(&combo, &cert.limit).unwrap();
        assert!((d - cert.as_convergence[n]).abs() < 1e-12);
        assert!(combo.abs().le(&cert.order_bound, 1e-9).unwrap());
    }
}

#[test]
fn obstruction_spikes_are_unit_ball_members() {
    // the builder's η_n must sit on the boundary of the Φ* modular
    // ball: E[Φ*(η_n)] = 1 by construction
    let phi = YoungFunction::exp_minus_one();
    let phistar = phi.conjugate();
    let space = DyadicSpace::uniform(8);
    for n in 1..=8usize {
        let block = space.atoms_in(2f64.powi(-(n as i32)), 2f64.powi(-(n as i32) + 1));
        let t_n = phistar.inverse(2f64.powi(n as i32));
        let eta = RandomVariable::indicator(space.clone(), &block, t_n);
        let modular = eta.expect(|v| phistar.eval(v));
        assert!((modular - 1.0).abs() < 1e-6, "n={n}: modular {modular}");
    }
}

#[test]
fn obstruction_ladder_direction_depends_on_delta2() {
    let exp = non_delta2_counterexample(&YoungFunction::exp_minus_one(), &[4, 6, 8]).unwrap();
    let quad = non_delta2_counterexample(&YoungFunction::quadratic(), &[4, 6, 8]).unwrap();
    assert!(exp.obstruction_found && !quad.obstruction_found);
    // the exp floor decays far slower than the quadratic one
    let exp_drop = exp.eps_last / exp.eps_first;
    let quad_drop = quad.eps_last / quad.eps_first;
    assert!(exp_drop > 0.7 && quad_drop < 0.6, "{exp_drop} vs {quad_drop}");
}
