use criterion::{criterion_group, criterion_main, Criterion};

use orlicz_core::norms::{dual_orlicz_norm, luxemburg_norm};
use orlicz_core::space::{DyadicSpace, RandomVariable};
use orlicz_core::young::{Grid, YoungFunction};

fn bench_conjugate(c: &mut Criterion) {
    let phi = YoungFunction::entropic().with_cutoff(25.0);
    let numeric = phi.conjugate_numeric(&Grid::new(0.0, 25.0, 257));
    c.bench_function("numeric_conjugate_eval", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for i in 0..50 {
                acc += numeric.eval(0.4 * i as f64);
            }
            acc
        })
    });
}

fn bench_norms(c: &mut Criterion) {
    let space = DyadicSpace::uniform(10);
    let values: Vec<f64> = (0..space.atoms())
        .map(|i| ((i * 2654435761usize) % 1000) as f64 / 500.0 - 1.0)
        .collect();
    let xi = RandomVariable::new(space, values).unwrap();
    let phi = YoungFunction::power(3.0);
    c.bench_function("luxemburg_norm_1024_atoms", |b| {
        b.iter(|| luxemburg_norm(&xi, &phi).value)
    });
    c.bench_function("dual_orlicz_norm_1024_atoms", |b| {
        b.iter(|| dual_orlicz_norm(&xi, &phi, 1e-6).unwrap().value)
    });
}

fn bench_extraction(c: &mut Criterion) {
    use orlicz_core::komlos::{komlos_extract, ExtractMode, RvSequence};
    let space = DyadicSpace::uniform(8);
    let zeta = {
        let values = (0..space.atoms())
            .map(|i| (((i * 7 % 5) as f64) - 2.0) / 4.0)
            .collect();
        RandomVariable::new(space.clone(), values).unwrap()
    };
    let terms: Vec<RandomVariable> = (1..=64usize)
        .map(|n| zeta.scale(1.0 + 1.0 / (n + 1) as f64))
        .collect();
    let phistar = YoungFunction::quadratic();
    c.bench_function("komlos_extract_64_terms_256_atoms", |b| {
        b.iter(|| {
            let seq = RvSequence::new(terms.clone(), 2.0)
                .unwrap()
                .with_limit(zeta.clone());
            komlos_extract(&seq, &phistar, ExtractMode::Cesaro)
                .unwrap()
                .order_bound_norm
        })
    });
}

criterion_group!(benches, bench_conjugate, bench_norms, bench_extraction);
criterion_main!(benches);
