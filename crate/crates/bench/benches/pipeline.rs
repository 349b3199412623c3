use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use k3cox_bench::{gen_options, record, surface};
use k3cox_core::{cones, coxgen, minimal, negcurves, IntVector};

fn curves(c: &mut Criterion) {
    let mut g = c.benchmark_group("curves");
    for name in ["S_1", "S_6", "S_{1,9,1}"] {
        let l = record(name).lattice().unwrap();
        g.bench_function(name, |b| b.iter(|| negcurves::find_neg_curves(black_box(&l)).unwrap()));
    }
    g.finish();
}

fn cone_data(c: &mut Criterion) {
    let mut g = c.benchmark_group("cones");
    for name in ["S_2", "S_{1,9,1}"] {
        g.bench_function(name, |b| {
            b.iter_batched(
                || surface(name),
                |s| (s.beff().len(), s.bnef().len()),
                BatchSize::SmallInput,
            )
        });
    }
    let gens: Vec<IntVector> = [[1, 0, 0], [0, 1, 0], [1, 1, 7], [3, 5, 11]].into_iter().map(IntVector::from).collect();
    let cone = cones::cone_from_generators(3, &gens).unwrap();
    g.bench_function("hilbert_basis", |b| b.iter(|| cones::hilbert_basis(black_box(&cone)).unwrap()));
    g.finish();
}

fn generators(c: &mut Criterion) {
    let mut g = c.benchmark_group("generators");
    g.sample_size(10);
    for name in ["S_1", "S_{4,1,1}", "S_6"] {
        let opts = gen_options(name);
        g.bench_function(name, |b| {
            b.iter_batched(|| surface(name), |s| coxgen::generators(&s, &opts).unwrap(), BatchSize::SmallInput)
        });
    }
    g.finish();
}

fn minimality(c: &mut Criterion) {
    let mut g = c.benchmark_group("minimality");
    g.sample_size(10);
    let name = "S_{10,1,1}";
    let degrees = coxgen::generators(&surface(name), &gen_options(name)).unwrap().degrees;
    g.bench_function(name, |b| {
        b.iter_batched(
            || surface(name),
            |s| {
                for d in degrees.iter().filter(|d| !s.neg().contains(d)) {
                    minimal::is_minimal_degree(&s, d, &degrees).unwrap();
                }
            },
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

criterion_group!(benches, curves, cone_data, generators, minimality);
criterion_main!(benches);
