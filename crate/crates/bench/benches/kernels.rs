use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use tvlab_bench::{fibonacci_core_input, unit_line_scan};
use tvlab_core::coset_lattice::torsion_core;
use tvlab_core::cyclo_exact::TorusPoint;
use tvlab_core::galois_poly::{minimal_multiplier, IntPolynomial};
use tvlab_core::local_field::tower;
use tvlab_core::scan::scan_gap;
use tvlab_core::special_fibre::gm_frobenius_identity;
use tvlab_core::torus_geom::{distance_auto, mattuck_gap, Subvariety};

fn towers(c: &mut Criterion) {
    c.bench_function("tower p=7 m'=19 k=1 N=20", |b| {
        b.iter(|| tower(black_box(7), 19, 1, 20).unwrap())
    });
    let x = Subvariety::unit_line();
    let pt = TorusPoint::parse("2/21,5/21").unwrap();
    c.bench_function("distance x+y=1 at order 21", |b| {
        b.iter(|| distance_auto(black_box(&pt), &x, 7, 20).unwrap())
    });
}

fn scans(c: &mut Criterion) {
    let mut g = c.benchmark_group("scan");
    g.sample_size(10);
    let (x, opts) = unit_line_scan(30);
    g.bench_function("x+y=1 p=7 B=30", |b| b.iter(|| scan_gap(&x, black_box(&opts)).unwrap()));
    g.bench_function("mattuck p=5 B=100", |b| b.iter(|| mattuck_gap(black_box(5), 1, 100, 8).unwrap()));
    g.finish();
}

fn algebra(c: &mut Criterion) {
    c.bench_function("torsion core fibonacci", |b| {
        b.iter_batched(fibonacci_core_input, |(x, f)| torsion_core(&x, &f).unwrap(), BatchSize::SmallInput)
    });
    let gens = [IntPolynomial::t_minus_one_pow(3), IntPolynomial::t_pow_minus_one(27)];
    let target = IntPolynomial::t_minus_one_pow(1);
    c.bench_function("minimal multiplier q=27", |b| {
        b.iter(|| minimal_multiplier(black_box(&target), &gens).unwrap())
    });
    c.bench_function("gm frobenius 3^8", |b| b.iter(|| gm_frobenius_identity(black_box(3), 8).unwrap()));
}

criterion_group!(benches, towers, scans, algebra);
criterion_main!(benches);
