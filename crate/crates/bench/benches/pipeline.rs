use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cvxlab::geometry::{john_ellipsoid, volume};
use cvxlab::measure::product_value;
use cvxlab::position::normalize_even;
use cvxlab::search::{run_search, Direction, FamilySpec, Objective, SearchConfig};
use cvxlab::Transform;
use cvxlab_bench::{polygon_gauge, quadratic, twisted_hull};
use std::hint::black_box;

fn transforms(c: &mut Criterion) {
    let mut g = c.benchmark_group("transform");
    for m in [9, 25, 81] {
        let f = quadratic(2, m);
        for t in [Transform::L, Transform::A] {
            g.bench_with_input(BenchmarkId::new(format!("{t:?}"), m), &f, |b, f| b.iter(|| t.apply(black_box(f)).unwrap()));
        }
    }
    g.finish();
}

fn products(c: &mut Criterion) {
    let mut g = c.benchmark_group("product");
    for (n, m) in [(1, 64), (2, 25), (3, 27)] {
        let f = quadratic(n, m);
        g.bench_with_input(BenchmarkId::new(format!("L/n{n}"), m), &f, |b, f| {
            b.iter(|| product_value(black_box(f), Transform::L).unwrap())
        });
    }
    g.finish();
}

fn geometry(c: &mut Criterion) {
    let k = twisted_hull(24);
    c.bench_function("volume/hull24", |b| b.iter(|| volume(black_box(&k))));
    c.bench_function("john/hull24", |b| b.iter(|| john_ellipsoid(black_box(&k)).unwrap()));
}

fn normalization(c: &mut Criterion) {
    let f = polygon_gauge(8).compose_linear(&[vec![2.0, 0.5], vec![0.0, 0.5]]).unwrap();
    c.bench_function("normalize_even/octagon", |b| b.iter(|| normalize_even(black_box(&f)).unwrap()));
}

fn search(c: &mut Criterion) {
    let family = FamilySpec::even_grid(3, 4.0, 4.0);
    let obj = Objective::new(Transform::L, Direction::Max);
    let cfg = SearchConfig {
        restarts: 1,
        max_iters: 100,
        rebuilds: 2,
        ..SearchConfig::default()
    };
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    g.bench_function("even_grid3/L", |b| b.iter(|| run_search(&family, obj, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, transforms, products, geometry, normalization, search);
criterion_main!(benches);
