//! Fixtures shared by the benchmarks in `benches/`.

use cvxlab::function::approximate;
use cvxlab::{Function, Polyhedron, Reference};

/// Tangent-plane approximant of `|x|^2 / 2` on `[-4, 4]^n` with `m` pieces.
pub fn quadratic(n: usize, m: usize) -> Function {
    approximate(n, &Reference::Quadratic { q: 1.0 }, m, 4.0).expect("valid approximant")
}

/// Gauge of the regular polygon with `k` sides and inradius 1.
pub fn polygon_gauge(k: usize) -> Function {
    let pieces = (0..k)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            cvxlab::AffinePiece::new(vec![t.cos(), t.sin()], 0.0)
        })
        .collect();
    Function::new(2, pieces, None).expect("valid gauge")
}

/// Convex hull of `k` points on a twisted curve, full-dimensional in 3D.
pub fn twisted_hull(k: usize) -> Polyhedron {
    let pts = (0..k)
        .map(|i| {
            let t = i as f64 / k as f64 * 2.0 * std::f64::consts::PI;
            vec![t.cos(), (2.0 * t).sin() * 0.7, (3.0 * t).cos() * 0.5 + 0.1 * t]
        })
        .collect();
    Polyhedron::from_vrep(3, pts, vec![]).expect("valid hull")
}
