#![allow(dead_code)]

use cvxlab::geometry::{Halfspace, Polyhedron};
use cvxlab::{AffinePiece, Function};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the grid `{k/den : |k| <= max}`.
pub fn rat(r: &mut Rng8, max: i32, den: i32) -> f64 {
    r.gen_range(-max..=max) as f64 / den as f64
}

pub fn abs1() -> Function {
    Function::new(1, vec![AffinePiece::new(vec![1.0], 0.0), AffinePiece::new(vec![-1.0], 0.0)], None).unwrap()
}

pub fn interval(a: f64, b: f64) -> Polyhedron {
    Polyhedron::cuboid(&[a], &[b]).unwrap()
}

/// Random polytope containing `ρB` for some `ρ > 0`: halfspaces with offsets in
/// `[1/2, 2]` around random directions, plus a bounding box so it is bounded.
pub fn random_body(r: &mut Rng8, n: usize, k: usize) -> Polyhedron {
    let mut hs = Vec::new();
    for _ in 0..k {
        let a: Vec<f64> = (0..n).map(|_| rat(r, 8, 4)).collect();
        if a.iter().all(|v| *v == 0.0) {
            continue;
        }
        let b = r.gen_range(2..=8) as f64 / 4.0;
        hs.push(Halfspace::new(a, b).unwrap());
    }
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            hs.push(Halfspace::new(e, r.gen_range(4..=12) as f64 / 4.0).unwrap());
        }
    }
    Polyhedron::from_hrep(n, hs).unwrap()
}

/// Random centrally symmetric body: symmetric pairs of halfspaces.
pub fn random_symmetric_body(r: &mut Rng8, n: usize, k: usize) -> Polyhedron {
    loop {
        let mut hs = Vec::new();
        for _ in 0..k {
            let a: Vec<f64> = (0..n).map(|_| rat(r, 8, 4)).collect();
            if a.iter().all(|v| *v == 0.0) {
                continue;
            }
            let b = r.gen_range(2..=8) as f64 / 4.0;
            hs.push(Halfspace::new(a.clone(), b).unwrap());
            hs.push(Halfspace::new(a.iter().map(|v| -v).collect(), b).unwrap());
        }
        if let Ok(p) = Polyhedron::from_hrep(n, hs) {
            if p.is_bounded() {
                return p;
            }
        }
    }
}

/// Random closed proper polyhedral function: a few pieces, sometimes a domain.
pub fn random_function(r: &mut Rng8, n: usize) -> Function {
    loop {
        let k = r.gen_range(1..=4);
        let pieces: Vec<AffinePiece> = (0..k)
            .map(|_| AffinePiece::new((0..n).map(|_| rat(r, 8, 4)).collect(), rat(r, 8, 4)))
            .collect();
        let domain = match r.gen_range(0..3) {
            0 => None,
            1 => Some(random_body(r, n, 2)),
            _ => {
                // a half-space or slab style unbounded domain
                let a: Vec<f64> = (0..n).map(|_| rat(r, 4, 2)).collect();
                if a.iter().all(|v| *v == 0.0) {
                    None
                } else {
                    Some(Polyhedron::from_hrep(n, vec![Halfspace::new(a, rat(r, 4, 2)).unwrap()]).unwrap())
                }
            }
        };
        if let Ok(f) = Function::new(n, pieces, domain) {
            return f;
        }
    }
}

/// Random geometric function `max(0, pieces with nonpositive intercepts)` on a
/// domain that contains 0.
pub fn random_cvx0(r: &mut Rng8, n: usize) -> Function {
    loop {
        let k = r.gen_range(1..=4);
        let mut pieces = vec![AffinePiece::new(vec![0.0; n], 0.0)];
        for _ in 0..k {
            let s: Vec<f64> = (0..n).map(|_| rat(r, 8, 4)).collect();
            let c = -(r.gen_range(0..=4) as f64) / 4.0;
            pieces.push(AffinePiece::new(s, c));
        }
        let domain = match r.gen_range(0..3) {
            0 => None,
            _ => Some(random_body(r, n, 2)),
        };
        if let Ok(f) = Function::new(n, pieces, domain) {
            if f.is_geometric() {
                return f;
            }
        }
    }
}

/// Random geometric function with 0 in the interior of the domain and finite
/// positive mass: the gauge of a random body plus a few extra pieces, possibly
/// truncated to another body.
pub fn random_cvx0_integrable(r: &mut Rng8, n: usize) -> Function {
    loop {
        let k = random_body(r, n, 3);
        let mut pieces: Vec<AffinePiece> = k
            .halfspaces()
            .iter()
            .map(|h| AffinePiece::new(h.normal.iter().map(|v| v / h.offset).collect(), 0.0))
            .collect();
        for _ in 0..r.gen_range(0..=2) {
            let s: Vec<f64> = (0..n).map(|_| rat(r, 8, 4)).collect();
            pieces.push(AffinePiece::new(s, -(r.gen_range(0..=4) as f64) / 4.0));
        }
        let domain = if r.gen_bool(0.3) { Some(random_body(r, n, 2)) } else { None };
        if let Ok(f) = Function::new(n, pieces, domain) {
            if f.is_geometric() && f.zero_in_int_dom() {
                return f;
            }
        }
    }
}

/// Even variant of [`random_cvx0_integrable`].
pub fn random_even_integrable(r: &mut Rng8, n: usize) -> Function {
    loop {
        let k = random_symmetric_body(r, n, n + 1);
        let mut pieces: Vec<AffinePiece> = k
            .halfspaces()
            .iter()
            .map(|h| AffinePiece::new(h.normal.iter().map(|v| v / h.offset).collect(), 0.0))
            .collect();
        for _ in 0..r.gen_range(0..=1) {
            let s: Vec<f64> = (0..n).map(|_| rat(r, 8, 4)).collect();
            let c = -(r.gen_range(0..=4) as f64) / 4.0;
            pieces.push(AffinePiece::new(s.iter().map(|v| -v).collect(), c));
            pieces.push(AffinePiece::new(s, c));
        }
        let domain = if r.gen_bool(0.3) { Some(random_symmetric_body(r, n, n)) } else { None };
        if let Ok(f) = Function::new(n, pieces, domain) {
            if f.is_geometric() && f.is_even() {
                return f;
            }
        }
    }
}

/// Random invertible matrix with `|det|` in `[lo, hi]`, entries on a coarse grid.
pub fn random_matrix(r: &mut Rng8, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    loop {
        let m: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rat(r, 12, 4)).collect()).collect();
        let d = cvxlab::linalg::determinant(&m).abs();
        if d >= lo && d <= hi {
            return m;
        }
    }
}

/// Rectangular lattice of `k^n` points in `[-r, r]^n`.
pub fn lattice(n: usize, k: usize, r: f64) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..k).map(|i| -r + 2.0 * r * i as f64 / (k - 1) as f64).collect();
    let mut pts = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &pts {
            for &a in &axis {
                let mut q: Vec<f64> = p.clone();
                q.push(a);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

/// Geometric function invariant under rotation by 120 degrees, hence centered.
pub fn rotation_symmetric(r: &mut Rng8) -> Function {
    let rot = |v: &[f64], k: usize| {
        let a = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
        vec![a.cos() * v[0] - a.sin() * v[1], a.sin() * v[0] + a.cos() * v[1]]
    };
    loop {
        let mut pieces = vec![AffinePiece::new(vec![0.0, 0.0], 0.0)];
        let mut hs = Vec::new();
        for _ in 0..r.gen_range(1..=2) {
            let s = vec![rat(r, 8, 4), rat(r, 8, 4)];
            let c = -(r.gen_range(0..=4) as f64) / 4.0;
            for k in 0..3 {
                pieces.push(AffinePiece::new(rot(&s, k), c));
            }
        }
        if r.gen_bool(0.5) {
            let a = vec![rat(r, 8, 4), rat(r, 8, 4)];
            let b = r.gen_range(4..=12) as f64 / 4.0;
            if a.iter().any(|v| *v != 0.0) {
                for k in 0..3 {
                    hs.push(Halfspace::new(rot(&a, k), b).unwrap());
                }
            }
        }
        let domain = if hs.is_empty() { None } else { Polyhedron::from_hrep(2, hs).ok() };
        if let Ok(f) = Function::new(2, pieces, domain) {
            if f.is_geometric() && cvxlab::measure::exp_integral(&f).finite_value().is_some() {
                return f;
            }
        }
    }
}

/// Centered geometric 1D function from the centered grid family.
pub fn centered_1d(r: &mut Rng8) -> Function {
    let spec = cvxlab::search::FamilySpec::centered_grid(3, 2.0, 8.0);
    loop {
        let p: Vec<f64> = (0..5).map(|_| r.gen_range(0.0..8.0)).collect();
        let p = cvxlab::search::Family::project(&spec, &p);
        if let Ok(f) = cvxlab::search::Family::build(&spec, &p) {
            return f;
        }
    }
}

/// 2D or 3D even fixture whose unit level set is not a parallelogram or
/// parallelepiped (where the even class sandwich is tight).
pub fn even_not_tight(r: &mut Rng8, n: usize) -> Function {
    loop {
        let f = random_even_integrable(r, n);
        let g = f.level_set(1.0).unwrap();
        if g.halfspaces().len() > 2 * n {
            return f;
        }
    }
}
