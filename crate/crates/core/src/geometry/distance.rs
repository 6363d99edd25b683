use super::polyhedron::{Halfspace, Polyhedron};
use crate::error::{Error, Result};
use crate::linalg::{dist, dot, norm, sub};
use nalgebra::{DMatrix, DVector};

/// Euclidean projection of `x` onto `p` by a primal active-set method on the
/// H-representation, started from the nearest vertex.
pub fn project_point(p: &Polyhedron, x: &[f64]) -> Vec<f64> {
    let hs = p.halfspaces();
    if hs.is_empty() {
        return x.to_vec();
    }
    if p.contains(x, 0.0) {
        return x.to_vec();
    }
    // equalities appear as opposite pairs; keep one of each permanently
    let mut is_eq_partner = vec![false; hs.len()];
    let mut equalities: Vec<usize> = Vec::new();
    for i in 0..hs.len() {
        if p.is_full_dim() {
            break;
        }
        if is_eq_partner[i] {
            continue;
        }
        for j in i + 1..hs.len() {
            if !is_eq_partner[j] && opposite(&hs[i], &hs[j]) {
                is_eq_partner[i] = true;
                is_eq_partner[j] = true;
                equalities.push(i);
                break;
            }
        }
    }
    let ineq: Vec<usize> = (0..hs.len()).filter(|&i| !is_eq_partner[i]).collect();

    let mut y = p
        .vertices()
        .iter()
        .min_by(|a, b| dist(a, x).partial_cmp(&dist(b, x)).unwrap())
        .cloned()
        .unwrap_or_else(|| x.to_vec());
    let mut work: Vec<usize> = Vec::new();
    let d = x.len();
    for _ in 0..50 * (hs.len() + d + 1) {
        let rows: Vec<usize> = equalities.iter().chain(work.iter()).copied().collect();
        let (target, lambda) = project_affine(hs, &rows, x);
        let step = sub(&target, &y);
        if norm(&step) <= 1e-14 * (1.0 + norm(&y)) {
            // multipliers of the working inequalities must be nonnegative
            let mut worst = None;
            let mut worst_val = -1e-13;
            for (k, &i) in work.iter().enumerate() {
                let l = lambda[equalities.len() + k];
                if l < worst_val {
                    worst_val = l;
                    worst = Some(i);
                }
            }
            match worst {
                None => return target,
                Some(i) => {
                    work.retain(|&j| j != i);
                    continue;
                }
            }
        }
        let mut alpha = 1.0;
        let mut block = None;
        for &i in &ineq {
            if work.contains(&i) {
                continue;
            }
            let ap = dot(&hs[i].normal, &step);
            if ap > 1e-15 {
                let a = hs[i].slack(&y).max(0.0) / ap;
                if a < alpha {
                    alpha = a;
                    block = Some(i);
                }
            }
        }
        for (yi, si) in y.iter_mut().zip(&step) {
            *yi += alpha * si;
        }
        if let Some(i) = block {
            work.push(i);
        }
    }
    y
}

fn opposite(a: &Halfspace, b: &Halfspace) -> bool {
    let s: f64 = a.normal.iter().zip(&b.normal).map(|(u, v)| (u + v).abs()).sum();
    s < 1e-12 && (a.offset + b.offset).abs() < 1e-12 * (1.0 + a.offset.abs())
}

/// Projection of `x` onto `{y : a_i · y = b_i, i in rows}` with multipliers.
fn project_affine(hs: &[Halfspace], rows: &[usize], x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    if rows.is_empty() {
        return (x.to_vec(), Vec::new());
    }
    let d = x.len();
    let a = DMatrix::from_fn(rows.len(), d, |i, j| hs[rows[i]].normal[j]);
    let r = DVector::from_fn(rows.len(), |i, _| dot(&hs[rows[i]].normal, x) - hs[rows[i]].offset);
    let g = &a * a.transpose();
    let lambda = g
        .clone()
        .cholesky()
        .map(|c| c.solve(&r))
        .unwrap_or_else(|| g.pseudo_inverse(1e-12).map(|pi| pi * &r).unwrap_or_else(|_| DVector::zeros(rows.len())));
    let y = DVector::from_column_slice(x) - a.transpose() * &lambda;
    (y.iter().copied().collect(), lambda.iter().copied().collect())
}

/// Distance from a point to a polyhedron.
pub fn point_distance(p: &Polyhedron, x: &[f64]) -> f64 {
    dist(&project_point(p, x), x)
}

/// `max_{x in k} d(x, f)` for bounded `k`.
pub fn directed_distance(k: &Polyhedron, f: &Polyhedron) -> Result<f64> {
    if !k.is_bounded() {
        return Err(Error::UnboundedInput);
    }
    Ok(directed_unchecked(k, f))
}

fn directed_unchecked(k: &Polyhedron, f: &Polyhedron) -> f64 {
    // vertices already in f count as 0, not as a projection round-off residue
    k.vertices()
        .iter()
        .map(|v| if f.contains(v, 1e-12) { 0.0 } else { point_distance(f, v) })
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance. Unbounded arguments are allowed: the
/// distance is finite exactly when both recession cones coincide, and then
/// the supremum is attained at vertices.
pub fn hausdorff(a: &Polyhedron, b: &Polyhedron) -> f64 {
    let recedes_all = |p: &Polyhedron, q: &Polyhedron| p.rays_with_lines().iter().all(|r| q.recedes(r, 1e-9));
    if !recedes_all(a, b) || !recedes_all(b, a) {
        return f64::INFINITY;
    }
    directed_unchecked(a, b).max(directed_unchecked(b, a))
}
