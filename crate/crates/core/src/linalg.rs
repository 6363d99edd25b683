//! Small dense helpers on `&[f64]` vectors. Dimensions here never exceed 5.

use nalgebra::DMatrix;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[inline]
pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Returns `a / |a|`, or `None` for a (numerically) zero vector.
pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n <= 1e-300 || !n.is_finite() {
        None
    } else {
        Some(scale(a, 1.0 / n))
    }
}

pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// `mᵀ v`
pub fn mat_t_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![0.0; cols];
    for (row, vi) in m.iter().zip(v) {
        for (o, r) in out.iter_mut().zip(row) {
            *o += r * vi;
        }
    }
    out
}

pub fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j]).collect())
        .collect()
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let bt = transpose(b);
    a.iter()
        .map(|row| bt.iter().map(|col| dot(row, col)).collect())
        .collect()
}

pub fn to_dmatrix(m: &[Vec<f64>]) -> DMatrix<f64> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    DMatrix::from_fn(rows, cols, |i, j| m[i][j])
}

pub fn from_dmatrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn determinant(m: &[Vec<f64>]) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    to_dmatrix(m).determinant()
}

pub fn inverse(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    to_dmatrix(m).try_inverse().map(|inv| from_dmatrix(&inv))
}

/// Greedy Gram-Schmidt with pivoting. Returns an orthonormal basis of the span
/// of `vectors`, discarding directions with residual norm below `tol` (relative
/// to the largest input norm).
pub fn orthonormal_basis(vectors: &[Vec<f64>], dim: usize, tol: f64) -> Vec<Vec<f64>> {
    let mut residual: Vec<Vec<f64>> = vectors.iter().filter(|v| v.len() == dim).cloned().collect();
    let scale_ref = residual.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    if scale_ref == 0.0 {
        return basis;
    }
    while basis.len() < dim {
        let (best, best_norm) = residual
            .iter()
            .enumerate()
            .map(|(i, v)| (i, norm(v)))
            .fold((usize::MAX, 0.0), |acc, (i, n)| if n > acc.1 { (i, n) } else { acc });
        if best == usize::MAX || best_norm <= tol * scale_ref {
            break;
        }
        let q = scale(&residual[best], 1.0 / best_norm);
        for v in residual.iter_mut() {
            let c = dot(v, &q);
            for (x, qi) in v.iter_mut().zip(&q) {
                *x -= c * qi;
            }
        }
        basis.push(q);
    }
    basis
}

/// Rank of a set of vectors with relative tolerance `tol`.
pub fn rank(vectors: &[Vec<f64>], dim: usize, tol: f64) -> usize {
    orthonormal_basis(vectors, dim, tol).len()
}

/// Completes an orthonormal family to an orthonormal basis of `R^dim`; returns
/// only the added vectors (the orthogonal complement).
pub fn orthogonal_complement(basis: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut all: Vec<Vec<f64>> = basis.to_vec();
    let mut extra = Vec::new();
    for i in 0..dim {
        if all.len() == dim {
            break;
        }
        let mut v: Vec<f64> = (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect();
        for _ in 0..2 {
            for q in &all {
                let c = dot(&v, q);
                for (x, qi) in v.iter_mut().zip(q) {
                    *x -= c * qi;
                }
            }
        }
        let n = norm(&v);
        if n > 1e-6 {
            let q = scale(&v, 1.0 / n);
            all.push(q.clone());
            extra.push(q);
        }
    }
    extra
}

/// Affine dimension of a point set together with extra directions.
pub fn affine_rank(points: &[Vec<f64>], directions: &[Vec<f64>], dim: usize, tol: f64) -> usize {
    let mut vecs: Vec<Vec<f64>> = directions.to_vec();
    if let Some(p0) = points.first() {
        for p in &points[1..] {
            vecs.push(sub(p, p0));
        }
    }
    if vecs.is_empty() {
        return 0;
    }
    // absolute tolerance: directions are unit, point differences are in length units
    let basis = orthonormal_basis_abs(&vecs, dim, tol);
    basis.len()
}

/// Like [`orthonormal_basis`] but with an absolute residual threshold.
pub fn orthonormal_basis_abs(vectors: &[Vec<f64>], dim: usize, tol: f64) -> Vec<Vec<f64>> {
    let mut residual: Vec<Vec<f64>> = vectors.to_vec();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while basis.len() < dim {
        let (best, best_norm) = residual
            .iter()
            .enumerate()
            .map(|(i, v)| (i, norm(v)))
            .fold((usize::MAX, 0.0), |acc, (i, n)| if n > acc.1 { (i, n) } else { acc });
        if best == usize::MAX || best_norm <= tol {
            break;
        }
        let q = scale(&residual[best], 1.0 / best_norm);
        for v in residual.iter_mut() {
            let c = dot(v, &q);
            for (x, qi) in v.iter_mut().zip(&q) {
                *x -= c * qi;
            }
        }
        basis.push(q);
    }
    basis
}

/// Householder reflection sending unit vector `u` to `e1`. Returns the identity
/// when `u` is already `e1`.
pub fn householder_to_e1(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    let mut w = u.to_vec();
    w[0] -= 1.0;
    let wn2 = dot(&w, &w);
    let mut h = identity(n);
    if wn2 < 1e-30 {
        return h;
    }
    for i in 0..n {
        for j in 0..n {
            h[i][j] -= 2.0 * w[i] * w[j] / wn2;
        }
    }
    h
}

/// Lexicographic comparison on float slices (NaN-free inputs).
pub fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.len().cmp(&b.len())
}
