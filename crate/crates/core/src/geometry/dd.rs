//! Double-description (Motzkin) enumeration of the extreme rays of a
//! polyhedral cone `{y : rows · y <= 0}` in dimension at most 6.
//!
//! The lineality space is factored out first so that the incremental step
//! works on a pointed cone. Adjacency of two rays is decided by the algebraic
//! rank test on their common tight rows.

use crate::linalg::{dot, norm, orthogonal_complement, orthonormal_basis};
use crate::tol::EPS_DD;
use nalgebra::DMatrix;

pub(crate) const MAX_CONE_DIM: usize = 6;

type Vz = [f64; MAX_CONE_DIM];

#[derive(Clone, Debug)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(bits: usize) -> Self {
        Self {
            words: vec![0; bits.div_ceil(64).max(1)],
        }
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    #[inline]
    pub fn and(&self, other: &Self) -> Self {
        Self {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

impl PartialEq for BitSet {
    fn eq(&self, other: &Self) -> bool {
        self.words == other.words
    }
}

/// Extreme rays and lineality of a cone.
#[derive(Clone, Debug)]
pub(crate) struct ConeRays {
    /// Unit extreme rays of the pointed part, orthogonal to `lines`.
    pub rays: Vec<Vec<f64>>,
    /// Orthonormal basis of the lineality space.
    pub lines: Vec<Vec<f64>>,
    /// For each ray, the input rows (by index) it is tight on.
    pub incidence: Vec<BitSet>,
}

struct Ray {
    z: Vz,
    tight: BitSet,
}

#[inline]
fn dotz(a: &Vz, b: &Vz, d: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..d {
        s += a[i] * b[i];
    }
    s
}

fn normalize_z(v: &mut Vz, d: usize) -> bool {
    let n = dotz(v, v, d).sqrt();
    if n <= 1e-300 {
        return false;
    }
    for x in v.iter_mut().take(d) {
        *x /= n;
    }
    true
}

/// Rank of the selected rows, stopping early once `target` is reached.
fn rank_reaches(rows: &[Vz], sel: &BitSet, d: usize, target: usize) -> bool {
    if target == 0 {
        return true;
    }
    let mut basis: Vec<Vz> = Vec::with_capacity(target);
    for i in sel.iter() {
        let mut v = rows[i];
        for q in &basis {
            let c = dotz(&v, q, d);
            for k in 0..d {
                v[k] -= c * q[k];
            }
        }
        let n = dotz(&v, &v, d).sqrt();
        if n > 1e-9 {
            for x in v.iter_mut().take(d) {
                *x /= n;
            }
            basis.push(v);
            if basis.len() >= target {
                return true;
            }
        }
    }
    false
}

/// Deterministic permutation of `0..n` (xorshift Fisher-Yates).
fn shuffled(n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut s: u64 = 0x9E37_79B9_7F4A_7C15 ^ (n as u64);
    for i in (1..n).rev() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        let j = (s % (i as u64 + 1)) as usize;
        idx.swap(i, j);
    }
    idx
}

/// Enumerates the cone `{y in R^dim : r · y <= 0 for r in rows}`.
pub(crate) fn enumerate(rows: &[Vec<f64>], dim: usize) -> ConeRays {
    assert!(dim <= MAX_CONE_DIM, "cone dimension {dim} too large");
    let m = rows.len();
    let unit_rows: Vec<Option<Vec<f64>>> = rows
        .iter()
        .map(|r| {
            let n = norm(r);
            (n > 1e-14).then(|| r.iter().map(|x| x / n).collect())
        })
        .collect();
    let live: Vec<Vec<f64>> = unit_rows.iter().flatten().cloned().collect();

    // rowspace = complement of the lineality space
    let rowspace = orthonormal_basis(&live, dim, 1e-10);
    let lines = orthogonal_complement(&rowspace, dim);
    let dp = rowspace.len();

    if dp == 0 {
        return ConeRays {
            rays: Vec::new(),
            lines,
            incidence: Vec::new(),
        };
    }

    // rows in z-coordinates (rowspace basis)
    let mut g: Vec<Vz> = vec![[0.0; MAX_CONE_DIM]; m];
    let mut alive = vec![false; m];
    for (i, r) in unit_rows.iter().enumerate() {
        if let Some(r) = r {
            let mut z = [0.0; MAX_CONE_DIM];
            for (k, q) in rowspace.iter().enumerate() {
                z[k] = dot(r, q);
            }
            if normalize_z(&mut z, dp) {
                g[i] = z;
                alive[i] = true;
            }
        }
    }

    // initial simplicial cone from dp well-conditioned rows
    let order = shuffled(m);
    let mut init: Vec<usize> = Vec::with_capacity(dp);
    {
        let mut residual: Vec<(usize, Vz)> = order
            .iter()
            .copied()
            .filter(|&i| alive[i])
            .map(|i| (i, g[i]))
            .collect();
        while init.len() < dp {
            let mut best = None;
            let mut best_n = 0.0;
            for (pos, (_, v)) in residual.iter().enumerate() {
                let n = dotz(v, v, dp);
                if n > 1e-20 && n > best_n * (1.0 + 1e-12) {
                    best_n = n;
                    best = Some(pos);
                }
            }
            let Some(pos) = best else { break };
            let (idx, v) = residual.swap_remove(pos);
            let n = best_n.sqrt();
            let q: Vz = {
                let mut q = v;
                for x in q.iter_mut().take(dp) {
                    *x /= n;
                }
                q
            };
            for (_, w) in residual.iter_mut() {
                let c = dotz(w, &q, dp);
                for k in 0..dp {
                    w[k] -= c * q[k];
                }
            }
            init.push(idx);
        }
    }
    debug_assert_eq!(init.len(), dp);

    let gs = DMatrix::from_fn(dp, dp, |i, j| g[init[i]][j]);
    let inv = gs
        .clone()
        .try_inverse()
        .expect("initial rows are independent by construction");
    let mut rays: Vec<Ray> = Vec::with_capacity(dp);
    for j in 0..dp {
        let mut z = [0.0; MAX_CONE_DIM];
        for k in 0..dp {
            z[k] = -inv[(k, j)];
        }
        normalize_z(&mut z, dp);
        let mut tight = BitSet::new(m);
        for (i, &row) in init.iter().enumerate() {
            if i != j {
                tight.insert(row);
            }
        }
        rays.push(Ray { z, tight });
    }

    let mut in_init = vec![false; m];
    for &i in &init {
        in_init[i] = true;
    }

    for &row in &order {
        if !alive[row] || in_init[row] {
            continue;
        }
        let gr = g[row];
        let vals: Vec<f64> = rays.iter().map(|r| dotz(&gr, &r.z, dp)).collect();
        let any_bad = vals.iter().any(|&v| v > EPS_DD);
        if !any_bad {
            for (r, &v) in rays.iter_mut().zip(&vals) {
                if v >= -EPS_DD {
                    r.tight.insert(row);
                }
            }
            continue;
        }
        let mut feasible = Vec::new();
        let mut infeasible = Vec::new();
        for (k, &v) in vals.iter().enumerate() {
            if v > EPS_DD {
                infeasible.push(k);
            } else if v < -EPS_DD {
                feasible.push(k);
            }
        }
        let mut created: Vec<Ray> = Vec::new();
        let need = dp.saturating_sub(2);
        for &fi in &feasible {
            for &ii in &infeasible {
                let common = rays[fi].tight.and(&rays[ii].tight);
                if common.count() < need {
                    continue;
                }
                if !rank_reaches(&g, &common, dp, need) {
                    continue;
                }
                let vf = vals[fi];
                let vi = vals[ii];
                let mut z = [0.0; MAX_CONE_DIM];
                for k in 0..dp {
                    z[k] = vi * rays[fi].z[k] - vf * rays[ii].z[k];
                }
                if !normalize_z(&mut z, dp) {
                    continue;
                }
                let mut tight = common;
                tight.insert(row);
                created.push(Ray { z, tight });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + created.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            let v = vals[k];
            if v > EPS_DD {
                continue;
            }
            if v >= -EPS_DD {
                r.tight.insert(row);
            }
            next.push(r);
        }
        next.extend(created);
        rays = next;
    }

    // polish each ray against its tight rows
    let out_rays: Vec<Vec<f64>> = rays
        .iter()
        .map(|r| {
            let z = refine(&g, r, dp);
            let mut y = vec![0.0; dim];
            for (k, q) in rowspace.iter().enumerate() {
                for (yi, qi) in y.iter_mut().zip(q) {
                    *yi += z[k] * qi;
                }
            }
            let n = norm(&y);
            y.iter_mut().for_each(|x| *x /= n);
            y
        })
        .collect();
    let incidence = rays.into_iter().map(|r| r.tight).collect();
    ConeRays {
        rays: out_rays,
        lines,
        incidence,
    }
}

/// Recomputes a ray as the null vector of its tight rows; keeps the original
/// when the tight rows do not pin it down.
fn refine(g: &[Vz], ray: &Ray, dp: usize) -> Vz {
    let idx: Vec<usize> = ray.tight.iter().collect();
    if dp < 2 || idx.len() + 1 < dp {
        return ray.z;
    }
    let a = DMatrix::from_fn(idx.len().max(dp), dp, |i, j| if i < idx.len() { g[idx[i]][j] } else { 0.0 });
    let svd = a.svd(false, true);
    let Some(vt) = svd.v_t else { return ray.z };
    let sv = &svd.singular_values;
    // smallest singular value and the next one
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[i].partial_cmp(&sv[j]).unwrap());
    if sv.len() >= 2 && sv[order[1]] < 1e-7 {
        return ray.z;
    }
    let k = order[0];
    let mut z = [0.0; MAX_CONE_DIM];
    for j in 0..dp {
        z[j] = vt[(k, j)];
    }
    let c = dotz(&z, &ray.z, dp);
    if c.abs() < 1.0 - 1e-6 {
        return ray.z;
    }
    if c < 0.0 {
        for x in z.iter_mut().take(dp) {
            *x = -*x;
        }
    }
    normalize_z(&mut z, dp);
    z
}
