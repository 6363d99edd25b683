use super::polyhedron::Polyhedron;
use crate::error::{Error, Result};
use crate::linalg::{dot, mat_mul, mat_vec};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

/// The ellipsoid `{x : (x - center)^T shape^{-1} (x - center) <= 1}`, equivalently
/// `center + B(unit ball)` with `B = shape^{1/2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ellipsoid {
    pub center: Vec<f64>,
    pub shape: Vec<Vec<f64>>,
}

impl Ellipsoid {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Symmetric square root `B` of the shape matrix.
    pub fn sqrt_shape(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let m = DMatrix::from_fn(n, n, |i, j| self.shape[i][j]);
        let e = SymmetricEigen::new(m);
        let d = DMatrix::from_diagonal(&e.eigenvalues.map(|l| l.max(0.0).sqrt()));
        let b = &e.eigenvectors * d * e.eigenvectors.transpose();
        (0..n).map(|i| (0..n).map(|j| b[(i, j)]).collect()).collect()
    }

    pub fn volume(&self) -> f64 {
        let n = self.dim();
        unit_ball_volume(n) * crate::linalg::determinant(&self.shape).max(0.0).sqrt()
    }

    /// Support function `h(a) = <a, c> + ||B a||`.
    pub fn support(&self, a: &[f64]) -> f64 {
        dot(a, &self.center) + dot(a, &mat_vec(&self.shape, a)).max(0.0).sqrt()
    }

    /// Smallest halfspace slack of the ellipsoid scaled by `s` about its center
    /// inside `p`; nonnegative iff `center + s E ⊂ p`.
    pub fn inner_margin(&self, p: &Polyhedron, s: f64) -> f64 {
        p.halfspaces()
            .iter()
            .map(|h| {
                let r = dot(&h.normal, &mat_vec(&self.shape, &h.normal)).max(0.0).sqrt();
                h.offset - dot(&h.normal, &self.center) - s * r
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `1 - max_v ||B^{-1}(v - c)|| / s` over the vertices of `p`; nonnegative
    /// iff `p ⊂ center + s E`.
    pub fn outer_margin(&self, p: &Polyhedron, s: f64) -> f64 {
        let inv = crate::linalg::inverse(&self.shape).expect("shape is positive definite");
        let worst = p
            .vertices()
            .iter()
            .map(|v| {
                let w: Vec<f64> = v.iter().zip(&self.center).map(|(a, b)| a - b).collect();
                dot(&w, &mat_vec(&inv, &w)).max(0.0).sqrt()
            })
            .fold(0.0, f64::max);
        1.0 - worst / s
    }
}

/// Volume of the Euclidean unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

/// Maximum-volume ellipsoid inscribed in a bounded full-dimensional polyhedron,
/// by a log-barrier Newton method on `(B, c)` with `B` symmetric.
pub fn john_ellipsoid(p: &Polyhedron) -> Result<Ellipsoid> {
    let d = p.dim();
    if !p.is_full_dim() {
        return Err(Error::DegenerateBody {
            dim: d,
            affine_dim: p.affine_dim(),
        });
    }
    if !p.is_bounded() {
        return Err(Error::UnboundedInput);
    }
    if d == 1 {
        let lo = p.vertices().iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        let hi = p.vertices().iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
        let r = 0.5 * (hi - lo);
        return Ok(Ellipsoid {
            center: vec![0.5 * (lo + hi)],
            shape: vec![vec![r * r]],
        });
    }
    Barrier::new(p).solve()
}

struct Barrier {
    d: usize,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    /// vertex average, interior for a full-dimensional polytope
    start: Vec<f64>,
    /// basis of symmetric matrices as index pairs
    sym: Vec<(usize, usize)>,
}

impl Barrier {
    fn new(p: &Polyhedron) -> Self {
        let d = p.dim();
        let mut sym = Vec::new();
        for i in 0..d {
            for j in i..d {
                sym.push((i, j));
            }
        }
        Self {
            d,
            a: p.halfspaces().iter().map(|h| h.normal.clone()).collect(),
            b: p.halfspaces().iter().map(|h| h.offset).collect(),
            start: {
                let vs = p.vertices();
                let k = vs.len().max(1) as f64;
                (0..d).map(|j| vs.iter().map(|v| v[j]).sum::<f64>() / k).collect()
            },
            sym,
        }
    }

    fn mat(&self, theta: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.d, self.d);
        for (k, &(i, j)) in self.sym.iter().enumerate() {
            m[(i, j)] += theta[k];
            if i != j {
                m[(j, i)] += theta[k];
            }
        }
        m
    }

    /// Column k of M_i: E_k a.
    fn m_of(&self, a: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.d, self.sym.len());
        for (k, &(i, j)) in self.sym.iter().enumerate() {
            m[(i, k)] += a[j];
            if i != j {
                m[(j, k)] += a[i];
            }
        }
        m
    }

    /// Barrier value `t logdet B + sum log s_i`, or `None` outside the domain.
    fn value(&self, x: &DVector<f64>, t: f64) -> Option<f64> {
        let d = self.d;
        let c: Vec<f64> = x.rows(0, d).iter().copied().collect();
        let theta: Vec<f64> = x.rows(d, self.sym.len()).iter().copied().collect();
        let bm = self.mat(&theta);
        let chol = bm.clone().cholesky()?;
        let logdet: f64 = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let mut s = t * logdet;
        for (ai, bi) in self.a.iter().zip(&self.b) {
            let w = &bm * DVector::from_column_slice(ai);
            let slack = bi - dot(ai, &c) - w.norm();
            if !(slack > 0.0) {
                return None;
            }
            s += slack.ln();
        }
        Some(s)
    }

    fn grad_hess(&self, x: &DVector<f64>, t: f64) -> (DVector<f64>, DMatrix<f64>) {
        let d = self.d;
        let k = self.sym.len();
        let nv = d + k;
        let c: Vec<f64> = x.rows(0, d).iter().copied().collect();
        let theta: Vec<f64> = x.rows(d, k).iter().copied().collect();
        let bm = self.mat(&theta);
        let binv = bm.clone().try_inverse().expect("B positive definite inside the domain");
        let mut g = DVector::zeros(nv);
        let mut h = DMatrix::zeros(nv, nv);
        // logdet part
        let ek: Vec<DMatrix<f64>> = (0..k)
            .map(|q| {
                let mut th = vec![0.0; k];
                th[q] = 1.0;
                &binv * self.mat(&th)
            })
            .collect();
        for p in 0..k {
            g[d + p] += t * ek[p].trace();
            for q in 0..k {
                h[(d + p, d + q)] -= t * (&ek[p] * &ek[q]).trace();
            }
        }
        for (ai, bi) in self.a.iter().zip(&self.b) {
            let mi = self.m_of(ai);
            let w = &mi * DVector::from_column_slice(&theta);
            let r = w.norm();
            let u = &w / r;
            let slack = bi - dot(ai, &c) - r;
            // gradient of slack
            let mut gs = DVector::zeros(nv);
            for j in 0..d {
                gs[j] = -ai[j];
            }
            let gth = -(mi.transpose() * &u);
            gs.rows_mut(d, k).copy_from(&gth);
            // Hessian of slack (theta block only)
            let proj = DMatrix::identity(d, d) - &u * u.transpose();
            let hth = -(mi.transpose() * proj * &mi) / r;
            g += &gs / slack;
            h -= &gs * gs.transpose() / (slack * slack);
            let mut blk = h.view_mut((d, d), (k, k));
            blk += hth / slack;
        }
        (g, h)
    }

    fn solve(&self) -> Result<Ellipsoid> {
        let d = self.d;
        let k = self.sym.len();
        let m = self.a.len() as f64;
        let c0 = self.initial_center()?;
        let min_slack = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(ai, bi)| bi - dot(ai, &c0))
            .fold(f64::INFINITY, f64::min);
        if !(min_slack > 0.0) {
            return Err(Error::Numerical("no interior starting point".into()));
        }
        let rho = 0.5 * min_slack;
        let mut x = DVector::zeros(d + k);
        for j in 0..d {
            x[j] = c0[j];
        }
        for (q, &(i, j)) in self.sym.iter().enumerate() {
            if i == j {
                x[d + q] = rho;
            }
        }
        let mut t = 1.0;
        loop {
            for _ in 0..200 {
                let (g, h) = self.grad_hess(&x, t);
                let neg = -&h;
                let step = match neg.clone().cholesky() {
                    Some(ch) => ch.solve(&g),
                    None => {
                        // regularize
                        let reg = neg + DMatrix::identity(d + k, d + k) * 1e-10;
                        match reg.cholesky() {
                            Some(ch) => ch.solve(&g),
                            None => g.clone(),
                        }
                    }
                };
                let dec = g.dot(&step);
                if dec * 0.5 < 1e-12 {
                    break;
                }
                let f0 = self.value(&x, t).expect("iterate is interior");
                let mut s = 1.0;
                let mut moved = false;
                for _ in 0..60 {
                    let xn = &x + &step * s;
                    if let Some(f1) = self.value(&xn, t) {
                        if f1 >= f0 + 0.25 * s * dec {
                            x = xn;
                            moved = true;
                            break;
                        }
                    }
                    s *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            if m / t <= 1e-9 {
                break;
            }
            t *= 8.0;
        }
        let c: Vec<f64> = x.rows(0, d).iter().copied().collect();
        let theta: Vec<f64> = x.rows(d, k).iter().copied().collect();
        let bm = self.mat(&theta);
        let bv: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| bm[(i, j)]).collect()).collect();
        let mut shape = mat_mul(&bv, &bv);
        for i in 0..d {
            for j in 0..i {
                let s = 0.5 * (shape[i][j] + shape[j][i]);
                shape[i][j] = s;
                shape[j][i] = s;
            }
        }
        Ok(Ellipsoid { center: c, shape })
    }

    /// Analytic center of the halfspaces (Newton on the log barrier).
    fn initial_center(&self) -> Result<Vec<f64>> {
        let d = self.d;
        let mut c = self.start.clone();
        let r = self.a.iter().zip(&self.b).map(|(ai, bi)| bi - dot(ai, &c)).fold(f64::INFINITY, f64::min);
        if r.is_nan() || r <= 0.0 {
            return Err(Error::Numerical("failed to find interior point".into()));
        }
        // Newton on sum log(b - a c)
        for _ in 0..100 {
            let mut g = DVector::zeros(d);
            let mut h = DMatrix::zeros(d, d);
            let mut f0 = 0.0;
            for (ai, bi) in self.a.iter().zip(&self.b) {
                let s = bi - dot(ai, &c);
                f0 += s.ln();
                let av = DVector::from_column_slice(ai);
                g -= &av / s;
                h -= &av * av.transpose() / (s * s);
            }
            let Some(ch) = (-&h).cholesky() else { break };
            let step = ch.solve(&g);
            let dec = g.dot(&step);
            if dec < 1e-14 {
                break;
            }
            let mut s = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let cn: Vec<f64> = c.iter().zip(step.iter()).map(|(a, b)| a + s * b).collect();
                let f1: Option<f64> = self
                    .a
                    .iter()
                    .zip(&self.b)
                    .map(|(ai, bi)| {
                        let s = bi - dot(ai, &cn);
                        (s > 0.0).then(|| s.ln())
                    })
                    .sum();
                if let Some(f1) = f1 {
                    if f1 >= f0 + 0.25 * s * dec {
                        c = cn;
                        moved = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            if !moved {
                break;
            }
        }
        Ok(c)
    }
}
