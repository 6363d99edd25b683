//! John-position normalization into the classes `S_e`, `S_{1,c}` and `S_2`.
//!
//! Every normalization returns `x -> φ(M^{-1} x) - vshift` with `M = O T`, where
//! `T` comes from the John ellipsoid of a level set (for `S_e` followed by a
//! symmetric correction that widens the certificate) and `O` is a reflection
//! taking the image of the John center to the `e_1` axis.

use crate::error::{Error, Result};
use crate::function::{inner_margin, mass_kind, outer_margin, se_sandwich, MassKind, Sandwich};
use crate::geometry::{john_ellipsoid, Polyhedron};
use crate::linalg::{householder_to_e1, identity, inverse, mat_mul, mat_t_vec, mat_vec, norm, scale};
use crate::measure::centroid;
use crate::tol::{eps_geom, EPS_CENT, EPS_JOHN};
use crate::Function;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetClass {
    #[serde(rename = "S_e")]
    Se,
    #[serde(rename = "S_1c")]
    S1c,
    #[serde(rename = "S_2")]
    S2,
}

/// The map applied by a normalization together with its containment certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    /// `T`, rows.
    pub linear: Vec<Vec<f64>>,
    /// `O`, rows.
    pub rotation: Vec<Vec<f64>>,
    pub vshift: f64,
    /// `t` with `t e_1` the image of the John center (0 for `S_e`).
    pub witness_t: f64,
    pub target_class: TargetClass,
    /// Margins of the class sandwich on the normalized level set.
    pub certificate: Sandwich,
    /// The smallest margin is positive but below `EPS_JOHN`.
    pub near_boundary: bool,
}

impl Normalization {
    /// Total linear map `O T`.
    pub fn map(&self) -> Vec<Vec<f64>> {
        mat_mul(&self.rotation, &self.linear)
    }

    pub fn certified(&self) -> bool {
        self.certificate.min_margin() >= eps_geom()
    }
}

fn require_integrable(f: &Function) -> Result<()> {
    if mass_kind(f) != MassKind::Finite {
        return Err(Error::NotIntegrable);
    }
    Ok(())
}

fn require_centered(f: &Function) -> Result<()> {
    let c = norm(&centroid(f)?);
    if c > EPS_CENT {
        return Err(Error::NotCentered { norm: c });
    }
    Ok(())
}

fn image(f: &Function, m: &[Vec<f64>]) -> Result<Function> {
    let inv = inverse(m).ok_or_else(|| Error::Numerical("normalizing map is singular".into()))?;
    let mut g = f.compose_linear(&inv)?;
    if let Some(name) = f.name() {
        g = g.with_name(name);
    }
    Ok(g)
}

/// Picks a scale from the admissible interval `[lo, hi]`, its midpoint when
/// nonempty.
fn pick_scale(lo: f64, hi: f64) -> f64 {
    if hi >= lo {
        0.5 * (lo + hi)
    } else {
        lo
    }
}

/// `φ -> φ∘T^{-1}` with `B/sqrt(n) ⊂ T G_φ(1) ⊂ B`. The scale balances the
/// inner and outer margins.
pub fn normalize_even(f: &Function) -> Result<(Normalization, Function)> {
    if !f.is_even() {
        return Err(Error::NotEven);
    }
    if !f.is_geometric() {
        return Err(Error::NotGeometric);
    }
    require_integrable(f)?;
    let n = f.n();
    let g = f.level_set(1.0)?;
    let e = john_ellipsoid(&g)?;
    let b_inv = inverse(&e.sqrt_shape()).ok_or_else(|| Error::Numerical("degenerate John ellipsoid".into()))?;
    let tg = g.linear_image(&b_inv)?;
    // the John map can leave a vertex exactly on sqrt(n) times the ellipsoid;
    // a nearby symmetric correction usually opens a strict gap
    let s_fix = refine_even(&tg);
    let (_, s) = se_balance(&tg, &s_fix).ok_or_else(|| Error::Numerical("degenerate refinement".into()))?;
    let t = scale_rows(&mat_mul(&s_fix, &b_inv), s);
    let out = image(f, &t)?;
    let cert = se_sandwich(&out.level_set(1.0)?);
    Ok((finish(t, identity(n), 0.0, 0.0, TargetClass::Se, cert), out))
}

/// `φ -> φ∘(O T)^{-1}` with `t e_1 + B ⊂ O T G_φ(1) ⊂ 2n B`.
pub fn normalize_centered(f: &Function) -> Result<(Normalization, Function)> {
    if !f.is_geometric() {
        return Err(Error::NotGeometric);
    }
    require_integrable(f)?;
    require_centered(f)?;
    shifted_position(f, 1.0, 0.0, TargetClass::S1c)
}

/// `φ -> (φ - inf φ)∘(O T)^{-1}` with `t e_1 + B ⊂ G(2n) ⊂ 2n B`.
pub fn normalize_general(f: &Function) -> Result<(Normalization, Function)> {
    require_integrable(f)?;
    require_centered(f)?;
    let inf = f.inf();
    let shifted = if inf == 0.0 { f.clone() } else { f.add_constant(-inf)? };
    let level = 2.0 * f.n() as f64;
    shifted_position(&shifted, level, inf, TargetClass::S2)
}

fn shifted_position(f: &Function, level: f64, vshift: f64, class: TargetClass) -> Result<(Normalization, Function)> {
    let n = f.n();
    let nf = n as f64;
    let g = f.level_set(level)?;
    let e = john_ellipsoid(&g)?;
    let b_inv = inverse(&e.sqrt_shape()).ok_or_else(|| Error::Numerical("degenerate John ellipsoid".into()))?;
    let a = mat_vec(&b_inv, &e.center);
    let t0 = norm(&a);
    let o = if t0 > 1e-12 { householder_to_e1(&scale(&a, 1.0 / t0)) } else { identity(n) };
    let og = g.linear_image(&mat_mul(&o, &b_inv))?;
    // λ(t0 e_1 + r_in B) ⊂ λ O T G ⊂ λ R_out B, with λ t0 <= n
    let r_in = inner_margin(&og, t0, 0.0);
    let r_out = outer_radius(&og);
    let mut hi = 2.0 * nf / r_out;
    if t0 > 0.0 {
        hi = hi.min(nf / t0);
    }
    let s = pick_scale(1.0 / r_in, hi);
    let t = scale_rows(&b_inv, s);
    let wt = (s * t0).min(nf);
    let map = mat_mul(&o, &t);
    let out = image(f, &map)?;
    let gl = out.level_set(level)?;
    let cert = Sandwich {
        t: wt,
        inner: inner_margin(&gl, wt, 1.0),
        outer: outer_margin(&gl, 2.0 * nf),
    };
    Ok((finish(t, o, vshift, wt, class, cert), out))
}

fn finish(linear: Vec<Vec<f64>>, rotation: Vec<Vec<f64>>, vshift: f64, witness_t: f64, target_class: TargetClass, certificate: Sandwich) -> Normalization {
    let m = certificate.min_margin();
    Normalization {
        linear,
        rotation,
        vshift,
        witness_t,
        target_class,
        near_boundary: m >= 0.0 && m < EPS_JOHN,
        certificate,
    }
}

/// Best `S_e` margin of `S G` over all scalings, `(r_in - R/sqrt(n)) / (r_in + R)`,
/// with the scale attaining it (both margins equal there).
fn se_balance(g: &Polyhedron, s: &[Vec<f64>]) -> Option<(f64, f64)> {
    let c = 1.0 / (g.dim() as f64).sqrt();
    let inv = inverse(s)?;
    let r_in = g
        .halfspaces()
        .iter()
        .map(|h| h.offset / norm(&mat_t_vec(&inv, &h.normal)))
        .fold(f64::INFINITY, f64::min);
    let r_out = g.vertices().iter().map(|v| norm(&mat_vec(s, v))).fold(0.0, f64::max);
    let d = r_in + r_out;
    (d.is_finite() && d > 0.0).then(|| ((r_in - c * r_out) / d, (1.0 + c) / d))
}

/// Symmetric matrix with `s_00 = 1` and the remaining upper triangle from `p`.
fn symmetric_from(p: &[f64], n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    m[0][0] = 1.0;
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            if i + j == 0 {
                continue;
            }
            m[i][j] = p[k];
            m[j][i] = p[k];
            k += 1;
        }
    }
    m
}

/// Local simplex search for the symmetric `S` maximizing the balanced margin
/// of `S G`, started at the identity. Returns the identity unless it improves.
fn refine_even(g: &Polyhedron) -> Vec<Vec<f64>> {
    let n = g.dim();
    let id = identity(n);
    if n == 1 {
        return id;
    }
    let x0: Vec<f64> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).skip(1).map(|(i, j)| if i == j { 1.0 } else { 0.0 }).collect();
    let score = |p: &[f64]| -> f64 {
        let m = symmetric_from(p, n);
        if crate::linalg::determinant(&m) <= 1e-12 {
            return f64::NEG_INFINITY;
        }
        se_balance(g, &m).map_or(f64::NEG_INFINITY, |v| v.0)
    };
    let base = score(&x0);
    let (x, fx) = simplex_maximize(&score, x0, 0.05, 2000, 1e-14);
    if fx > base + 1e-12 {
        symmetric_from(&x, n)
    } else {
        id
    }
}

/// Plain Nelder–Mead (maximization).
fn simplex_maximize(f: &dyn Fn(&[f64]) -> f64, x0: Vec<f64>, step: f64, max_iters: usize, ftol: f64) -> (Vec<f64>, f64) {
    let d = x0.len();
    let mut pts = vec![x0.clone()];
    for i in 0..d {
        let mut x = x0.clone();
        x[i] += step;
        pts.push(x);
    }
    let mut vals: Vec<f64> = pts.iter().map(|x| f(x)).collect();
    for _ in 0..max_iters {
        let mut idx: Vec<usize> = (0..=d).collect();
        idx.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        pts = idx.iter().map(|&i| pts[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        if vals[0] - vals[d] <= ftol {
            break;
        }
        let c: Vec<f64> = (0..d).map(|j| pts[..d].iter().map(|x| x[j]).sum::<f64>() / d as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..d).map(|j| c[j] + t * (pts[d][j] - c[j])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr > vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            (pts[d], vals[d]) = if fe > fr { (xe, fe) } else { (xr, fr) };
        } else if fr > vals[d - 1] {
            (pts[d], vals[d]) = (xr, fr);
        } else {
            let xc = along(if fr > vals[d] { -0.5 } else { 0.5 });
            let fc = f(&xc);
            if fc > vals[d].max(fr) {
                (pts[d], vals[d]) = (xc, fc);
            } else {
                for i in 1..=d {
                    pts[i] = (0..d).map(|j| pts[0][j] + 0.5 * (pts[i][j] - pts[0][j])).collect();
                    vals[i] = f(&pts[i]);
                }
            }
        }
    }
    let best = (0..=d).fold(0, |b, i| if vals[i] > vals[b] { i } else { b });
    (pts[best].clone(), vals[best])
}

fn outer_radius(p: &Polyhedron) -> f64 {
    p.vertices().iter().map(|v| norm(v)).fold(0.0, f64::max)
}

fn scale_rows(m: &[Vec<f64>], s: f64) -> Vec<Vec<f64>> {
    m.iter().map(|r| scale(r, s)).collect()
}
