use super::{AffinePiece, Function};
use crate::error::{Error, Result};
use crate::linalg::dot;
use serde::{Deserialize, Serialize};

/// One row of a custom reference table: a value and a (sub)gradient at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub point: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
}

/// Smooth or tabulated convex functions approximated from below by tangents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Reference {
    /// `q |x|^2 / 2`.
    Quadratic { q: f64 },
    /// `|x|`.
    EuclideanNorm,
    /// Tangent planes from a sample table.
    Custom { samples: Vec<Sample> },
}

impl Reference {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Reference::Quadratic { q } => 0.5 * q * dot(x, x),
            Reference::EuclideanNorm => dot(x, x).sqrt(),
            Reference::Custom { samples } => samples
                .iter()
                .map(|s| s.value + dot(&s.gradient, x) - dot(&s.gradient, &s.point))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Outer (tangent-plane) polyhedral approximation with about `m` pieces.
///
/// Quadratic tangency points form a centered grid on `[-R, R]^n` containing 0:
/// in 1D the `m + 1` nodes of the uniform partition into `m` cells (plus the
/// origin for odd `m`), so dyadic `m` give nested approximants; otherwise the
/// `k^n` grid with the largest odd `k` such that `k^n <= m`. The Euclidean norm uses `m` unit
/// directions (both signs in 1D, a regular polygon in 2D, a Fibonacci sphere
/// in 3D).
pub fn approximate(n: usize, reference: &Reference, m: usize, radius: f64) -> Result<Function> {
    if m < 2 {
        return Err(Error::InvalidInput("at least two pieces are required".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    if n == 0 || n > super::MAX_N {
        return Err(Error::UnsupportedDimension(n));
    }
    let pieces = match reference {
        Reference::Quadratic { q } => {
            if !(*q > 0.0) {
                return Err(Error::InvalidInput("quadratic coefficient must be positive".into()));
            }
            quadratic_points(n, m, radius)
                .into_iter()
                .map(|a| AffinePiece::new(a.iter().map(|v| q * v).collect(), -0.5 * q * dot(&a, &a)))
                .collect()
        }
        Reference::EuclideanNorm => directions(n, m).into_iter().map(|u| AffinePiece::new(u, 0.0)).collect(),
        Reference::Custom { samples } => {
            if samples.is_empty() {
                return Err(Error::InvalidInput("empty sample table".into()));
            }
            let mut out = Vec::with_capacity(samples.len());
            for s in samples {
                if s.point.len() != n || s.gradient.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: s.point.len(),
                    });
                }
                out.push(AffinePiece::new(s.gradient.clone(), s.value - dot(&s.gradient, &s.point)));
            }
            out
        }
    };
    let name = match reference {
        Reference::Quadratic { .. } => format!("quadratic-approx-m{m}"),
        Reference::EuclideanNorm => format!("norm-approx-m{m}"),
        Reference::Custom { .. } => "custom-approx".to_string(),
    };
    Ok(Function::new(n, pieces, None)?.with_name(name))
}

fn quadratic_points(n: usize, m: usize, r: f64) -> Vec<Vec<f64>> {
    if n == 1 {
        let mut pts: Vec<Vec<f64>> = (0..=m).map(|i| vec![-r + 2.0 * r * i as f64 / m as f64]).collect();
        if !pts.iter().any(|p| p[0].abs() < 1e-15) {
            pts.push(vec![0.0]);
        }
        return pts;
    }
    let mut k = 1usize;
    while (k + 2).pow(n as u32) <= m {
        k += 2;
    }
    let axis: Vec<f64> = (0..k)
        .map(|i| if k == 1 { 0.0 } else { -r + 2.0 * r * i as f64 / (k - 1) as f64 })
        .collect();
    let mut pts = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(pts.len() * k);
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

fn directions(n: usize, m: usize) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..m)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / m as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![rho * t.cos(), rho * t.sin(), z]
                })
                .collect()
        }
    }
}
