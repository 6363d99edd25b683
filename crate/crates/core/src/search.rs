//! Extremizer search for `P_L`, `P_A`, `P_J` over small parametrized families
//! of polyhedral convex functions, with a brute-force lattice oracle.

use crate::error::{Error, Result};
use crate::function::{AffinePiece, Function};
use crate::geometry::{Halfspace, Polyhedron};
use crate::measure::{centroid, product, product_value};
use crate::position::{normalize_centered, normalize_even, normalize_general};
use crate::transforms::Transform;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Parameter count above which the lattice oracle refuses to run.
pub const ORACLE_MAX_PARAMS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    Even,
    Centered,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Parametrization {
    /// Values at the knots `R i / k` (and their mirror images), linear in between.
    GridValues { knots: usize },
    /// A profile with `knots` values on `[0, R]` applied to the gauge of a
    /// regular polygon with `facets` sides and inradius 1.
    Radial { knots: usize, facets: usize },
}

/// A family `params -> φ` with fixed knots on `[-R, R]^n`, values in `[0, value_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub n: usize,
    pub symmetry: Symmetry,
    pub parametrization: Parametrization,
    pub domain_radius: f64,
    pub value_max: f64,
    /// Extend the outermost pieces past `R` instead of truncating there.
    #[serde(default)]
    pub linear_tail: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Objective {
    pub functional: Transform,
    pub direction: Direction,
}

impl Objective {
    pub fn new(functional: Transform, direction: Direction) -> Self {
        Self { functional, direction }
    }

    fn sign(&self) -> f64 {
        match self.direction {
            Direction::Max => 1.0,
            Direction::Min => -1.0,
        }
    }
}

/// Anything the search and the oracle can scan.
pub trait Family: Sync {
    fn param_count(&self) -> usize;
    /// Box for the oracle lattice and the search projection.
    fn bounds(&self) -> (Vec<f64>, Vec<f64>);
    fn symmetry(&self) -> Symmetry;
    fn is_feasible(&self, p: &[f64]) -> bool;
    /// False only when no feasible point starts with `prefix`; the oracle
    /// prunes its lattice with it.
    fn prefix_feasible(&self, prefix: &[f64]) -> bool {
        let _ = prefix;
        true
    }
    /// Some feasible point near `p`.
    fn project(&self, p: &[f64]) -> Vec<f64>;
    /// Search start derived from a box sample `x`.
    fn start_from(&self, x: &[f64]) -> Vec<f64> {
        self.project(x)
    }
    fn build(&self, p: &[f64]) -> Result<Function>;
    /// A second assembly of the same function, sharing no code with `build`.
    fn build_independent(&self, p: &[f64]) -> Result<Function>;
}

impl FamilySpec {
    pub fn even_grid(knots: usize, domain_radius: f64, value_max: f64) -> Self {
        Self {
            n: 1,
            symmetry: Symmetry::Even,
            parametrization: Parametrization::GridValues { knots },
            domain_radius,
            value_max,
            linear_tail: false,
        }
    }

    pub fn centered_grid(knots: usize, domain_radius: f64, value_max: f64) -> Self {
        Self {
            symmetry: Symmetry::Centered,
            ..Self::even_grid(knots, domain_radius, value_max)
        }
    }

    pub fn radial(n: usize, knots: usize, facets: usize, domain_radius: f64, value_max: f64) -> Self {
        Self {
            n,
            symmetry: Symmetry::Even,
            parametrization: Parametrization::Radial { knots, facets },
            domain_radius,
            value_max,
            linear_tail: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.domain_radius > 0.0) || !(self.value_max > 0.0) {
            return Err(Error::InvalidInput("domain radius and value bound must be positive".into()));
        }
        match (&self.parametrization, self.n, self.symmetry) {
            (Parametrization::GridValues { knots }, 1, _) if *knots >= 1 => Ok(()),
            (Parametrization::GridValues { .. }, 1, _) => Err(Error::InvalidInput("at least one knot".into())),
            (Parametrization::GridValues { .. }, n, _) => Err(Error::UnsupportedDimension(n)),
            (Parametrization::Radial { .. }, _, Symmetry::Centered) => {
                Err(Error::InvalidInput("radial families are even".into()))
            }
            (Parametrization::Radial { knots, facets }, n, _) => {
                if !(1..=2).contains(&n) {
                    return Err(Error::UnsupportedDimension(n));
                }
                if *knots == 0 || (n == 2 && (*facets < 4 || facets % 2 == 1)) {
                    return Err(Error::InvalidInput("radial family needs knots and an even facet count >= 4".into()));
                }
                Ok(())
            }
        }
    }

    pub fn with_linear_tail(mut self) -> Self {
        self.linear_tail = true;
        self
    }

    fn knots(&self) -> usize {
        match self.parametrization {
            Parametrization::GridValues { knots } | Parametrization::Radial { knots, .. } => knots,
        }
    }

    /// Positive abscissae `R i / k`, `i = 1..=k`.
    fn abscissae(&self) -> Vec<f64> {
        let k = self.knots();
        (1..=k).map(|i| self.domain_radius * i as f64 / k as f64).collect()
    }

    /// Unit facet normals of the profile gauge.
    fn directions(&self) -> Vec<Vec<f64>> {
        match (self.n, &self.parametrization) {
            (2, Parametrization::Radial { facets, .. }) => (0..*facets)
                .map(|j| {
                    let a = 2.0 * std::f64::consts::PI * j as f64 / *facets as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect(),
            _ => vec![vec![1.0], vec![-1.0]],
        }
    }

    /// Centered families: full knot list `-R..R` and values with `v(0) = 0`,
    /// the last value still missing.
    fn centered_values(&self, p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let k = self.knots();
        let xs: Vec<f64> = (0..=2 * k).map(|i| self.domain_radius * (i as f64 - k as f64) / k as f64).collect();
        let mut vs = Vec::with_capacity(2 * k);
        vs.extend_from_slice(&p[..k]);
        vs.push(0.0);
        vs.extend_from_slice(&p[k..]);
        (xs, vs)
    }

    /// Secant slopes of the profile starting at `(0, 0)`.
    fn profile_slopes(&self, p: &[f64]) -> Vec<f64> {
        let xs = self.abscissae();
        let mut prev = (0.0, 0.0);
        xs.iter()
            .zip(p)
            .map(|(&x, &v)| {
                let s = (v - prev.1) / (x - prev.0);
                prev = (x, v);
                s
            })
            .collect()
    }

    fn even_pieces(&self, p: &[f64]) -> Vec<AffinePiece> {
        let xs = self.abscissae();
        let dirs = self.directions();
        let slopes = self.profile_slopes(p);
        let mut pieces = Vec::with_capacity(slopes.len() * dirs.len());
        for (i, s) in slopes.iter().enumerate() {
            let c = p[i] - s * xs[i];
            for u in &dirs {
                pieces.push(AffinePiece::new(u.iter().map(|ui| s * ui).collect(), c));
            }
        }
        pieces
    }

    fn even_domain(&self) -> Result<Polyhedron> {
        let hs = self
            .directions()
            .into_iter()
            .map(|u| Halfspace::new(u, self.domain_radius))
            .collect::<Result<Vec<_>>>()?;
        Polyhedron::from_hrep(self.n, hs)
    }

    fn centered_function(&self, xs: &[f64], vs: &[f64]) -> Result<Function> {
        let pieces = xs
            .windows(2)
            .zip(vs.windows(2))
            .map(|(x, v)| {
                let s = (v[1] - v[0]) / (x[1] - x[0]);
                AffinePiece::new(vec![s], v[0] - s * x[0])
            })
            .collect();
        let r = self.domain_radius;
        let domain = if self.linear_tail { None } else { Some(Polyhedron::cuboid(&[-r], &[r])?) };
        Function::new(1, pieces, domain)
    }

    /// Solves for the last value so that the centroid vanishes.
    fn close_centroid(&self, p: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let (xs, mut vs) = self.centered_values(p);
        let k = xs.len() - 1;
        let h = xs[k] - xs[k - 1];
        let s_prev = (vs[k - 1] - vs[k - 2]) / (xs[k - 1] - xs[k - 2]);
        let lo0 = vs[k - 1] + s_prev.max(0.0) * h;
        let hi0 = self.value_max;
        if lo0 > hi0 {
            return Err(Error::NotCentered { norm: f64::NAN });
        }
        let c = |v: f64| -> Result<f64> {
            let mut w = vs.clone();
            w.push(v);
            Ok(centroid(&self.centered_function(&xs, &w)?)?[0])
        };
        let (mut lo, mut hi) = (lo0, hi0);
        let (clo, chi) = (c(lo)?, c(hi)?);
        // raising the last value moves the centroid left
        if clo < 0.0 || chi > 0.0 {
            return Err(Error::NotCentered { norm: if clo < 0.0 { -clo } else { chi } });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if c(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v = if c(lo)?.abs() <= c(hi)?.abs() { lo } else { hi };
        vs.push(v);
        Ok((xs, vs))
    }
}

/// Weighted isotonic regression (pool adjacent violators), nondecreasing.
fn isotonic(y: &[f64], w: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, f64, usize)> = Vec::new();
    for (&yi, &wi) in y.iter().zip(w) {
        blocks.push((yi, wi, 1));
        while blocks.len() > 1 && blocks[blocks.len() - 2].0 > blocks[blocks.len() - 1].0 {
            let b = blocks.pop().unwrap();
            let a = blocks.last_mut().unwrap();
            let wt = a.1 + b.1;
            a.0 = (a.0 * a.1 + b.0 * b.1) / wt;
            a.1 = wt;
            a.2 += b.2;
        }
    }
    blocks.into_iter().flat_map(|(v, _, c)| std::iter::repeat(v).take(c)).collect()
}

impl Family for FamilySpec {
    fn param_count(&self) -> usize {
        match self.symmetry {
            Symmetry::Even => self.knots(),
            Symmetry::Centered => 2 * self.knots() - 1,
        }
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.param_count();
        (vec![0.0; m], vec![self.value_max; m])
    }

    fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    fn is_feasible(&self, p: &[f64]) -> bool {
        let tol = 1e-12;
        if p.len() != self.param_count() || p.iter().any(|v| !(*v >= -tol && *v <= self.value_max + tol)) {
            return false;
        }
        match self.symmetry {
            Symmetry::Even => {
                let s = self.profile_slopes(p);
                s[0] >= -tol && s.windows(2).all(|w| w[1] >= w[0] - tol)
            }
            Symmetry::Centered => {
                let (xs, vs) = self.centered_values(p);
                let k = self.knots();
                let s: Vec<f64> = (0..vs.len() - 1).map(|i| (vs[i + 1] - vs[i]) / (xs[i + 1] - xs[i])).collect();
                s.windows(2).all(|w| w[1] >= w[0] - tol) && s[k - 1] <= tol && s.get(k).is_none_or(|&v| v >= -tol)
            }
        }
    }

    fn prefix_feasible(&self, prefix: &[f64]) -> bool {
        let tol = 1e-12;
        if prefix.iter().any(|v| !(*v >= -tol && *v <= self.value_max + tol)) {
            return false;
        }
        match self.symmetry {
            Symmetry::Even if !prefix.is_empty() => {
                let s = self.profile_slopes(prefix);
                s[0] >= -tol && s.windows(2).all(|w| w[1] >= w[0] - tol)
            }
            _ => true,
        }
    }

    fn start_from(&self, x: &[f64]) -> Vec<f64> {
        match self.symmetry {
            Symmetry::Even => self.project(x),
            Symmetry::Centered => {
                // an even profile is centered, so the closing value exists
                let k = self.knots();
                let mut p = x.to_vec();
                for j in 0..k - 1 {
                    p[k + j] = p[k - 1 - j];
                }
                self.project(&p)
            }
        }
    }

    fn project(&self, p: &[f64]) -> Vec<f64> {
        let vmax = self.value_max;
        match self.symmetry {
            Symmetry::Even => {
                let xs = self.abscissae();
                let w: Vec<f64> = xs.iter().enumerate().map(|(i, x)| x - if i == 0 { 0.0 } else { xs[i - 1] }).collect();
                let s: Vec<f64> = isotonic(&self.profile_slopes(p), &w).into_iter().map(|s| s.max(0.0)).collect();
                let mut v = 0.0;
                let mut out: Vec<f64> = s.iter().zip(&w).map(|(s, w)| {
                    v += s * w;
                    v
                })
                .collect();
                let top = *out.last().unwrap();
                if top > vmax {
                    out.iter_mut().for_each(|x| *x *= vmax / top);
                }
                out.iter().map(|x| x.clamp(0.0, vmax)).collect()
            }
            Symmetry::Centered => {
                let k = self.knots();
                let (xs, vs) = self.centered_values(p);
                // slopes of the 2k - 1 intervals from -R to x_{k-1}
                let m = vs.len() - 1;
                let w: Vec<f64> = (0..m).map(|i| xs[i + 1] - xs[i]).collect();
                let s: Vec<f64> = (0..m).map(|i| (vs[i + 1] - vs[i]) / w[i]).collect();
                let mut s = isotonic(&s, &w);
                for (i, si) in s.iter_mut().enumerate() {
                    *si = if i < k { si.min(0.0) } else { si.max(0.0) };
                }
                let mut out = vec![0.0; m + 1];
                for i in (0..k).rev() {
                    out[i] = out[i + 1] - s[i] * w[i];
                }
                for i in k..m {
                    out[i + 1] = out[i] + s[i] * w[i];
                }
                let left = out[0];
                if left > vmax {
                    out[..k].iter_mut().for_each(|x| *x *= vmax / left);
                }
                let right = out[m];
                if right > vmax {
                    out[k + 1..].iter_mut().for_each(|x| *x *= vmax / right);
                }
                out.remove(k);
                out.iter().map(|x| x.clamp(0.0, vmax)).collect()
            }
        }
    }

    fn build(&self, p: &[f64]) -> Result<Function> {
        self.validate()?;
        if !self.is_feasible(p) {
            return Err(Error::InvalidInput("parameters violate discrete convexity or bounds".into()));
        }
        match self.symmetry {
            Symmetry::Even => {
                let domain = if self.linear_tail { None } else { Some(self.even_domain()?) };
                Function::new(self.n, self.even_pieces(p), domain)
            }
            Symmetry::Centered => {
                let (xs, vs) = self.close_centroid(p)?;
                self.centered_function(&xs, &vs)
            }
        }
    }

    fn build_independent(&self, p: &[f64]) -> Result<Function> {
        self.validate()?;
        if !self.is_feasible(p) {
            return Err(Error::InvalidInput("parameters violate discrete convexity or bounds".into()));
        }
        // epigraph from its vertices and the vertical ray
        let n = self.n;
        let mut pts = Vec::new();
        let mut up = vec![0.0; n];
        up.push(1.0);
        let mut rays = vec![up];
        match self.symmetry {
            Symmetry::Even => {
                let xs = self.abscissae();
                let m = self.directions().len();
                // polygon vertices of {<u_j, x> <= 1}
                let corners: Vec<Vec<f64>> = if n == 1 {
                    vec![vec![1.0], vec![-1.0]]
                } else {
                    let rc = 1.0 / (std::f64::consts::PI / m as f64).cos();
                    (0..m)
                        .map(|j| {
                            let a = std::f64::consts::PI * (2 * j + 1) as f64 / m as f64;
                            vec![rc * a.cos(), rc * a.sin()]
                        })
                        .collect()
                };
                let mut origin = vec![0.0; n];
                origin.push(0.0);
                pts.push(origin);
                for (x, v) in xs.iter().zip(p) {
                    for c in &corners {
                        let mut q: Vec<f64> = c.iter().map(|ci| ci * x).collect();
                        q.push(*v);
                        pts.push(q);
                    }
                }
                if self.linear_tail {
                    let k = xs.len();
                    let (x0, v0) = if k == 1 { (0.0, 0.0) } else { (xs[k - 2], p[k - 2]) };
                    let rise = (p[k - 1] - v0) / (xs[k - 1] - x0);
                    for c in &corners {
                        let mut r = c.clone();
                        r.push(rise);
                        rays.push(r);
                    }
                }
            }
            Symmetry::Centered => {
                let (xs, vs) = self.close_centroid(p)?;
                for (x, v) in xs.iter().zip(&vs) {
                    pts.push(vec![*x, *v]);
                }
                if self.linear_tail {
                    let k = xs.len() - 1;
                    rays.push(vec![-(xs[1] - xs[0]), vs[0] - vs[1]]);
                    rays.push(vec![xs[k] - xs[k - 1], vs[k] - vs[k - 1]]);
                }
            }
        }
        Function::from_epigraph(Polyhedron::from_vrep(n + 1, pts, rays)?)
    }
}

/// Normalizes into the class associated with the objective and returns the
/// normalized function.
fn normalize_for(f: &Function, symmetry: Symmetry, functional: Transform) -> Result<Function> {
    Ok(match (functional, symmetry) {
        (Transform::L, _) => normalize_general(f)?.1,
        (_, Symmetry::Even) => normalize_even(f)?.1,
        (_, Symmetry::Centered) => normalize_centered(f)?.1,
    })
}

/// The normalized function and its product, or the error that made the
/// point infeasible.
pub fn evaluate_point(family: &dyn Family, params: &[f64], objective: Objective) -> Result<(Function, f64)> {
    let f = family.build(params)?;
    let g = normalize_for(&f, family.symmetry(), objective.functional)?;
    let v = product_value(&g, objective.functional)?.ok_or(Error::NotIntegrable)?;
    Ok((g, v))
}

/// Signed objective (negated for minimization). Parameters violating the
/// family constraints are rejected; domain errors during evaluation give
/// `-inf`.
pub fn evaluate_objective(family: &dyn Family, params: &[f64], objective: Objective) -> Result<f64> {
    if !family.is_feasible(params) {
        return Err(Error::InvalidInput("parameters violate discrete convexity or bounds".into()));
    }
    Ok(match evaluate_point(family, params, objective) {
        Ok((_, v)) if v.is_finite() => objective.sign() * v,
        Ok(_) => f64::NEG_INFINITY,
        Err(Error::InvalidInput(m)) => return Err(Error::InvalidInput(m)),
        Err(_) => f64::NEG_INFINITY,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    /// Simplex rebuilds around the incumbent after the first run.
    pub rebuilds: usize,
    /// Stop once the simplex values agree to this absolute tolerance.
    pub ftol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 4,
            max_iters: 400,
            rebuilds: 40,
            ftol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub oracle_value: f64,
    pub oracle_params: Vec<f64>,
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_params: Vec<f64>,
    pub best_function: Option<Function>,
    pub objective: Objective,
    /// Product value (unsigned).
    pub value: f64,
    /// Best signed value so far, per iteration of the winning restart.
    pub trace: Vec<f64>,
    pub oracle: Option<OracleRecord>,
    pub seed: u64,
    pub evaluations: usize,
}

fn better(a: (f64, &[f64]), b: (f64, &[f64])) -> bool {
    match a.0.total_cmp(&b.0) {
        Ordering::Greater => true,
        Ordering::Less => false,
        _ => crate::linalg::lex_cmp(a.1, b.1) == Ordering::Less,
    }
}

struct Run {
    x: Vec<f64>,
    fx: f64,
    trace: Vec<f64>,
    evals: usize,
}

fn nelder_mead(family: &dyn Family, objective: Objective, x0: Vec<f64>, step: f64, cfg: &SearchConfig) -> Run {
    let d = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64]| -> f64 {
        evals += 1;
        evaluate_objective(family, x, objective).unwrap_or(f64::NEG_INFINITY)
    };
    let (lo, hi) = family.bounds();
    let mut simplex: Vec<Vec<f64>> = vec![x0.clone()];
    for i in 0..d {
        let mut x = x0.clone();
        // step toward the interior of the box
        x[i] += if x[i] + step <= hi[i] { step } else { -step };
        x[i] = x[i].clamp(lo[i], hi[i]);
        simplex.push(family.project(&x));
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();
    let mut trace = Vec::with_capacity(cfg.max_iters);
    for _ in 0..cfg.max_iters {
        // sort descending by value (we maximize)
        let mut idx: Vec<usize> = (0..=d).collect();
        idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(crate::linalg::lex_cmp(&simplex[a], &simplex[b])));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        values = idx.iter().map(|&i| values[i]).collect();
        trace.push(values[0]);
        let spread = values[0] - values[d];
        if spread.is_finite() && spread <= cfg.ftol {
            break;
        }
        let centroid: Vec<f64> = (0..d).map(|j| simplex[..d].iter().map(|x| x[j]).sum::<f64>() / d as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            let x: Vec<f64> = (0..d).map(|j| (centroid[j] + t * (simplex[d][j] - centroid[j])).clamp(lo[j], hi[j])).collect();
            family.project(&x)
        };
        let xr = along(-1.0);
        let fr = eval(&xr);
        if fr > values[0] {
            let xe = along(-2.0);
            let fe = eval(&xe);
            if fe > fr {
                simplex[d] = xe;
                values[d] = fe;
            } else {
                simplex[d] = xr;
                values[d] = fr;
            }
            continue;
        }
        if fr > values[d - 1] {
            simplex[d] = xr;
            values[d] = fr;
            continue;
        }
        let (xc, fc) = if fr > values[d] {
            let x = along(-0.5);
            let f = eval(&x);
            (x, f)
        } else {
            let x = along(0.5);
            let f = eval(&x);
            (x, f)
        };
        if fc > values[d].max(fr) {
            simplex[d] = xc;
            values[d] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..=d {
            let x: Vec<f64> = (0..d).map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j])).collect();
            simplex[i] = family.project(&x);
            values[i] = eval(&simplex[i]);
        }
    }
    let best = (0..=d).fold(0, |b, i| if better((values[i], &simplex[i]), (values[b], &simplex[b])) { i } else { b });
    let fx = values[best];
    if trace.last().is_none_or(|&t| t < fx) {
        trace.push(fx);
    }
    // best-so-far is monotone by construction of the sort; keep it explicit
    for i in 1..trace.len() {
        if trace[i] < trace[i - 1] {
            trace[i] = trace[i - 1];
        }
    }
    Run {
        x: simplex[best].clone(),
        fx,
        trace,
        evals,
    }
}

/// Rebuilds the simplex around the incumbent with a halved step until a
/// rebuild stops improving it; projection can flatten a simplex onto a face.
fn restarted(family: &dyn Family, objective: Objective, x0: Vec<f64>, step: f64, cfg: &SearchConfig) -> Run {
    let mut run = nelder_mead(family, objective, x0, step, cfg);
    let mut h = step;
    for _ in 0..cfg.rebuilds {
        let next = nelder_mead(family, objective, run.x.clone(), h, cfg);
        let gain = next.fx - run.fx;
        let mut trace = std::mem::take(&mut run.trace);
        let last = *trace.last().unwrap_or(&f64::NEG_INFINITY);
        trace.extend(next.trace.iter().map(|v| v.max(last)));
        let evals = run.evals + next.evals;
        if better((next.fx, &next.x), (run.fx, &run.x)) {
            run = next;
        }
        run.trace = trace;
        run.evals = evals;
        if !(gain > cfg.ftol) {
            if h < 1e-6 * step {
                break;
            }
            h *= 0.5;
        }
    }
    run
}

fn start_point(family: &dyn Family, rng: &mut ChaCha8Rng, restart: usize) -> Vec<f64> {
    let (lo, hi) = family.bounds();
    let x: Vec<f64> = if restart == 0 {
        lo.iter().zip(&hi).map(|(l, h)| l + 0.5 * (h - l)).collect()
    } else {
        lo.iter().zip(&hi).map(|(l, h)| rng.gen_range(*l..=*h)).collect()
    };
    family.start_from(&x)
}

/// Best feasible point of the 3-per-axis lattice over the family box; optima
/// of small families often sit on box corners.
fn coarse_start(family: &dyn Family, objective: Objective) -> Option<Vec<f64>> {
    let m = family.param_count();
    let (lo, hi) = family.bounds();
    (0..3usize.pow(m as u32))
        .into_par_iter()
        .filter_map(|mut k| {
            let p: Vec<f64> = (0..m)
                .map(|j| {
                    let i = k % 3;
                    k /= 3;
                    lo[j] + (hi[j] - lo[j]) * i as f64 / 2.0
                })
                .collect();
            let v = evaluate_objective(family, &p, objective).ok()?;
            v.is_finite().then_some((v, p))
        })
        .reduce_with(|a, b| if better((b.0, &b.1), (a.0, &a.1)) { b } else { a })
        .map(|(_, p)| p)
}

/// Multi-start projected Nelder–Mead. Restarts run in parallel and the best
/// is chosen by value, then by lexicographically smallest parameters. For
/// families small enough for the oracle the first start is the best point of
/// a coarse lattice.
pub fn run_search(family: &dyn Family, objective: Objective, cfg: &SearchConfig) -> Result<SearchResult> {
    let m = family.param_count();
    if m == 0 {
        return Err(Error::InvalidInput("family has no parameters".into()));
    }
    let (lo, hi) = family.bounds();
    let step = 0.1 * lo.iter().zip(&hi).map(|(l, h)| h - l).fold(0.0, f64::max);
    let mut starts: Vec<Vec<f64>> = (0..cfg.restarts.max(1))
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(r as u64));
            start_point(family, &mut rng, r)
        })
        .collect();
    if m <= ORACLE_MAX_PARAMS {
        if let Some(x) = coarse_start(family, objective) {
            starts[0] = x;
        }
    }
    let runs: Vec<Run> = starts
        .into_par_iter()
        .map(|x0| restarted(family, objective, x0, step, cfg))
        .collect();
    let evaluations = runs.iter().map(|r| r.evals).sum();
    let best = runs
        .into_iter()
        .reduce(|a, b| if better((b.fx, &b.x), (a.fx, &a.x)) { b } else { a })
        .expect("at least one restart");
    let point = evaluate_point(family, &best.x, objective).ok();
    Ok(SearchResult {
        value: point.as_ref().map_or(f64::NAN, |p| p.1),
        best_function: point.map(|p| p.0),
        best_params: best.x,
        objective,
        trace: best.trace,
        oracle: None,
        seed: cfg.seed,
        evaluations,
    })
}

/// Exhaustive scan of the lattice with `resolution` points per axis over the
/// family box, skipping infeasible points (whole subtrees when a prefix is
/// already infeasible). Functions are assembled through
/// [`Family::build_independent`].
pub fn brute_force_oracle(family: &dyn Family, objective: Objective, resolution: usize) -> Result<(f64, Vec<f64>)> {
    let m = family.param_count();
    if m > ORACLE_MAX_PARAMS {
        return Err(Error::TooManyParameters {
            count: m,
            limit: ORACLE_MAX_PARAMS,
        });
    }
    if resolution < 2 {
        return Err(Error::InvalidInput("oracle resolution must be at least 2".into()));
    }
    let (lo, hi) = family.bounds();
    let axis = |j: usize, i: usize| lo[j] + (hi[j] - lo[j]) * i as f64 / (resolution - 1) as f64;
    // depth-first over coordinates, dropping prefixes no feasible point extends
    let mut points = Vec::new();
    let mut stack = vec![Vec::new()];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == m {
            if family.is_feasible(&prefix) {
                points.push(prefix);
            }
            continue;
        }
        let j = prefix.len();
        for i in 0..resolution {
            let mut next = prefix.clone();
            next.push(axis(j, i));
            if family.prefix_feasible(&next) {
                stack.push(next);
            }
        }
    }
    let best = points
        .into_par_iter()
        .filter_map(|p| {
            let f = family.build_independent(&p).ok()?;
            let g = normalize_for(&f, family.symmetry(), objective.functional).ok()?;
            let v = product(&g, objective.functional).ok()?.product?;
            Some((objective.sign() * v, p))
        })
        .reduce_with(|a, b| if better((b.0, &b.1), (a.0, &a.1)) { b } else { a });
    match best {
        Some((v, p)) => Ok((objective.sign() * v, p)),
        None => Err(Error::InvalidInput("no feasible lattice point".into())),
    }
}

/// Runs the search and, for small families, the oracle, recording the gap.
pub fn run_search_with_oracle(family: &dyn Family, objective: Objective, cfg: &SearchConfig, resolution: usize) -> Result<SearchResult> {
    let mut r = run_search(family, objective, cfg)?;
    let (ov, op) = brute_force_oracle(family, objective, resolution)?;
    r.oracle = Some(OracleRecord {
        gap: (r.value - ov).abs(),
        oracle_value: ov,
        oracle_params: op,
    });
    Ok(r)
}

/// Shape of an even 1D profile read from its knot values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileShape {
    /// Last abscissa where the profile still vanishes.
    pub plateau_end: f64,
    /// Common slope of the rise after the plateau.
    pub slope: f64,
    /// Largest relative deviation from that slope along the rise.
    pub slope_spread: f64,
    /// End of the linear rise.
    pub rise_end: f64,
    /// Smallest slope past the rise divided by the rise slope (`inf` if the
    /// rise reaches the domain boundary).
    pub wall_ratio: f64,
    pub finite_domain: bool,
    /// Zero plateau, a linear rise over at least two segments, then a wall
    /// or the domain boundary.
    pub truncated_gauge: bool,
}

/// Relative slope tolerance of the rise.
pub const RISE_TOL: f64 = 1e-3;
/// A segment steeper than this multiple of the rise slope counts as a wall.
pub const WALL_RATIO: f64 = 2.0;

/// Truncated-gauge predicate for an even grid profile `v` at `R i / k`.
/// `tol` is the absolute value below which the profile counts as zero.
pub fn truncated_gauge_shape(spec: &FamilySpec, params: &[f64], tol: f64) -> Result<ProfileShape> {
    if spec.symmetry != Symmetry::Even || spec.n != 1 {
        return Err(Error::InvalidInput("shape predicate applies to even 1D families".into()));
    }
    if params.len() != spec.param_count() {
        return Err(Error::DimensionMismatch {
            expected: spec.param_count(),
            found: params.len(),
        });
    }
    let xs = spec.abscissae();
    let slopes = spec.profile_slopes(params);
    let p = params.iter().take_while(|v| v.abs() <= tol).count();
    let plateau_end = if p == 0 { 0.0 } else { xs[p - 1] };
    let finite_domain = !spec.linear_tail;
    let Some(&s0) = slopes.get(p) else {
        return Ok(ProfileShape {
            plateau_end,
            slope: 0.0,
            slope_spread: 0.0,
            rise_end: plateau_end,
            wall_ratio: f64::INFINITY,
            finite_domain,
            truncated_gauge: false,
        });
    };
    let mut q = p;
    while q < slopes.len() && (slopes[q] - s0).abs() <= RISE_TOL * s0.abs() {
        q += 1;
    }
    let rise = &slopes[p..q];
    let slope = rise.iter().sum::<f64>() / rise.len() as f64;
    let slope_spread = rise.iter().map(|s| (s - slope).abs() / slope.abs()).fold(0.0, f64::max);
    let wall_ratio = slopes[q..].iter().map(|s| s / slope).fold(f64::INFINITY, f64::min);
    Ok(ProfileShape {
        plateau_end,
        slope,
        slope_spread,
        rise_end: xs[q - 1],
        wall_ratio,
        finite_domain,
        truncated_gauge: q - p >= 2 && slope > 0.0 && wall_ratio >= WALL_RATIO && finite_domain,
    })
}
