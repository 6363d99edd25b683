//! Polyhedral closed proper convex functions: a finite max of affine pieces
//! restricted to a polyhedral domain, carried together with the epigraph.

mod approx;
mod classify;

pub use approx::{approximate, Reference, Sample};
pub use classify::{
    centered_sandwich, classify, inner_margin, mass_kind, outer_margin, se_sandwich, shifted_sandwich, ClassTags, MassKind,
    Sandwich,
};

use crate::error::{Error, Result};
use crate::geometry::{Halfspace, Polyhedron};
use crate::linalg::{dot, mat_t_vec, scale};
use crate::tol::eps_geom;
use serde::{Deserialize, Serialize};

/// Largest domain dimension (epigraphs live in `R^{n+1}`).
pub const MAX_N: usize = 3;

/// The affine map `x -> <slope, x> + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub slope: Vec<f64>,
    pub intercept: f64,
}

impl AffinePiece {
    pub fn new(slope: Vec<f64>, intercept: f64) -> Self {
        Self { slope, intercept }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.slope, x) + self.intercept
    }
}

/// Which pointwise combination [`Function::combine`] performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombineOp {
    Min,
    Max,
}

/// A polyhedral convex function `max_i pieces_i` on `domain`, `+inf` outside.
///
/// The pieces and the domain are always the canonical ones read back from the
/// irredundant epigraph, so two functions are equal exactly when their
/// epigraphs are.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "crate::io::FunctionJson", into = "crate::io::FunctionJson")]
pub struct Function {
    n: usize,
    pieces: Vec<AffinePiece>,
    domain: Option<Polyhedron>,
    epi: Polyhedron,
    name: Option<String>,
}

/// Below this, a unit epigraph normal counts as vertical (a domain facet).
const VERTICAL: f64 = 1e-10;

impl Function {
    /// Builds `max(pieces)` on `domain` (`None` is all of `R^n`). An empty piece
    /// list stands for the zero function, so `new(n, vec![], Some(K))` is the
    /// convex indicator of `K`.
    pub fn new(n: usize, pieces: Vec<AffinePiece>, domain: Option<Polyhedron>) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::UnsupportedDimension(n));
        }
        let mut hs = Vec::new();
        let pieces = if pieces.is_empty() {
            vec![AffinePiece::new(vec![0.0; n], 0.0)]
        } else {
            pieces
        };
        for p in &pieces {
            if p.slope.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.slope.len(),
                });
            }
            if p.slope.iter().any(|v| !v.is_finite()) || !p.intercept.is_finite() {
                return Err(Error::InvalidInput("non-finite affine piece".into()));
            }
            let mut a = p.slope.clone();
            a.push(-1.0);
            hs.push(Halfspace::new(a, -p.intercept)?);
        }
        if let Some(d) = &domain {
            if d.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: d.dim(),
                });
            }
            for h in d.halfspaces() {
                let mut a = h.normal.clone();
                a.push(0.0);
                hs.push(Halfspace::new(a, h.offset)?);
            }
        }
        let epi = Polyhedron::from_hrep(n + 1, hs)?;
        Self::from_epigraph(epi)
    }

    /// Convex indicator `I_K` (zero on `K`, `+inf` outside).
    pub fn indicator(k: Polyhedron) -> Result<Self> {
        let n = k.dim();
        Self::new(n, Vec::new(), Some(k))
    }

    /// The function whose epigraph is the given H-representation in `R^{n+1}`.
    pub fn from_epigraph_hrep(n: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::UnsupportedDimension(n));
        }
        let epi = Polyhedron::from_hrep(n + 1, halfspaces).map_err(|e| match e {
            Error::EmptyPolyhedron => Error::ImproperInput("function is identically +inf".into()),
            e => e,
        })?;
        Self::from_epigraph(epi)
    }

    /// Reads pieces and domain off a polyhedron in `R^{n+1}` that must be an
    /// epigraph: `e_{n+1}` recedes and `-e_{n+1}` does not.
    pub fn from_epigraph(epi: Polyhedron) -> Result<Self> {
        let n = epi.dim() - 1;
        if n == 0 || n > MAX_N {
            return Err(Error::UnsupportedDimension(n));
        }
        let mut up = vec![0.0; n + 1];
        up[n] = 1.0;
        if !epi.recedes(&up, 1e-12) {
            return Err(Error::ImproperInput("set is not an epigraph".into()));
        }
        if epi.recedes(&scale(&up, -1.0), 1e-12) {
            return Err(Error::ImproperInput("function takes the value -inf".into()));
        }
        let mut pieces = Vec::new();
        let mut dom_hs = Vec::new();
        for h in epi.halfspaces() {
            let at = h.normal[n];
            if at < -VERTICAL {
                let s = -1.0 / at;
                pieces.push(AffinePiece::new(
                    h.normal[..n].iter().map(|v| v * s).collect(),
                    -h.offset * s,
                ));
            } else {
                dom_hs.push(Halfspace::new(h.normal[..n].to_vec(), h.offset)?);
            }
        }
        let domain = if dom_hs.is_empty() {
            None
        } else {
            Some(Polyhedron::from_hrep(n, dom_hs)?)
        };
        Ok(Self {
            n,
            pieces,
            domain,
            epi,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    /// Effective domain; `None` means all of `R^n`.
    pub fn domain(&self) -> Option<&Polyhedron> {
        self.domain.as_ref()
    }

    pub fn domain_or_whole(&self) -> Polyhedron {
        match &self.domain {
            Some(d) => d.clone(),
            None => Polyhedron::whole_space(self.n).expect("dimension already checked"),
        }
    }

    pub fn epigraph(&self) -> &Polyhedron {
        &self.epi
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        self.domain.as_ref().is_none_or(|d| d.contains(x, eps_geom()))
    }

    /// `φ(x)`, `+inf` outside the domain.
    pub fn eval(&self, x: &[f64]) -> f64 {
        if !self.in_domain(x) {
            return f64::INFINITY;
        }
        self.eval_pieces(x)
    }

    /// Max of the pieces, ignoring the domain.
    pub fn eval_pieces(&self, x: &[f64]) -> f64 {
        self.pieces.iter().map(|p| p.eval(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `inf φ`; `-inf` when the epigraph recedes downwards along some direction.
    pub fn inf(&self) -> f64 {
        let n = self.n;
        if self.epi.rays().iter().any(|r| r[n] < -1e-12) || self.epi.lines().iter().any(|l| l[n].abs() > 1e-12) {
            return f64::NEG_INFINITY;
        }
        self.epi.vertices().iter().map(|v| v[n]).fold(f64::INFINITY, f64::min)
    }

    /// Sub-level set `G(s) = {x : φ(x) <= s}`.
    pub fn level_set(&self, s: f64) -> Result<Polyhedron> {
        let inf = self.inf();
        if s < inf - eps_geom() * (1.0 + inf.abs()) {
            return Err(Error::EmptyLevelSet { level: s, inf });
        }
        let mut hs: Vec<Halfspace> = self.domain.as_ref().map(|d| d.halfspaces().to_vec()).unwrap_or_default();
        for p in &self.pieces {
            if p.slope.iter().all(|v| *v == 0.0) {
                continue;
            }
            hs.push(Halfspace::new(p.slope.clone(), s - p.intercept)?);
        }
        Polyhedron::from_hrep(self.n, hs).map_err(|e| match e {
            Error::EmptyPolyhedron => Error::EmptyLevelSet { level: s, inf },
            e => e,
        })
    }

    /// Canonical equality: epigraphs agree within `tol`.
    pub fn approx_eq(&self, other: &Function, tol: f64) -> bool {
        self.n == other.n && self.epi.approx_eq(&other.epi, tol)
    }

    /// Pointwise max or min of two functions.
    pub fn combine(&self, other: &Function, op: CombineOp) -> Result<Function> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        match op {
            CombineOp::Max => {
                let mut hs = self.epi.halfspaces().to_vec();
                hs.extend_from_slice(other.epi.halfspaces());
                Self::from_epigraph_hrep(self.n, hs)
            }
            CombineOp::Min => self.min_with(other),
        }
    }

    fn min_with(&self, other: &Function) -> Result<Function> {
        let d = self.n + 1;
        let mut pts = self.epi.vertices().to_vec();
        pts.extend_from_slice(other.epi.vertices());
        let mut rays = self.epi.rays_with_lines();
        rays.extend(other.epi.rays_with_lines());
        let hull = Polyhedron::from_vrep(d, pts, rays)?;
        // hull \ E1 must lie in E2: check the hull beyond every facet of E1
        let tol = eps_geom();
        for h in self.epi.halfspaces() {
            let beyond = Halfspace::new(scale(&h.normal, -1.0), -h.offset)?;
            let q = match hull.intersect_halfspaces(&[beyond]) {
                Ok(q) => q,
                Err(Error::EmptyPolyhedron) => continue,
                Err(e) => return Err(e),
            };
            let strictly_beyond = q.vertices().iter().any(|v| h.slack(v) < -tol)
                || q.rays_with_lines().iter().any(|r| dot(&h.normal, r) > 1e-12);
            if strictly_beyond && !other.epi.contains_polyhedron(&q, tol * (1.0 + max_abs(&q))) {
                return Err(Error::NonConvexMin);
            }
        }
        Self::from_epigraph(hull)
    }

    /// `x -> φ(A x + b)` for invertible `A` (rows).
    pub fn compose_affine(&self, a: &[Vec<f64>], b: &[f64]) -> Result<Function> {
        let n = self.n;
        if a.len() != n || b.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.len(),
            });
        }
        if crate::linalg::determinant(a).abs() < 1e-300 {
            return Err(Error::InvalidInput("linear map is singular".into()));
        }
        let hs = self
            .epi
            .halfspaces()
            .iter()
            .map(|h| {
                let ax = &h.normal[..n];
                let mut nn = mat_t_vec(a, ax);
                nn.push(h.normal[n]);
                Halfspace::new(nn, h.offset - dot(ax, b))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_epigraph_hrep(n, hs)
    }

    /// `x -> φ(A x)`.
    pub fn compose_linear(&self, a: &[Vec<f64>]) -> Result<Function> {
        self.compose_affine(a, &vec![0.0; self.n])
    }

    /// `φ + c`.
    pub fn add_constant(&self, c: f64) -> Result<Function> {
        let mut shift = vec![0.0; self.n + 1];
        shift[self.n] = c;
        let mut f = Self::from_epigraph(self.epi.translated(&shift))?;
        f.name = self.name.clone();
        Ok(f)
    }

    /// `c φ` for `c > 0`.
    pub fn scale_values(&self, c: f64) -> Result<Function> {
        if !(c > 0.0) {
            return Err(Error::InvalidInput("value scale must be positive".into()));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| AffinePiece::new(scale(&p.slope, c), c * p.intercept))
            .collect();
        Self::new(self.n, pieces, self.domain.clone())
    }

    /// `x -> φ(-x)`.
    pub fn reflected(&self) -> Result<Function> {
        let m: Vec<Vec<f64>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| if i == j { -1.0 } else { 0.0 }).collect())
            .collect();
        self.compose_linear(&m)
    }

    /// Structural evenness: the epigraph's H-representation is invariant
    /// under `x -> -x`.
    pub fn is_even(&self) -> bool {
        let n = self.n;
        let tol = 1e-9;
        let hs = self.epi.halfspaces();
        hs.iter().all(|h| {
            hs.iter().any(|g| {
                (h.offset - g.offset).abs() <= tol * (1.0 + h.offset.abs())
                    && (h.normal[n] - g.normal[n]).abs() <= tol
                    && h.normal[..n].iter().zip(&g.normal[..n]).all(|(a, b)| (a + b).abs() <= tol)
            })
        })
    }

    /// True when 0 lies in the interior of the domain.
    pub fn zero_in_int_dom(&self) -> bool {
        match &self.domain {
            None => true,
            Some(d) => d.contains_strictly(&vec![0.0; self.n], eps_geom()),
        }
    }

    /// `φ >= 0` and `φ(0) = 0`.
    pub fn is_geometric(&self) -> bool {
        let tol = eps_geom();
        let f0 = self.eval(&vec![0.0; self.n]);
        f0.is_finite() && f0.abs() <= tol && self.inf() >= -tol
    }
}

fn max_abs(p: &Polyhedron) -> f64 {
    p.vertices().iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs1() -> Function {
        Function::new(1, vec![AffinePiece::new(vec![1.0], 0.0), AffinePiece::new(vec![-1.0], 0.0)], None).unwrap()
    }

    fn interval(a: f64, b: f64) -> Polyhedron {
        Polyhedron::cuboid(&[a], &[b]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(abs1().eval(&[-3.0]), 3.0);
        let ind = Function::indicator(interval(-1.0, 1.0)).unwrap();
        assert_eq!(ind.eval(&[2.0]), f64::INFINITY);
        assert_eq!(ind.eval(&[0.5]), 0.0);
        let hinge = Function::new(1, vec![AffinePiece::new(vec![0.0], 0.0), AffinePiece::new(vec![1.0], -1.0)], None).unwrap();
        assert!((hinge.eval(&[4.0]) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn level_set_examples() {
        let g = abs1().level_set(2.0).unwrap();
        assert!(g.approx_eq(&interval(-2.0, 2.0), 1e-12));
        let ind = Function::indicator(interval(-1.0, 1.0)).unwrap();
        assert!(ind.level_set(0.0).unwrap().approx_eq(&interval(-1.0, 1.0), 1e-12));
        let linf = Function::new(
            2,
            vec![
                AffinePiece::new(vec![1.0, 0.0], 0.0),
                AffinePiece::new(vec![-1.0, 0.0], 0.0),
                AffinePiece::new(vec![0.0, 1.0], 0.0),
                AffinePiece::new(vec![0.0, -1.0], 0.0),
            ],
            None,
        )
        .unwrap();
        let sq = Polyhedron::cuboid(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        assert!(linf.level_set(1.0).unwrap().approx_eq(&sq, 1e-12));
        assert!(matches!(abs1().level_set(-0.5), Err(Error::EmptyLevelSet { .. })));
    }

    #[test]
    fn min_with_ball_indicator() {
        // |x| ∧ I_[-1,1] is 0 on [-1,1] and |x| outside: not convex
        let ind = Function::indicator(interval(-1.0, 1.0)).unwrap();
        assert_eq!(abs1().combine(&ind, CombineOp::Min).unwrap_err(), Error::NonConvexMin);
        // |x| ∨ I_[-1,1] is |x| on [-1,1], +inf outside
        let trunc = abs1().combine(&ind, CombineOp::Max).unwrap();
        assert_eq!(trunc.eval(&[-0.5]), 0.5);
        assert_eq!(trunc.eval(&[1.5]), f64::INFINITY);
        let m = abs1().combine(&trunc, CombineOp::Min).unwrap();
        assert!(m.approx_eq(&abs1(), 1e-12));
    }

    #[test]
    fn max_is_idempotent() {
        let f = abs1();
        assert!(f.combine(&f, CombineOp::Max).unwrap().approx_eq(&f, 1e-12));
    }

    #[test]
    fn infimum_and_geometric() {
        let f = abs1().add_constant(3.0).unwrap();
        assert!((f.inf() - 3.0).abs() < 1e-15);
        assert!(!f.is_geometric());
        assert!(abs1().is_geometric());
        let lin = Function::new(1, vec![AffinePiece::new(vec![1.0], 0.0)], None).unwrap();
        assert_eq!(lin.inf(), f64::NEG_INFINITY);
    }

    #[test]
    fn evenness_is_structural() {
        assert!(abs1().is_even());
        let hinge = Function::new(1, vec![AffinePiece::new(vec![0.0], 0.0), AffinePiece::new(vec![1.0], -1.0)], None).unwrap();
        assert!(!hinge.is_even());
        let ind = Function::indicator(interval(-1.0, 2.0)).unwrap();
        assert!(!ind.is_even());
    }

    #[test]
    fn constant_minus_infinity_rejected() {
        let e = Function::from_epigraph_hrep(1, vec![Halfspace::new(vec![1.0, 0.0], 1.0).unwrap()]);
        assert!(matches!(e, Err(Error::ImproperInput(_))));
    }
}
