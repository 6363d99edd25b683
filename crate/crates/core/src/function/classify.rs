use super::Function;
use crate::geometry::Polyhedron;
use crate::linalg::norm;
use crate::tol::{eps_geom, EPS_CENT};
use serde::{Deserialize, Serialize};

/// Structural trichotomy of `∫ e^{-φ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MassKind {
    Finite,
    Infinite,
    Zero,
}

/// Containment certificate `c + r_in B ⊂ G ⊂ r_out B` with signed margins;
/// both margins nonnegative means the sandwich holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    /// Offset `t` of the inner ball center `t e_1` (0 for centered tests).
    pub t: f64,
    /// Smallest halfspace slack of the inner ball.
    pub inner: f64,
    /// `r_out - max vertex norm` (`-inf` when unbounded).
    pub outer: f64,
}

impl Sandwich {
    pub fn holds(&self, tol: f64) -> bool {
        self.inner >= -tol && self.outer >= -tol
    }

    pub fn min_margin(&self) -> f64 {
        self.inner.min(self.outer)
    }
}

/// Class membership flags with their witnesses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassTags {
    pub is_cvx0: bool,
    pub is_even: bool,
    pub zero_in_int_dom: bool,
    pub integrable: MassKind,
    pub in_se: bool,
    pub se: Option<Sandwich>,
    pub in_s1: bool,
    pub s1: Option<Sandwich>,
    /// `in_s1` together with centroid 0.
    pub in_s1c: bool,
    pub centroid_norm: Option<f64>,
    pub in_s2: bool,
    pub s2: Option<Sandwich>,
}

/// Structural mass trichotomy: zero for lower-dimensional domains, infinite
/// when some level set is unbounded, finite otherwise.
pub fn mass_kind(f: &Function) -> MassKind {
    let n = f.n();
    if f.domain().is_some_and(|d| !d.is_full_dim()) {
        return MassKind::Zero;
    }
    let epi = f.epigraph();
    // a recession direction (d, σ) with d != 0 and σ <= 0 gives unbounded level sets
    let flat_ray = epi.rays().iter().any(|r| norm(&r[..n]) > 1e-12 && r[n] <= 1e-12 * norm(&r[..n]));
    let line = epi.lines().iter().any(|l| norm(&l[..n]) > 1e-12);
    if flat_ray || line {
        MassKind::Infinite
    } else {
        MassKind::Finite
    }
}

/// `B/sqrt(n) ⊂ G ⊂ B`.
pub fn se_sandwich(g: &Polyhedron) -> Sandwich {
    let n = g.dim() as f64;
    centered_sandwich(g, 1.0 / n.sqrt(), 1.0)
}

/// `r_in B ⊂ G ⊂ r_out B`.
pub fn centered_sandwich(g: &Polyhedron, r_in: f64, r_out: f64) -> Sandwich {
    let inner = inner_margin(g, 0.0, r_in);
    Sandwich {
        t: 0.0,
        inner,
        outer: outer_margin(g, r_out),
    }
}

/// `t e_1 + B ⊂ G ⊂ r_out B` with `t ∈ [0, t_max]` chosen to maximize the inner
/// margin, which is concave and piecewise linear in `t`.
pub fn shifted_sandwich(g: &Polyhedron, t_max: f64, r_out: f64) -> Sandwich {
    let hs = g.halfspaces();
    let mut cands = vec![0.0, t_max];
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            let da = hs[i].normal[0] - hs[j].normal[0];
            if da.abs() > 1e-15 {
                let t = (hs[i].offset - hs[j].offset) / da;
                if t > 0.0 && t < t_max {
                    cands.push(t);
                }
            }
        }
    }
    let mut best_t = 0.0;
    let mut best = f64::NEG_INFINITY;
    for t in cands {
        let m = inner_margin(g, t, 1.0);
        if m > best + 1e-15 || (m >= best - 1e-15 && t < best_t) {
            best = m;
            best_t = t;
        }
    }
    Sandwich {
        t: best_t,
        inner: best,
        outer: outer_margin(g, r_out),
    }
}

/// Smallest slack of the ball `t e_1 + r B` in the halfspaces of `g`.
pub fn inner_margin(g: &Polyhedron, t: f64, r: f64) -> f64 {
    if !g.is_full_dim() {
        return f64::NEG_INFINITY;
    }
    g.halfspaces()
        .iter()
        .map(|h| h.offset - t * h.normal[0] - r)
        .fold(f64::INFINITY, f64::min)
}

/// `r - max_v |v|`, or `-inf` for unbounded `g`.
pub fn outer_margin(g: &Polyhedron, r: f64) -> f64 {
    if !g.is_bounded() {
        return f64::NEG_INFINITY;
    }
    r - g.vertices().iter().map(|v| norm(v)).fold(0.0, f64::max)
}

/// Computes every class flag by exact polyhedral containment tests.
pub fn classify(f: &Function) -> ClassTags {
    let n = f.n();
    let nf = n as f64;
    let tol = eps_geom();
    let is_cvx0 = f.is_geometric();
    let is_even = f.is_even();
    let zero_in_int_dom = f.zero_in_int_dom();
    let integrable = mass_kind(f);
    let g1 = if f.inf() <= 1.0 { f.level_set(1.0).ok() } else { None };

    let se = g1.as_ref().map(se_sandwich);
    let in_se = is_cvx0 && is_even && se.as_ref().is_some_and(|s| s.holds(tol));

    let s1 = g1.as_ref().map(|g| shifted_sandwich(g, nf, 2.0 * nf));
    let in_s1 = is_cvx0 && s1.as_ref().is_some_and(|s| s.holds(tol));

    let centroid_norm = if integrable == MassKind::Finite {
        crate::measure::centroid(f).ok().map(|c| norm(&c))
    } else {
        None
    };
    let in_s1c = in_s1 && integrable == MassKind::Finite && centroid_norm.is_some_and(|c| c <= EPS_CENT);

    let inf = f.inf();
    let f0 = f.eval(&vec![0.0; n]);
    let s2 = if inf.is_finite() {
        f.level_set(2.0 * nf).ok().map(|g| shifted_sandwich(&g, nf, 2.0 * nf))
    } else {
        None
    };
    let in_s2 = integrable == MassKind::Finite
        && inf.abs() <= tol
        && f0 >= -tol
        && f0 <= nf + tol
        && s2.as_ref().is_some_and(|s| s.holds(tol));

    ClassTags {
        is_cvx0,
        is_even,
        zero_in_int_dom,
        integrable,
        in_se,
        se,
        in_s1,
        s1,
        in_s1c,
        centroid_norm,
        in_s2,
        s2,
    }
}
