use super::dd::{self, MAX_CONE_DIM};
use crate::error::{Error, Result};
use crate::linalg::{
    add, affine_rank, dist, dot, lex_cmp, norm, orthonormal_basis, orthonormal_basis_abs, scale, sub,
};
use crate::tol::eps_geom;
use serde::{Deserialize, Serialize};

/// Largest ambient dimension handled by vertex enumeration.
pub const MAX_DIM: usize = MAX_CONE_DIM - 1;

/// The closed halfspace `{x : <normal, x> <= offset}` with a unit normal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    /// Builds a halfspace, rescaling so that the normal has unit length.
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if !(n > 1e-14) || !n.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidInput("halfspace normal must be finite and nonzero".into()));
        }
        let mut normal = scale(&normal, 1.0 / n);
        snap_zeros(&mut normal, 1.0);
        let offset = offset / n;
        Ok(Self {
            normal,
            offset: if offset.abs() <= SNAP { 0.0 } else { offset },
        })
    }

    /// Signed slack `offset - <normal, x>`; nonnegative inside.
    #[inline]
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.offset - dot(&self.normal, x)
    }

    #[inline]
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.slack(x) >= -tol
    }
}

/// Convex polyhedron carrying both an irredundant H-representation and a
/// V-representation `conv(vertices) + cone(rays) + span(lines)`.
///
/// When the lineality space is nontrivial, `vertices` are the vertices of the
/// pointed section orthogonal to `lines`. Lower-dimensional polyhedra keep
/// their affine hull as pairs of opposite halfspaces.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "crate::io::PolyhedronJson", into = "crate::io::PolyhedronJson")]
pub struct Polyhedron {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    vertices: Vec<Vec<f64>>,
    rays: Vec<Vec<f64>>,
    lines: Vec<Vec<f64>>,
    affine_dim: usize,
}

impl Polyhedron {
    /// Vertex enumeration: builds the polyhedron from halfspaces alone.
    pub fn from_hrep(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        check_dim(dim)?;
        for h in &halfspaces {
            if h.normal.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: h.normal.len(),
                });
            }
        }
        let m = halfspaces.len();
        let mut rows: Vec<Vec<f64>> = halfspaces
            .iter()
            .map(|h| {
                let mut r = h.normal.clone();
                r.push(-h.offset);
                r
            })
            .collect();
        let mut lam = vec![0.0; dim + 1];
        lam[dim] = -1.0;
        rows.push(lam);
        let cone = dd::enumerate(&rows, dim + 1);

        let tol_lambda = 1e-12;
        let mut vertices = Vec::new();
        let mut rays = Vec::new();
        let mut gen_incidence = Vec::new();
        for (r, inc) in cone.rays.iter().zip(&cone.incidence) {
            let lam = r[dim];
            if lam > tol_lambda {
                vertices.push(r[..dim].iter().map(|x| x / lam).collect::<Vec<f64>>());
                gen_incidence.push((true, inc.clone()));
            } else {
                let Some(d) = crate::linalg::normalized(&r[..dim]) else { continue };
                rays.push(d);
                gen_incidence.push((false, inc.clone()));
            }
        }
        if vertices.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        let lines: Vec<Vec<f64>> = cone.lines.iter().map(|l| l[..dim].to_vec()).collect();
        let lines = orthonormal_basis(&lines, dim, 1e-9);
        {
            let mut k = 0;
            for (is_pt, inc) in &gen_incidence {
                if *is_pt {
                    let v = &vertices[k];
                    let tol = 1e-9 * (1.0 + norm(v));
                    let tight: Vec<usize> =
                        (0..m).filter(|&i| inc.contains(i) || halfspaces[i].slack(v).abs() <= tol).collect();
                    if let Some(v) = polish_vertex(&halfspaces, &tight, &lines, &vertices[k]) {
                        vertices[k] = v;
                    }
                    k += 1;
                }
            }
        }
        for v in vertices.iter_mut() {
            let s = norm(v);
            snap_zeros(v, s.max(1.0));
        }
        for r in rays.iter_mut() {
            snap_zeros(r, 1.0);
        }

        let tol = eps_geom();
        let affine_dim = affine_rank(&vertices, &[rays.clone(), lines.clone()].concat(), dim, tol);

        // facet / equality classification from incidence
        let gens: Vec<Vec<f64>> = vertices
            .iter()
            .map(|v| {
                let mut g = v.clone();
                g.push(1.0);
                g
            })
            .chain(rays.iter().map(|r| {
                let mut g = r.clone();
                g.push(0.0);
                g
            }))
            .collect();
        // generator order above: vertices then rays; rebuild incidence in that order
        let mut inc_sorted: Vec<&dd::BitSet> = Vec::new();
        for (is_pt, inc) in &gen_incidence {
            if *is_pt {
                inc_sorted.push(inc);
            }
        }
        for (is_pt, inc) in &gen_incidence {
            if !*is_pt {
                inc_sorted.push(inc);
            }
        }
        let cone_rank = crate::linalg::rank(&gens, dim + 1, 1e-9);
        let mut equalities: Vec<usize> = Vec::new();
        let mut facets: Vec<(usize, Vec<usize>)> = Vec::new();
        for i in 0..m {
            let tight: Vec<usize> = (0..gens.len()).filter(|&k| inc_sorted[k].contains(i)).collect();
            if tight.len() == gens.len() {
                equalities.push(i);
                continue;
            }
            let sub: Vec<Vec<f64>> = tight.iter().map(|&k| gens[k].clone()).collect();
            if cone_rank >= 1 && crate::linalg::rank(&sub, dim + 1, 1e-9) + 1 == cone_rank {
                if !facets.iter().any(|(_, t)| *t == tight) {
                    facets.push((i, tight));
                }
            }
        }

        let x0 = vertices[0].clone();
        let eq_normals: Vec<Vec<f64>> = equalities.iter().map(|&i| halfspaces[i].normal.clone()).collect();
        let eq_basis = orthonormal_basis(&eq_normals, dim, 1e-9);
        let mut hs: Vec<Halfspace> = Vec::new();
        for row in rref(&eq_basis) {
            let off = dot(&row, &x0);
            if let Ok(h) = Halfspace::new(row.clone(), off) {
                hs.push(h);
            }
            if let Ok(h) = Halfspace::new(scale(&row, -1.0), -off) {
                hs.push(h);
            }
        }
        for (i, _) in &facets {
            let h = &halfspaces[*i];
            let mut a = h.normal.clone();
            let mut b = h.offset;
            for e in &eq_basis {
                let c = dot(&a, e);
                a = sub(&a, &scale(e, c));
                b -= c * dot(e, &x0);
            }
            if let Ok(h) = Halfspace::new(a, b) {
                hs.push(h);
            }
        }
        let mut p = Polyhedron {
            dim,
            halfspaces: hs,
            vertices,
            rays,
            lines,
            affine_dim,
        };
        p.sort();
        Ok(p)
    }

    /// Facet enumeration: builds the polyhedron `conv(points) + cone(rays)`.
    pub fn from_vrep(dim: usize, points: Vec<Vec<f64>>, rays: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(dim)?;
        if points.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        for v in points.iter().chain(&rays) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("non-finite coordinate".into()));
            }
        }
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(points.len() + rays.len());
        for p in &points {
            let mut r = p.clone();
            r.push(1.0);
            rows.push(r);
        }
        for d in &rays {
            if norm(d) > 1e-14 {
                let mut r = d.clone();
                r.push(0.0);
                rows.push(r);
            }
        }
        let dual = dd::enumerate(&rows, dim + 1);
        let mut hs = Vec::new();
        for h in &dual.rays {
            let a = h[..dim].to_vec();
            if norm(&a) > 1e-12 {
                hs.push(Halfspace::new(a, -h[dim])?);
            }
        }
        for h in &dual.lines {
            let a = h[..dim].to_vec();
            if norm(&a) > 1e-12 {
                hs.push(Halfspace::new(a.clone(), -h[dim])?);
                hs.push(Halfspace::new(scale(&a, -1.0), h[dim])?);
            }
        }
        let mut p = Self::from_hrep(dim, hs)?;
        // snap computed generators back to the exact inputs
        for v in p.vertices.iter_mut() {
            if let Some(q) = points.iter().find(|q| dist(q, v) <= 1e-9 * (1.0 + norm(q))) {
                if p.lines.is_empty() {
                    *v = q.clone();
                }
            }
        }
        for r in p.rays.iter_mut() {
            if let Some(q) = rays.iter().filter_map(|q| crate::linalg::normalized(q)).find(|q| dist(q, r) <= 1e-9) {
                *r = q;
            }
        }
        p.sort();
        Ok(p)
    }

    /// The whole space `R^dim`.
    pub fn whole_space(dim: usize) -> Result<Self> {
        Self::from_hrep(dim, Vec::new())
    }

    /// Axis-aligned box `[lo, hi]^dim`-style from per-coordinate bounds.
    pub fn cuboid(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let dim = lo.len();
        let mut hs = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            hs.push(Halfspace::new(e.clone(), hi[i])?);
            e[i] = -1.0;
            hs.push(Halfspace::new(e, -lo[i])?);
        }
        Self::from_hrep(dim, hs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Extreme rays modulo the lineality space.
    pub fn rays(&self) -> &[Vec<f64>] {
        &self.rays
    }

    /// Orthonormal basis of the lineality space.
    pub fn lines(&self) -> &[Vec<f64>] {
        &self.lines
    }

    /// All recession generators, lines expanded into opposite ray pairs.
    pub fn rays_with_lines(&self) -> Vec<Vec<f64>> {
        let mut out = self.rays.clone();
        for l in &self.lines {
            out.push(l.clone());
            out.push(scale(l, -1.0));
        }
        out
    }

    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lines.is_empty()
    }

    pub fn is_full_dim(&self) -> bool {
        self.affine_dim == self.dim
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.halfspaces.iter().all(|h| h.contains(x, tol))
    }

    /// True when `x` is in the interior with every slack above `tol`.
    pub fn contains_strictly(&self, x: &[f64], tol: f64) -> bool {
        self.is_full_dim() && self.halfspaces.iter().all(|h| h.slack(x) > tol)
    }

    /// Whether `d` is a recession direction.
    pub fn recedes(&self, d: &[f64], tol: f64) -> bool {
        self.halfspaces.iter().all(|h| dot(&h.normal, d) <= tol)
    }

    /// Smallest slack of `other`'s generators in `self`'s halfspaces; `other ⊂ self`
    /// iff the margin is nonnegative. Recession directions that escape give `-inf`.
    pub fn containment_margin(&self, other: &Polyhedron) -> f64 {
        let mut margin = f64::INFINITY;
        for h in &self.halfspaces {
            for v in &other.vertices {
                margin = margin.min(h.slack(v));
            }
            for r in other.rays_with_lines() {
                if dot(&h.normal, &r) > 1e-9 {
                    return f64::NEG_INFINITY;
                }
            }
        }
        margin
    }

    pub fn contains_polyhedron(&self, other: &Polyhedron, tol: f64) -> bool {
        self.containment_margin(other) >= -tol
    }

    /// Lower-left-first canonical ordering of both representations.
    fn sort(&mut self) {
        let clean = |v: &mut Vec<f64>| {
            for x in v.iter_mut() {
                if x.abs() < 1e-15 {
                    *x = 0.0;
                }
            }
        };
        self.vertices.iter_mut().for_each(clean);
        self.rays.iter_mut().for_each(clean);
        self.dedup_vertices();
        self.halfspaces.sort_by(|a, b| {
            lex_cmp(&a.normal, &b.normal).then(a.offset.partial_cmp(&b.offset).unwrap_or(std::cmp::Ordering::Equal))
        });
        self.vertices.sort_by(|a, b| lex_cmp(a, b));
        self.rays.sort_by(|a, b| lex_cmp(a, b));
        let mut lines = rref(&self.lines);
        for l in lines.iter_mut() {
            let n = norm(l);
            l.iter_mut().for_each(|x| *x /= n);
        }
        self.lines = orthonormal_basis(&lines, self.dim, 1e-9);
    }

    fn dedup_vertices(&mut self) {
        let tol = eps_geom();
        let mut kept: Vec<Vec<f64>> = Vec::with_capacity(self.vertices.len());
        for v in self.vertices.drain(..) {
            if !kept.iter().any(|k| dist(k, &v) <= tol) {
                kept.push(v);
            }
        }
        self.vertices = kept;
        let mut kr: Vec<Vec<f64>> = Vec::with_capacity(self.rays.len());
        for r in self.rays.drain(..) {
            if !kr.iter().any(|k| dist(k, &r) <= tol) {
                kr.push(r);
            }
        }
        self.rays = kr;
    }

    /// Structural equality of the canonical representations within `tol`.
    pub fn approx_eq(&self, other: &Polyhedron, tol: f64) -> bool {
        if self.dim != other.dim
            || self.affine_dim != other.affine_dim
            || self.vertices.len() != other.vertices.len()
            || self.rays.len() != other.rays.len()
            || self.lines.len() != other.lines.len()
        {
            return false;
        }
        // lineality spaces: each line of self lies in span(other.lines)
        for l in &self.lines {
            let mut r = l.clone();
            for q in &other.lines {
                let c = dot(&r, q);
                r = sub(&r, &scale(q, c));
            }
            if norm(&r) > tol.max(1e-9) {
                return false;
            }
        }
        matches_all(&self.vertices, &other.vertices, tol) && matches_all(&self.rays, &other.rays, tol)
    }

    /// Image under the invertible linear map `x -> m x` (rows of `m`).
    pub fn linear_image(&self, m: &[Vec<f64>]) -> Result<Self> {
        let inv = crate::linalg::inverse(m)
            .ok_or_else(|| Error::InvalidInput("linear map is singular".into()))?;
        // {m x : a·x <= b} = {y : (m^{-T} a)·y <= b}
        let hs = self
            .halfspaces
            .iter()
            .map(|h| Halfspace::new(crate::linalg::mat_t_vec(&inv, &h.normal), h.offset))
            .collect::<Result<Vec<_>>>()?;
        Self::from_hrep(self.dim, hs)
    }

    /// `s * P` for `s > 0`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut p = self.clone();
        p.vertices.iter_mut().for_each(|v| *v = scale(v, s));
        p.halfspaces.iter_mut().for_each(|h| h.offset *= s);
        p
    }

    /// `P + t`.
    pub fn translated(&self, t: &[f64]) -> Self {
        let mut p = self.clone();
        p.vertices.iter_mut().for_each(|v| *v = add(v, t));
        p.halfspaces.iter_mut().for_each(|h| h.offset += dot(&h.normal, t));
        // keep vertices orthogonal to the lineality space
        if !p.lines.is_empty() {
            for v in p.vertices.iter_mut() {
                for l in &p.lines {
                    let c = dot(v, l);
                    *v = sub(v, &scale(l, c));
                }
            }
        }
        p
    }

    /// Intersection with extra halfspaces.
    pub fn intersect_halfspaces(&self, extra: &[Halfspace]) -> Result<Self> {
        let mut hs = self.halfspaces.clone();
        hs.extend_from_slice(extra);
        Self::from_hrep(self.dim, hs)
    }

    pub fn intersect(&self, other: &Polyhedron) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        self.intersect_halfspaces(&other.halfspaces)
    }

    /// Negates the last coordinate in both representations.
    pub fn reflect_last(&self) -> Self {
        let flip = |v: &Vec<f64>| {
            let mut w = v.clone();
            if let Some(x) = w.last_mut() {
                *x = -*x;
            }
            w
        };
        let mut p = Polyhedron {
            dim: self.dim,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace {
                    normal: flip(&h.normal),
                    offset: h.offset,
                })
                .collect(),
            vertices: self.vertices.iter().map(flip).collect(),
            rays: self.rays.iter().map(flip).collect(),
            lines: self.lines.iter().map(flip).collect(),
            affine_dim: self.affine_dim,
        };
        p.sort();
        p
    }

    /// Polar set `{y : <x, y> <= 1 for all x in P}` built from the V-representation.
    pub fn polar(&self) -> Result<Self> {
        let mut hs = Vec::new();
        for v in &self.vertices {
            if norm(v) > 1e-10 {
                hs.push(Halfspace::new(v.clone(), 1.0)?);
            }
        }
        for r in &self.rays {
            hs.push(Halfspace::new(r.clone(), 0.0)?);
        }
        for l in &self.lines {
            hs.push(Halfspace::new(l.clone(), 0.0)?);
            hs.push(Halfspace::new(scale(l, -1.0), 0.0)?);
        }
        Self::from_hrep(self.dim, hs)
    }

    /// Centrally reflected copy `-P`.
    pub fn negated(&self) -> Self {
        let mut p = Polyhedron {
            dim: self.dim,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace {
                    normal: scale(&h.normal, -1.0),
                    offset: h.offset,
                })
                .collect(),
            vertices: self.vertices.iter().map(|v| scale(v, -1.0)).collect(),
            rays: self.rays.iter().map(|v| scale(v, -1.0)).collect(),
            lines: self.lines.clone(),
            affine_dim: self.affine_dim,
        };
        p.sort();
        p
    }
}

/// Least-squares solution of the tight constraints (plus orthogonality to the
/// lineality space); `None` when they do not pin down a point near `v`.
fn polish_vertex(hs: &[Halfspace], tight: &[usize], lines: &[Vec<f64>], v: &[f64]) -> Option<Vec<f64>> {
    let d = v.len();
    let rows = tight.len() + lines.len();
    if rows < d {
        return None;
    }
    let a = nalgebra::DMatrix::from_fn(rows, d, |i, j| {
        if i < tight.len() {
            hs[tight[i]].normal[j]
        } else {
            lines[i - tight.len()][j]
        }
    });
    let b = nalgebra::DVector::from_fn(rows, |i, _| if i < tight.len() { hs[tight[i]].offset } else { 0.0 });
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.iter().filter(|&&s| s > 1e-8 * smax.max(1.0)).count() < d {
        return None;
    }
    let x = svd.solve(&b, 1e-10 * smax).ok()?;
    let x: Vec<f64> = x.iter().copied().collect();
    let resid = |p: &[f64]| {
        tight.iter().map(|&i| hs[i].slack(p).abs()).chain(lines.iter().map(|l| dot(l, p).abs())).fold(0.0, f64::max)
    };
    (dist(&x, v) <= 1e-7 * (1.0 + norm(v)) && resid(&x) < resid(v)).then_some(x)
}

const SNAP: f64 = 1e-13;

/// Flushes entries below `SNAP * scale` to exact zeros.
fn snap_zeros(v: &mut [f64], scale: f64) {
    for x in v.iter_mut() {
        if x.abs() <= SNAP * scale {
            *x = 0.0;
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        Err(Error::UnsupportedDimension(dim))
    } else {
        Ok(())
    }
}

fn matches_all(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    let mut used = vec![false; b.len()];
    for x in a {
        let mut found = false;
        for (j, y) in b.iter().enumerate() {
            if !used[j] && dist(x, y) <= tol {
                used[j] = true;
                found = true;
                break;
            }
        }
        if !found {
            return false;
        }
    }
    true
}

/// Reduced row echelon form of the row space spanned by `rows`.
pub(crate) fn rref(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<f64>> = orthonormal_basis_abs(rows, cols, 1e-10);
    let r = m.len();
    let mut lead = 0;
    for i in 0..r {
        // pivot column with the largest entry among remaining rows
        let mut piv = None;
        while lead < cols {
            let (best, val) = (i..r)
                .map(|k| (k, m[k][lead].abs()))
                .fold((i, 0.0), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
            if val > 1e-10 {
                piv = Some(best);
                break;
            }
            lead += 1;
        }
        let Some(p) = piv else { break };
        m.swap(i, p);
        let d = m[i][lead];
        for x in m[i].iter_mut() {
            *x /= d;
        }
        for k in 0..r {
            if k != i {
                let f = m[k][lead];
                if f != 0.0 {
                    for c in 0..cols {
                        m[k][c] -= f * m[i][c];
                    }
                }
            }
        }
        lead += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(n: &[f64], b: f64) -> Halfspace {
        Halfspace::new(n.to_vec(), b).unwrap()
    }

    #[test]
    fn interval_vertices() {
        let p = Polyhedron::from_hrep(1, vec![hs(&[1.0], 1.0), hs(&[-1.0], 1.0)]).unwrap();
        assert_eq!(p.vertices(), &[vec![-1.0], vec![1.0]]);
        assert!(p.rays().is_empty());
        assert_eq!(p.affine_dim(), 1);
    }

    #[test]
    fn half_line_has_vertex_and_ray() {
        let p = Polyhedron::from_hrep(1, vec![hs(&[-1.0], 0.0)]).unwrap();
        assert_eq!(p.vertices().len(), 1);
        assert!(p.vertices()[0][0].abs() < 1e-12);
        assert_eq!(p.rays(), &[vec![1.0]]);
    }

    #[test]
    fn square_from_hrep() {
        let p = Polyhedron::cuboid(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(p.vertices().len(), 4);
        for v in p.vertices() {
            assert!((v[0].abs() - 1.0).abs() < 1e-12 && (v[1].abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_polytope_from_vrep() {
        let pts = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let p = Polyhedron::from_vrep(2, pts, vec![]).unwrap();
        assert_eq!(p.halfspaces().len(), 4);
        let s = 1.0 / 2f64.sqrt();
        for h in p.halfspaces() {
            assert!((h.normal[0].abs() - s).abs() < 1e-12);
            assert!((h.offset - s).abs() < 1e-12);
        }
    }

    #[test]
    fn ray_from_origin_in_plane() {
        let p = Polyhedron::from_vrep(2, vec![vec![0.0, 0.0]], vec![vec![1.0, 0.0]]).unwrap();
        assert_eq!(p.affine_dim(), 1);
        // x2 = 0 as two halfspaces plus -x1 <= 0
        assert_eq!(p.halfspaces().len(), 3);
        assert!(p.contains(&[5.0, 0.0], 1e-12));
        assert!(!p.contains(&[5.0, 0.1], 1e-12));
        assert!(!p.contains(&[-0.1, 0.0], 1e-12));
    }

    #[test]
    fn empty_intersection_is_reported() {
        let r = Polyhedron::from_hrep(1, vec![hs(&[1.0], -1.0), hs(&[-1.0], -1.0)]);
        assert_eq!(r.unwrap_err(), Error::EmptyPolyhedron);
    }

    #[test]
    fn redundant_points_are_dropped() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.2, 0.2], vec![1.0, 0.0]];
        let p = Polyhedron::from_vrep(2, pts, vec![]).unwrap();
        assert_eq!(p.vertices().len(), 3);
        assert_eq!(p.halfspaces().len(), 3);
    }

    #[test]
    fn whole_space_has_full_lineality() {
        let p = Polyhedron::whole_space(3).unwrap();
        assert_eq!(p.lines().len(), 3);
        assert_eq!(p.affine_dim(), 3);
        assert!(p.halfspaces().is_empty());
    }

    #[test]
    fn strip_has_a_line() {
        let p = Polyhedron::from_hrep(2, vec![hs(&[1.0, 0.0], 1.0), hs(&[-1.0, 0.0], 1.0)]).unwrap();
        assert_eq!(p.lines().len(), 1);
        assert_eq!(p.vertices().len(), 2);
        for v in p.vertices() {
            assert!(v[1].abs() < 1e-12);
        }
    }
}
