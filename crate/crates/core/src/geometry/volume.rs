use super::polyhedron::Polyhedron;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, orthogonal_complement, scale, sub};

/// Lebesgue volume in the ambient dimension. Unbounded full-dimensional
/// polyhedra give `+inf`; lower-dimensional ones give `0`.
pub fn volume(p: &Polyhedron) -> f64 {
    if !p.is_full_dim() {
        return 0.0;
    }
    if !p.is_bounded() {
        return f64::INFINITY;
    }
    vol_centroid(p.vertices(), p.dim()).0
}

/// First moment `∫_P x dx` of a bounded polyhedron.
pub fn moment(p: &Polyhedron) -> Result<Vec<f64>> {
    if !p.is_bounded() {
        return Err(Error::UnboundedInput);
    }
    if !p.is_full_dim() {
        return Ok(vec![0.0; p.dim()]);
    }
    let (v, c) = vol_centroid(p.vertices(), p.dim());
    Ok(scale(&c, v))
}

/// Volume and centroid of `conv(points)`, assumed full-dimensional in `R^d`.
pub(crate) fn vol_centroid(points: &[Vec<f64>], d: usize) -> (f64, Vec<f64>) {
    match d {
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            (hi - lo, vec![0.5 * (lo + hi)])
        }
        2 => polygon(points),
        _ => pyramids(points, d),
    }
}

/// Shoelace formula after sorting by angle around the vertex mean.
fn polygon(points: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p[0]).sum::<f64>() / k;
    let my = points.iter().map(|p| p[1]).sum::<f64>() / k;
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0] - mx, p[1] - my)).collect();
    pts.sort_by(|a, b| a.1.atan2(a.0).partial_cmp(&b.1.atan2(b.0)).unwrap());
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..pts.len() {
        let (x0, y0) = pts[i];
        let (x1, y1) = pts[(i + 1) % pts.len()];
        let cr = x0 * y1 - x1 * y0;
        area2 += cr;
        cx += (x0 + x1) * cr;
        cy += (y0 + y1) * cr;
    }
    if area2.abs() < 1e-300 {
        return (0.0, vec![mx, my]);
    }
    let area = 0.5 * area2;
    (area.abs(), vec![mx + cx / (6.0 * area), my + cy / (6.0 * area)])
}

/// Cone decomposition from the first vertex over every facet not containing it.
fn pyramids(points: &[Vec<f64>], d: usize) -> (f64, Vec<f64>) {
    let Ok(p) = Polyhedron::from_vrep(d, points.to_vec(), Vec::new()) else {
        return (0.0, vec![0.0; d]);
    };
    if !p.is_full_dim() {
        return (0.0, vec![0.0; d]);
    }
    let verts = p.vertices();
    let apex = &verts[0];
    let mut vol = 0.0;
    let mut mom = vec![0.0; d];
    for h in p.halfspaces() {
        let height = h.slack(apex);
        let tol = 1e-9 * (1.0 + h.offset.abs());
        if height <= tol {
            continue;
        }
        let face: Vec<&Vec<f64>> = verts.iter().filter(|v| h.slack(v).abs() <= tol).collect();
        if face.len() < d {
            continue;
        }
        let basis = orthogonal_complement(&[h.normal.clone()], d);
        let origin = face[0].clone();
        let local: Vec<Vec<f64>> = face
            .iter()
            .map(|v| {
                let w = sub(v, &origin);
                basis.iter().map(|q| dot(&w, q)).collect()
            })
            .collect();
        let (fa, fc) = vol_centroid(&local, d - 1);
        if fa <= 0.0 {
            continue;
        }
        let mut c_face = origin.clone();
        for (k, q) in basis.iter().enumerate() {
            for (x, qi) in c_face.iter_mut().zip(q) {
                *x += fc[k] * qi;
            }
        }
        let pv = fa * height / d as f64;
        vol += pv;
        for i in 0..d {
            let ci = (apex[i] + d as f64 * c_face[i]) / (d as f64 + 1.0);
            mom[i] += pv * ci;
        }
    }
    if vol <= 0.0 || norm(&mom).is_nan() {
        return (0.0, vec![0.0; d]);
    }
    let c = scale(&mom, 1.0 / vol);
    (vol, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::determinant;

    #[test]
    fn square_and_cross_polytope() {
        let sq = Polyhedron::cuboid(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        assert!((volume(&sq) - 4.0).abs() < 1e-12);
        let cp = Polyhedron::from_vrep(
            2,
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            vec![],
        )
        .unwrap();
        assert!((volume(&cp) - 2.0).abs() < 1e-12);
        let m = moment(&sq).unwrap();
        assert!(m.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn cross_polytope_3d_and_4d() {
        for d in [3usize, 4] {
            let mut pts = Vec::new();
            for i in 0..d {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                pts.push(e.clone());
                e[i] = -1.0;
                pts.push(e);
            }
            let p = Polyhedron::from_vrep(d, pts, vec![]).unwrap();
            let fact: f64 = (1..=d).map(|k| k as f64).product();
            let want = 2f64.powi(d as i32) / fact;
            assert!((volume(&p) - want).abs() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn simplex_matches_determinant() {
        let v = [
            vec![0.3, -0.2, 0.1],
            vec![1.7, 0.4, -0.3],
            vec![0.2, 2.1, 0.5],
            vec![-0.4, 0.6, 1.9],
        ];
        let edges: Vec<Vec<f64>> = v[1..].iter().map(|p| sub(p, &v[0])).collect();
        let want = determinant(&edges).abs() / 6.0;
        let p = Polyhedron::from_vrep(3, v.to_vec(), vec![]).unwrap();
        assert!((volume(&p) - want).abs() < 1e-12 * want.max(1.0));
        let m = moment(&p).unwrap();
        for i in 0..3 {
            let c = v.iter().map(|q| q[i]).sum::<f64>() / 4.0;
            assert!((m[i] - c * want).abs() < 1e-12);
        }
    }

    #[test]
    fn segment_and_triangle_moments() {
        let seg = Polyhedron::cuboid(&[0.0], &[2.0]).unwrap();
        assert!((moment(&seg).unwrap()[0] - 2.0).abs() < 1e-15);
        let tri = Polyhedron::from_vrep(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], vec![]).unwrap();
        let m = moment(&tri).unwrap();
        assert!((m[0] - 1.0 / 6.0).abs() < 1e-15 && (m[1] - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_and_unbounded() {
        let ray = Polyhedron::from_vrep(2, vec![vec![0.0, 0.0]], vec![vec![1.0, 0.0]]).unwrap();
        assert_eq!(volume(&ray), 0.0);
        let quad = Polyhedron::from_vrep(2, vec![vec![0.0, 0.0]], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(volume(&quad), f64::INFINITY);
        assert_eq!(moment(&quad).unwrap_err(), Error::UnboundedInput);
    }
}
