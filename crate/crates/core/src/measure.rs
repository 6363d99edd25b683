//! Exact integration of `e^{-φ}` and `x e^{-φ}` through the layer-cake
//! formula, centroids, and the products `P_L`, `P_A`, `P_J`.
//!
//! Between consecutive epigraph vertex heights the volume and first moment
//! of `G(t)` are polynomials in `t` of degree at most `n` and `n + 1`. Each is
//! recovered by Newton interpolation at Chebyshev nodes and integrated against
//! `e^{-t}` in closed form.

use crate::error::{Error, Result};
use crate::function::{classify, mass_kind, ClassTags, Function, MassKind};
use crate::geometry::{moment, volume};
use crate::linalg::norm;
use crate::tol::EPS_CENT;
use crate::transforms::Transform;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `∫ e^{-φ}` with its first moment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassResult {
    pub kind: MassKind,
    pub value: Option<f64>,
    pub moment: Option<Vec<f64>>,
}

impl MassResult {
    fn of_kind(kind: MassKind) -> Self {
        let value = match kind {
            MassKind::Zero => Some(0.0),
            _ => None,
        };
        Self {
            kind,
            value,
            moment: None,
        }
    }

    pub fn finite_value(&self) -> Option<f64> {
        (self.kind == MassKind::Finite).then_some(self.value).flatten()
    }
}

/// Lebesgue mass of `e^{-φ}`.
pub fn exp_integral(f: &Function) -> MassResult {
    let kind = mass_kind(f);
    if kind != MassKind::Finite {
        return MassResult::of_kind(kind);
    }
    let (value, mom) = integrate(f, true);
    MassResult {
        kind,
        value: Some(value),
        moment: Some(mom),
    }
}

/// Mass only, skipping the moment polynomials.
pub fn mass(f: &Function) -> MassResult {
    let kind = mass_kind(f);
    if kind != MassKind::Finite {
        return MassResult::of_kind(kind);
    }
    let (value, _) = integrate(f, false);
    MassResult {
        kind,
        value: Some(value),
        moment: None,
    }
}

/// Barycenter of `e^{-φ} dx`.
pub fn centroid(f: &Function) -> Result<Vec<f64>> {
    let m = exp_integral(f);
    match (m.kind, m.value, m.moment) {
        (MassKind::Finite, Some(v), Some(mo)) if v > 0.0 => Ok(mo.iter().map(|x| x / v).collect()),
        _ => Err(Error::NotIntegrable),
    }
}

fn integrate(f: &Function, with_moment: bool) -> (f64, Vec<f64>) {
    if f.n() == 1 {
        line_integral(f)
    } else {
        layer_cake(f, with_moment)
    }
}

/// Exact mass and moment in one dimension, summing closed forms over the
/// linear pieces between consecutive epigraph vertices and over the tails.
fn line_integral(f: &Function) -> (f64, Vec<f64>) {
    let epi = f.epigraph();
    let mut vs: Vec<(f64, f64)> = epi.vertices().iter().map(|v| (v[0], v[1])).collect();
    vs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let (mut total, mut mom) = (0.0, 0.0);
    for w in vs.windows(2) {
        let ((x0, h0), (x1, h1)) = (w[0], w[1]);
        let len = x1 - x0;
        let z = h1 - h0;
        let e = (-h0).exp();
        // ∫_0^L e^{-s u} du and ∫_0^L u e^{-s u} du with s L = z
        let i0 = if z == 0.0 { len } else { len * (-(-z).exp_m1() / z) };
        let i1 = len * len * moment_kernel(z);
        total += e * i0;
        mom += e * (x0 * i0 + i1);
    }
    for r in epi.rays() {
        if r[0].abs() <= 1e-12 {
            continue;
        }
        let slope = r[1] / r[0].abs();
        let &(x, h) = if r[0] > 0.0 { vs.last().unwrap() } else { vs.first().unwrap() };
        let e = (-h).exp();
        let sign = r[0].signum();
        total += e / slope;
        mom += e * (x / slope + sign / (slope * slope));
    }
    (total, vec![mom])
}

/// `(1 - e^{-z}(1 + z)) / z^2`, by its series near 0.
fn moment_kernel(z: f64) -> f64 {
    if z.abs() < 0.5 {
        let mut sum = 0.0;
        let mut zp = 1.0;
        let mut fact = 2.0;
        for j in 2..30 {
            if j > 2 {
                fact *= j as f64;
                zp *= -z;
            }
            sum += zp * (j - 1) as f64 / fact;
        }
        sum
    } else {
        (1.0 - (-z).exp() * (1.0 + z)) / (z * z)
    }
}

/// Sorted distinct epigraph vertex heights.
fn breakpoints(f: &Function) -> Vec<f64> {
    let n = f.n();
    let mut hs: Vec<f64> = f.epigraph().vertices().iter().map(|v| v[n]).collect();
    hs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = hs.iter().fold(1.0f64, |m, h| m.max(h.abs()));
    let mut out: Vec<f64> = Vec::with_capacity(hs.len());
    for h in hs {
        if out.last().is_none_or(|&l| h - l > 1e-12 * scale) {
            out.push(h);
        }
    }
    out
}

/// Volume and moment of `G(t)`; zeros when the level set is empty or thin.
fn slice(f: &Function, t: f64, with_moment: bool) -> (f64, Vec<f64>) {
    let n = f.n();
    match f.level_set(t) {
        Ok(g) => {
            let v = volume(&g);
            let m = if with_moment && v > 0.0 {
                moment(&g).unwrap_or_else(|_| vec![0.0; n])
            } else {
                vec![0.0; n]
            };
            (v, m)
        }
        Err(_) => (0.0, vec![0.0; n]),
    }
}

fn layer_cake(f: &Function, with_moment: bool) -> (f64, Vec<f64>) {
    let n = f.n();
    let bps = breakpoints(f);
    let nodes = n + 2;
    let nint = bps.len();
    // interval k: [bps[k], bps[k+1]] for k < nint-1, tail [bps[last], inf) for k = nint-1
    let parts: Vec<(f64, Vec<f64>)> = (0..nint)
        .into_par_iter()
        .map(|k| {
            let a = bps[k];
            let (us, width) = if k + 1 < nint {
                let w = bps[k + 1] - a;
                let us: Vec<f64> = (0..nodes)
                    .map(|j| {
                        let th = std::f64::consts::PI * (2 * j + 1) as f64 / (2 * nodes) as f64;
                        0.5 * w * (1.0 - th.cos())
                    })
                    .collect();
                (us, Some(w))
            } else {
                ((1..=nodes).map(|j| j as f64).collect(), None)
            };
            let samples: Vec<(f64, Vec<f64>)> = us.iter().map(|&u| slice(f, a + u, with_moment)).collect();
            let vol_vals: Vec<f64> = samples.iter().map(|s| s.0).collect();
            let ea = (-a).exp();
            let vol = ea * integrate_poly(&newton_to_monomial(&us, &vol_vals), width);
            let mut mom = vec![0.0; n];
            if with_moment {
                for (i, mi) in mom.iter_mut().enumerate() {
                    let vals: Vec<f64> = samples.iter().map(|s| s.1[i]).collect();
                    *mi = ea * integrate_poly(&newton_to_monomial(&us, &vals), width);
                }
            }
            (vol, mom)
        })
        .collect();
    let mut total = 0.0;
    let mut mom = vec![0.0; n];
    for (v, m) in parts {
        total += v;
        for (a, b) in mom.iter_mut().zip(m) {
            *a += b;
        }
    }
    (total, mom)
}

/// Monomial coefficients (in `u`) of the interpolating polynomial through
/// `(xs[i], ys[i])`, via divided differences.
fn newton_to_monomial(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let k = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..k {
        for i in (j..k).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
        }
    }
    // Horner expansion of sum dd[j] prod_{i<j} (u - xs[i])
    let mut c = vec![0.0; k];
    for j in (0..k).rev() {
        // c <- c * (u - xs[j]) + dd[j]
        let mut next = vec![0.0; k];
        for p in 0..k {
            if c[p] != 0.0 {
                if p + 1 < k {
                    next[p + 1] += c[p];
                }
                next[p] -= c[p] * xs[j];
            }
        }
        next[0] += dd[j];
        c = next;
    }
    c
}

/// `∫_0^w e^{-u} Σ c_k u^k du`, with `w = None` meaning `+inf`.
fn integrate_poly(c: &[f64], w: Option<f64>) -> f64 {
    c.iter()
        .enumerate()
        .map(|(k, ck)| {
            if *ck == 0.0 {
                0.0
            } else {
                ck * match w {
                    Some(w) => lower_gamma_int(k, w),
                    None => factorial(k),
                }
            }
        })
        .sum()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `γ(k+1, w) = ∫_0^w u^k e^{-u} du`.
fn lower_gamma_int(k: usize, w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let a = (k + 1) as f64;
    if w < a + 20.0 {
        // γ(a, w) = w^a e^{-w} Σ_j w^j / (a (a+1) ... (a+j))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut j = 1.0;
        while term > sum * 1e-17 {
            term *= w / (a + j);
            sum += term;
            j += 1.0;
            if j > 1000.0 {
                break;
            }
        }
        w.powf(a) * (-w).exp() * sum
    } else {
        // k! (1 - e^{-w} Σ_{j<=k} w^j / j!)
        let mut s = 0.0;
        let mut t = 1.0;
        for j in 0..=k {
            if j > 0 {
                t *= w / j as f64;
            }
            s += t;
        }
        factorial(k) * (1.0 - (-w).exp() * s)
    }
}

/// Constants for the informational bound checks. Only the constant-free sides
/// are decided by default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    /// Lower constant `c` in `c^n (n! w_n)^2 <= P_A` and `c^n <= P_L`-type bounds.
    pub c: Option<f64>,
    /// Upper constant `C` in `P_A <= (n! w_n)^2 (1 + C/n)`.
    pub big_c: Option<f64>,
    /// `c_n` in `c_n^{-1} <= P_J <= c_n`.
    pub c_n: Option<f64>,
}

/// One bound with its verdict; `passed` is `None` when not decidable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub bound: f64,
    pub applicable: bool,
    pub passed: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductReport {
    pub transform: Transform,
    pub mass_primal: MassResult,
    pub mass_dual: MassResult,
    /// Product of the masses, or their quotient for `J`.
    pub product: Option<f64>,
    pub tags: ClassTags,
    pub bounds: Vec<BoundCheck>,
}

/// `(n! w_n)^2`, the square of `n!` times the unit-ball volume.
pub fn factorial_ball_sq(n: usize) -> f64 {
    let v = factorial(n) * crate::geometry::unit_ball_volume(n);
    v * v
}

/// `P_T(φ)` with preconditions, class tags and bound checks.
pub fn product(f: &Function, t: Transform) -> Result<ProductReport> {
    product_with(f, t, &BoundConstants::default())
}

pub fn product_with(f: &Function, t: Transform, consts: &BoundConstants) -> Result<ProductReport> {
    if !f.zero_in_int_dom() {
        return Err(Error::IllPositioned("0 is not an interior point of the domain".into()));
    }
    if t != Transform::L && !f.is_geometric() {
        return Err(Error::IllPositioned("function is not geometric".into()));
    }
    let dual = t.apply(f)?;
    let mass_primal = mass(f);
    let mass_dual = mass(&dual);
    let product = match (mass_primal.finite_value(), mass_dual.finite_value()) {
        (Some(a), Some(b)) => Some(match t {
            Transform::J => a / b,
            _ => a * b,
        }),
        _ => None,
    };
    let tags = classify(f);
    let n = f.n();
    let mut bounds = Vec::new();
    let decide = |applicable: bool, ok: Option<bool>| if applicable { ok } else { None };
    match t {
        Transform::L => {
            let bound = (2.0 * std::f64::consts::PI).powi(n as i32);
            let applicable = tags.is_even
                || tags.centroid_norm.is_some_and(|c| c <= EPS_CENT)
                || centroid(&dual).is_ok_and(|c| norm(&c) <= EPS_CENT);
            bounds.push(BoundCheck {
                name: "P_L <= (2 pi)^n".into(),
                bound,
                applicable,
                passed: decide(applicable, product.map(|p| p <= bound * (1.0 + 1e-9))),
            });
            if let Some(c) = consts.c {
                let lb = c.powi(n as i32);
                bounds.push(BoundCheck {
                    name: "P_L >= c^n".into(),
                    bound: lb,
                    applicable,
                    passed: decide(applicable, product.map(|p| p >= lb)),
                });
            }
        }
        Transform::A => {
            let lead = factorial_ball_sq(n);
            bounds.push(BoundCheck {
                name: "(n! w_n)^2 (reference)".into(),
                bound: lead,
                applicable: true,
                passed: None,
            });
            if let Some(c) = consts.c {
                let lb = c.powi(n as i32) * lead;
                bounds.push(BoundCheck {
                    name: "P_A >= c^n (n! w_n)^2".into(),
                    bound: lb,
                    applicable: true,
                    passed: product.map(|p| p >= lb),
                });
            }
            if let Some(cc) = consts.big_c {
                let ub = lead * (1.0 + cc / n as f64);
                let applicable = tags.is_even;
                bounds.push(BoundCheck {
                    name: "P_A <= (n! w_n)^2 (1 + C/n)".into(),
                    bound: ub,
                    applicable,
                    passed: decide(applicable, product.map(|p| p <= ub)),
                });
            }
        }
        Transform::J => {
            if let Some(cn) = consts.c_n {
                bounds.push(BoundCheck {
                    name: "c_n^-1 <= P_J <= c_n".into(),
                    bound: cn,
                    applicable: true,
                    passed: product.map(|p| p >= 1.0 / cn && p <= cn),
                });
            }
        }
    }
    Ok(ProductReport {
        transform: t,
        mass_primal,
        mass_dual,
        product,
        tags,
        bounds,
    })
}

/// Product value only, without tags or bounds (the search hot path).
pub fn product_value(f: &Function, t: Transform) -> Result<Option<f64>> {
    if !f.zero_in_int_dom() {
        return Err(Error::IllPositioned("0 is not an interior point of the domain".into()));
    }
    if t != Transform::L && !f.is_geometric() {
        return Err(Error::IllPositioned("function is not geometric".into()));
    }
    let dual = t.apply(f)?;
    Ok(match (mass(f).finite_value(), mass(&dual).finite_value()) {
        (Some(a), Some(b)) => Some(match t {
            Transform::J => a / b,
            _ => a * b,
        }),
        _ => None,
    })
}

/// Fradelizi's inequality `sup f <= e^n f(0)` for `f = e^{-φ}` with centroid 0,
/// i.e. `φ(0) - inf φ <= n`.
pub fn fradelizi_check(f: &Function) -> Result<bool> {
    let c = centroid(f)?;
    let cn = norm(&c);
    if cn > EPS_CENT {
        return Err(Error::NotCentered { norm: cn });
    }
    let n = f.n() as f64;
    let gap = f.eval(&vec![0.0; f.n()]) - f.inf();
    Ok(gap <= n + 1e-9 * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::AffinePiece;
    use crate::geometry::Polyhedron;

    fn abs(c: f64) -> Function {
        Function::new(1, vec![AffinePiece::new(vec![c], 0.0), AffinePiece::new(vec![-c], 0.0)], None).unwrap()
    }

    #[test]
    fn gamma_branches_agree() {
        for k in 0..5 {
            for &w in &[0.001, 0.5, 3.0, 10.0, 26.0, 40.0] {
                // trapezoid reference
                let m = 200_000;
                let h = w / m as f64;
                let mut s = 0.0;
                for i in 0..=m {
                    let u = i as f64 * h;
                    let wt = if i == 0 || i == m { 0.5 } else { 1.0 };
                    s += wt * u.powi(k as i32) * (-u).exp();
                }
                s *= h;
                let g = lower_gamma_int(k, w);
                assert!((g - s).abs() <= 1e-8 * s.max(1e-12), "k={k} w={w}: {g} vs {s}");
            }
        }
    }

    #[test]
    fn interpolation_recovers_cubic() {
        let xs = [0.1, 0.4, 0.9, 1.3];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - x + 0.5 * x * x - 0.25 * x * x * x).collect();
        let c = newton_to_monomial(&xs, &ys);
        for (a, b) in c.iter().zip([2.0, -1.0, 0.5, -0.25]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn line_integral_matches_layer_cake() {
        let pieces = vec![
            AffinePiece::new(vec![-1.5], -0.25),
            AffinePiece::new(vec![0.0], 0.0),
            AffinePiece::new(vec![0.5], 0.0),
            AffinePiece::new(vec![2.0], -1.0),
        ];
        let f = Function::new(1, pieces.clone(), None).unwrap();
        let g = Function::new(1, pieces, Some(Polyhedron::cuboid(&[-0.7], &[3.0]).unwrap())).unwrap();
        for h in [f, g, abs(0.01), abs(1.0).add_constant(-2.0).unwrap()] {
            let (a, ma) = line_integral(&h);
            let (b, mb) = layer_cake(&h, true);
            assert!((a - b).abs() <= 1e-12 * a, "{a} vs {b}");
            assert!((ma[0] - mb[0]).abs() <= 1e-11 * a, "{ma:?} vs {mb:?}");
        }
    }

    #[test]
    fn moment_kernel_is_continuous() {
        for z in [-0.5f64, 0.5] {
            let direct = (1.0 - (-z).exp() * (1.0 + z)) / (z * z);
            assert!((moment_kernel(z) - direct).abs() < 1e-14);
            assert!((moment_kernel(z * (1.0 - 1e-12)) - direct).abs() < 1e-12);
        }
        assert_eq!(moment_kernel(0.0), 0.5);
    }

    #[test]
    fn masses_of_examples() {
        let m = exp_integral(&abs(1.0));
        assert_eq!(m.kind, MassKind::Finite);
        assert!((m.value.unwrap() - 2.0).abs() < 1e-12);
        let ind = Function::indicator(Polyhedron::cuboid(&[-1.0], &[1.0]).unwrap()).unwrap();
        assert!((exp_integral(&ind).value.unwrap() - 2.0).abs() < 1e-12);
        let half = Function::new(1, vec![AffinePiece::new(vec![0.0], 0.0), AffinePiece::new(vec![-1.0], 0.0)], None).unwrap();
        assert_eq!(exp_integral(&half).kind, MassKind::Infinite);
    }

    #[test]
    fn centroid_examples() {
        let ind = Function::indicator(Polyhedron::cuboid(&[0.0], &[1.0]).unwrap()).unwrap();
        assert!((centroid(&ind).unwrap()[0] - 0.5).abs() < 1e-14);
        let c = centroid(&abs(1.0)).unwrap();
        assert!(c[0].abs() < 1e-12);
        // x on [0, 40]: ∫ x e^{-x} / ∫ e^{-x}
        let lin = Function::new(1, vec![AffinePiece::new(vec![1.0], 0.0)], Some(Polyhedron::cuboid(&[0.0], &[40.0]).unwrap())).unwrap();
        let c = centroid(&lin).unwrap()[0];
        let r = 40.0f64;
        let want = (1.0 - (r + 1.0) * (-r).exp()) / (1.0 - (-r).exp());
        assert!((c - want).abs() < 1e-12 && (c - 1.0).abs() < 1e-6);
    }

    #[test]
    fn products_of_abs() {
        let rl = product(&abs(1.0), Transform::L).unwrap();
        assert!((rl.product.unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(rl.bounds[0].passed, Some(true));
        let ra = product(&abs(1.0), Transform::A).unwrap();
        assert!((ra.product.unwrap() - 4.0).abs() < 1e-12);
        assert!((factorial_ball_sq(1) - 4.0).abs() < 1e-15);
        let rj = product(&abs(1.0), Transform::J).unwrap();
        assert!((rj.product.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ill_positioned_inputs() {
        let ind = Function::indicator(Polyhedron::cuboid(&[0.0], &[1.0]).unwrap()).unwrap();
        assert!(matches!(product(&ind, Transform::L), Err(Error::IllPositioned(_))));
        let shifted = abs(1.0).add_constant(1.0).unwrap();
        assert!(matches!(product(&shifted, Transform::A), Err(Error::IllPositioned(_))));
        assert!(product(&shifted, Transform::L).is_ok());
    }

    #[test]
    fn fradelizi_examples() {
        assert!(fradelizi_check(&abs(1.0)).unwrap());
        let hinge = Function::new(1, vec![AffinePiece::new(vec![1.0], 0.0), AffinePiece::new(vec![-2.0], 0.0)], None).unwrap();
        assert!(matches!(fradelizi_check(&hinge), Err(Error::NotCentered { .. })));
    }
}
