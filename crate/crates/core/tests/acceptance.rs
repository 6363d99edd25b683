//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line to stderr
//! (uncaptured) and the test fails if any criterion fails.

mod common;

use common::*;
use cvxlab::function::{approximate, classify, Reference};
use cvxlab::geometry::hausdorff;
use cvxlab::measure::{exp_integral, product_value};
use cvxlab::position::{normalize_centered, normalize_even, normalize_general};
use cvxlab::search::{brute_force_oracle, run_search, truncated_gauge_shape, Direction, FamilySpec, Objective, SearchConfig};
use cvxlab::tau::{diagnose_sequence, TauConfig};
use cvxlab::tol::eps_geom;
use cvxlab::*;
use rand::Rng;
use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

struct Outcome {
    passed: bool,
    detail: String,
}

fn report(id: u32, name: &str, t: Duration, o: &Outcome) {
    let line = format!(
        "criterion {id} [{name}]: {} ({:.1}s) {}\n",
        if o.passed { "PASS" } else { "FAIL" },
        t.as_secs_f64(),
        o.detail
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn run(id: u32, name: &str, f: fn() -> Outcome) -> bool {
    let t0 = Instant::now();
    let o = f();
    report(id, name, t0.elapsed(), &o);
    o.passed
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn involutions() -> Outcome {
    let t0 = Instant::now();
    let tol = 1e-9;
    let mut r = rng(1);
    let mut fails = [0usize; 5];
    for n in [1usize, 2] {
        for _ in 0..1000 {
            let f = random_function(&mut r, n);
            if !legendre(&f).and_then(|g| legendre(&g)).is_ok_and(|g| g.approx_eq(&f, tol)) {
                fails[0] += 1;
            }
            let g = random_cvx0(&mut r, n);
            if !polarity(&g).and_then(|h| polarity(&h)).is_ok_and(|h| h.approx_eq(&g, tol)) {
                fails[1] += 1;
            }
            let Ok(j) = gauge(&g) else {
                fails[2] += 1;
                continue;
            };
            if !gauge(&j).is_ok_and(|h| h.approx_eq(&g, tol)) {
                fails[2] += 1;
            }
            if !polarity(&g).and_then(|h| legendre(&h)).is_ok_and(|h| h.approx_eq(&j, tol)) {
                fails[3] += 1;
            }
            if !legendre(&g).and_then(|h| polarity(&h)).is_ok_and(|h| h.approx_eq(&j, tol)) {
                fails[4] += 1;
            }
        }
    }
    let t = t0.elapsed().as_secs_f64();
    Outcome {
        passed: fails.iter().all(|&c| c == 0) && t <= 60.0,
        detail: format!("failures LL={} AA={} JJ={} LA={} AL={} of 2000 each, {t:.1}s <= 60s", fails[0], fails[1], fails[2], fails[3], fails[4]),
    }
}

fn level_set_lemma() -> Outcome {
    let mut r = rng(2);
    let mut worst_h: f64 = 0.0;
    let mut worst_m = f64::INFINITY;
    let mut errors = 0;
    for i in 0..200 {
        let f = random_cvx0(&mut r, 1 + i % 2);
        let (Ok(a), Ok(l)) = (polarity(&f), legendre(&f)) else {
            errors += 1;
            continue;
        };
        for s in [0.5, 1.0, 2.0] {
            let sets = (|| -> Result<_> {
                let ga = a.level_set(1.0 / s)?;
                let gl = l.level_set(s)?.scaled(1.0 / s);
                let polar = f.level_set(s)?.polar()?;
                Ok((ga, gl, polar))
            })();
            let Ok((ga, gl, polar)) = sets else {
                errors += 1;
                continue;
            };
            worst_h = worst_h.max(hausdorff(&ga, &gl));
            worst_m = worst_m.min(gl.containment_margin(&polar));
            worst_m = worst_m.min(polar.scaled(2.0).containment_margin(&gl));
        }
    }
    Outcome {
        passed: errors == 0 && worst_h <= 1e-9 && worst_m >= -1e-9,
        detail: format!("max Hausdorff {worst_h:.2e} <= 1e-9, min containment margin {worst_m:.2e} >= -1e-9, {errors} errors"),
    }
}

fn pl_upper_edge() -> Outcome {
    let t0 = Instant::now();
    let ms = [9usize, 25, 49, 81, 121, 169, 225, 289, 361, 441];
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [1usize, 2] {
        let bound = (2.0 * PI).powi(n as i32);
        let need = if n == 1 { 0.98 } else { 0.95 };
        let mut prev = 0.0;
        let mut monotone = true;
        let mut over: f64 = 0.0;
        for &m in &ms {
            let p = approximate(n, &Reference::Quadratic { q: 1.0 }, m, 6.0)
                .and_then(|f| product_value(&f, Transform::L))
                .ok()
                .flatten()
                .unwrap_or(f64::NAN);
            monotone &= p > prev;
            over = over.max((p - bound) / bound);
            prev = p;
        }
        let ratio = prev / bound;
        ok &= monotone && ratio >= need && over <= 1e-6;
        detail.push(format!("n={n}: increasing={monotone}, P_L/(2pi)^n={ratio:.5} >= {need}, excess {over:.1e}"));
    }
    let t = t0.elapsed().as_secs_f64();
    Outcome {
        passed: ok && t <= 300.0,
        detail: format!("{} ({t:.1}s <= 300s)", detail.join("; ")),
    }
}

fn pa_reference() -> Outcome {
    let v = product_value(&abs1(), Transform::A).ok().flatten().unwrap_or(f64::NAN);
    let lead = cvxlab::measure::factorial_ball_sq(1);
    Outcome {
        passed: (v - 4.0).abs() <= 1e-8 && (lead - 4.0).abs() <= 1e-12,
        detail: format!("P_A(|x|) = {v:.10}, (1! w_1)^2 = {lead}"),
    }
}

fn invariance() -> Outcome {
    let mut r = rng(5);
    let mut worst_a: f64 = 0.0;
    let mut worst_l: f64 = 0.0;
    let mut errors = 0;
    for i in 0..500 {
        let n = 1 + i % 2;
        let f = random_cvx0_integrable(&mut r, n);
        let t = random_matrix(&mut r, n, 0.25, 4.0);
        let c = rat(&mut r, 12, 4);
        let res = (|| -> Result<(f64, f64, f64, f64)> {
            let ft = f.compose_linear(&t)?;
            let a0 = product_value(&f, Transform::A)?.ok_or(Error::NotIntegrable)?;
            let a1 = product_value(&ft, Transform::A)?.ok_or(Error::NotIntegrable)?;
            let l0 = product_value(&f, Transform::L)?.ok_or(Error::NotIntegrable)?;
            let l1 = product_value(&ft.add_constant(c)?, Transform::L)?.ok_or(Error::NotIntegrable)?;
            Ok((a0, a1, l0, l1))
        })();
        match res {
            Ok((a0, a1, l0, l1)) => {
                worst_a = worst_a.max(rel(a1, a0));
                worst_l = worst_l.max(rel(l1, l0));
            }
            Err(_) => errors += 1,
        }
    }
    Outcome {
        passed: errors == 0 && worst_a <= 1e-6 && worst_l <= 1e-6,
        detail: format!("max rel change P_A {worst_a:.2e}, P_L {worst_l:.2e} (<= 1e-6), {errors} errors"),
    }
}

/// Even function whose pieces and domain constraints are all parallel to one
/// direction, so every level set contains a line.
fn even_infinite_mass(r: &mut Rng8, n: usize) -> Function {
    if n == 1 {
        return Function::new(1, vec![], None).unwrap();
    }
    loop {
        let a: Vec<f64> = (0..n).map(|_| rat(r, 8, 4)).collect();
        if a.iter().all(|v| *v == 0.0) {
            continue;
        }
        let mut pieces = vec![AffinePiece::new(vec![0.0; n], 0.0)];
        for _ in 0..r.gen_range(0..=2) {
            let s = r.gen_range(1..=8) as f64 / 4.0;
            let c = -(r.gen_range(0..=4) as f64) / 4.0;
            pieces.push(AffinePiece::new(a.iter().map(|v| v * s).collect(), c));
            pieces.push(AffinePiece::new(a.iter().map(|v| -v * s).collect(), c));
        }
        let domain = if r.gen_bool(0.5) {
            let b = r.gen_range(2..=8) as f64 / 4.0;
            let hs = vec![
                Halfspace::new(a.clone(), b).unwrap(),
                Halfspace::new(a.iter().map(|v| -v).collect(), b).unwrap(),
            ];
            Some(Polyhedron::from_hrep(n, hs).unwrap())
        } else {
            None
        };
        if let Ok(f) = Function::new(n, pieces, domain) {
            return f;
        }
    }
}

fn finiteness() -> Outcome {
    let mut r = rng(6);
    let mut bad_zero = 0;
    for i in 0..50 {
        let f = even_infinite_mass(&mut r, [1, 2, 3][i % 3]);
        let ok = f.is_even() && exp_integral(&f).kind == MassKind::Infinite && polarity(&f).is_ok_and(|a| exp_integral(&a).kind == MassKind::Zero);
        bad_zero += usize::from(!ok);
    }
    let mut bad_finite = 0;
    let mut smallest = f64::INFINITY;
    for i in 0..200 {
        let f = random_even_integrable(&mut r, 1 + i % 2);
        let v = polarity(&f).ok().and_then(|a| exp_integral(&a).finite_value());
        match v {
            Some(v) if v > 0.0 && exp_integral(&f).finite_value().is_some_and(|m| m > 0.0) => smallest = smallest.min(v),
            _ => bad_finite += 1,
        }
    }
    Outcome {
        passed: bad_zero == 0 && bad_finite == 0,
        detail: format!("infinite-mass fixtures with nonzero dual mass: {bad_zero}/50; finite fixtures without finite positive dual mass: {bad_finite}/200 (smallest dual mass {smallest:.3e})"),
    }
}

fn tau_continuity() -> Outcome {
    let t0 = Instant::now();
    let q = Reference::Quadratic { q: 1.0 };
    let seq: Vec<Function> = (3..=8).map(|k| approximate(1, &q, 1 << k, 2.0).unwrap()).collect();
    let limit = approximate(1, &q, 2048, 2.0).unwrap();
    let cfg = TauConfig {
        transforms: vec![Transform::A],
        ..TauConfig::default()
    };
    let rep = match diagnose_sequence(&seq, &limit, &cfg) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                passed: false,
                detail: format!("error {e}"),
            }
        }
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["epi", "level@1", "mass", "centroid", "transform:A"] {
        match rep.verdict(name) {
            Some(v) => {
                let last = *v.values.last().unwrap();
                let pass = v.monotone && last < 1e-3;
                ok &= pass;
                parts.push(format!("{name} {last:.2e}{}", if v.monotone { "" } else { " non-monotone" }));
            }
            None => {
                ok = false;
                parts.push(format!("{name} missing"));
            }
        }
    }
    let t = t0.elapsed().as_secs_f64();
    Outcome {
        passed: ok && t <= 120.0,
        detail: format!("{} ({t:.1}s <= 120s)", parts.join(", ")),
    }
}

fn search_vs_oracle() -> Outcome {
    let families = [(FamilySpec::even_grid(1, 2.0, 4.0), 401), (FamilySpec::even_grid(2, 2.0, 4.0), 201), (FamilySpec::even_grid(3, 3.0, 4.0), 101)];
    let cfg = SearchConfig::default();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for t in [Transform::L, Transform::A, Transform::J] {
        let obj = Objective::new(t, Direction::Max);
        for (spec, res) in &families {
            let s = run_search(spec, obj, &cfg);
            let o = brute_force_oracle(spec, obj, *res);
            match (s, o) {
                (Ok(s), Ok((ov, _))) => {
                    let gap = (s.value - ov).abs();
                    worst = worst.max(gap);
                    ok &= gap <= 1e-3;
                }
                _ => ok = false,
            }
        }
    }
    let spec = FamilySpec::even_grid(24, 6.0, 12.0);
    let shape = run_search(&spec, Objective::new(Transform::J, Direction::Max), &cfg).and_then(|s| truncated_gauge_shape(&spec, &s.best_params, 1e-6).map(|sh| (s.value, sh)));
    let shape_detail = match &shape {
        Ok((v, sh)) => format!(
            "P_J maximizer (24 knots) value {v:.5}: plateau to {:.3}, slope {:.4} to {:.3}, wall ratio {:.1}, truncated gauge {}",
            sh.plateau_end, sh.slope, sh.rise_end, sh.wall_ratio, sh.truncated_gauge
        ),
        Err(e) => format!("P_J shape search error {e}"),
    };
    ok &= shape.as_ref().is_ok_and(|(_, sh)| sh.truncated_gauge);
    Outcome {
        passed: ok,
        detail: format!("max |search - oracle| {worst:.2e} <= 1e-3 over 9 families; {shape_detail}"),
    }
}

fn position_classes() -> Outcome {
    let mut r = rng(9);
    let tol = eps_geom();
    let mut fails = [0usize; 3];
    let mut worst_margin = f64::INFINITY;
    let mut worst_rel: f64 = 0.0;
    let mut check = |fails: &mut usize, f: &Function, which: u8| {
        let (res, t) = match which {
            0 => (normalize_even(f), Transform::A),
            1 => (normalize_centered(f), Transform::A),
            _ => (normalize_general(f), Transform::L),
        };
        let Ok((nm, g)) = res else {
            *fails += 1;
            return;
        };
        let tags = classify(&g);
        let member = match which {
            0 => tags.in_se,
            1 => tags.in_s1c,
            _ => tags.in_s2,
        };
        let margin = nm.certificate.min_margin();
        worst_margin = worst_margin.min(margin);
        let p0 = product_value(f, t).ok().flatten();
        let p1 = product_value(&g, t).ok().flatten();
        let preserved = match (p0, p1) {
            (Some(a), Some(b)) => {
                worst_rel = worst_rel.max(rel(b, a));
                rel(b, a) <= 1e-6
            }
            _ => false,
        };
        if !(member && margin >= tol && preserved) {
            *fails += 1;
        }
    };
    for i in 0..200 {
        let f = even_not_tight(&mut r, 2 + i % 2);
        check(&mut fails[0], &f, 0);
    }
    for i in 0..200 {
        let f = if i % 2 == 0 { centered_1d(&mut r) } else { rotation_symmetric(&mut r) };
        check(&mut fails[1], &f, 1);
        check(&mut fails[2], &f, 2);
    }
    Outcome {
        passed: fails.iter().all(|&c| c == 0),
        detail: format!(
            "failures S_e {}/200, S_1c {}/200, S_2 {}/200; min certificate margin {worst_margin:.2e} >= {tol:e}; max rel product change {worst_rel:.2e} <= 1e-6",
            fails[0], fails[1], fails[2]
        ),
    }
}

#[test]
fn acceptance() {
    let results = [
        run(1, "duality involutions", involutions),
        run(2, "level-set comparison", level_set_lemma),
        run(3, "P_L upper edge", pl_upper_edge),
        run(4, "P_A reference value", pa_reference),
        run(5, "invariance", invariance),
        run(6, "finiteness trichotomy", finiteness),
        run(7, "tau continuity", tau_continuity),
        run(8, "search vs oracle", search_vs_oracle),
        run(9, "position classes", position_classes),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
