mod common;

use common::*;
use cvxlab::function::{approximate, Reference};
use cvxlab::tau::{diagnose_sequence, epi_distance, TauConfig};
use cvxlab::tol::eps_geom;
use cvxlab::{Function, Transform};
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn quad(m: usize, r: f64) -> Function {
    approximate(1, &Reference::Quadratic { q: 1.0 }, m, r).unwrap()
}

const RADII: [f64; 3] = [1.0, 2.0, 4.0];

#[test]
fn approximants_approach_a_fine_one() {
    let fine = quad(64, 4.0);
    let d: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&m| epi_distance(&quad(m, 4.0), &fine, &[4.0]).unwrap().sup())
        .collect();
    assert!(d[0] > 0.0);
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
}

#[test]
fn level_sets_near_the_infimum_are_skipped() {
    let seq: Vec<Function> = (2..6).map(|k| quad(1 << k, 2.0)).collect();
    let config = TauConfig {
        levels: vec![5e-4, 1.0],
        transforms: vec![],
        ..TauConfig::default()
    };
    let report = diagnose_sequence(&seq, &quad(256, 2.0), &config).unwrap();
    for t in &report.terms {
        assert_eq!(t.level_gaps.iter().map(|g| g.level).collect::<Vec<_>>(), vec![1.0]);
    }
}

#[test]
fn polar_gap_ratio_is_recorded() {
    let seq: Vec<Function> = (2..7).map(|k| quad(1 << k, 2.0)).collect();
    let config = TauConfig {
        radii: vec![1.0, 2.0],
        transforms: vec![Transform::A],
        ..TauConfig::default()
    };
    let report = diagnose_sequence(&seq, &quad(512, 2.0), &config).unwrap();
    let kappa = report.kappa.expect("kappa");
    assert!(kappa.is_finite() && kappa > 0.0);
    // consistent with the stored per-term gaps
    for t in &report.terms {
        let (Some(a), e) = (t.transform_gaps[0].gap, t.epi.sup()) else { continue };
        if e > 0.0 {
            assert!(a / e <= kappa * (1.0 + 1e-12));
        }
    }
    let json = serde_json::to_string(&report).unwrap();
    let back: cvxlab::tau::ConvergenceReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back.kappa, report.kappa);
}

#[test]
fn shifted_abs_sequence_converges() {
    let seq: Vec<Function> = (1..=12).map(|k| abs1().add_constant(0.5f64.powi(k)).unwrap()).collect();
    let config = TauConfig {
        transforms: vec![Transform::L],
        ..TauConfig::default()
    };
    let report = diagnose_sequence(&seq, &abs1(), &config).unwrap();
    let epi = report.verdict("epi").unwrap();
    assert!(epi.passed && epi.monotone);
    assert!((epi.values.last().unwrap() - 0.5f64.powi(12)).abs() < 1e-12);
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn epi_distance_is_a_pseudometric(seed in any::<u64>(), n in 1usize..=2) {
        let mut r = rng(seed);
        let f = random_function(&mut r, n);
        let g = random_function(&mut r, n);
        let h = random_function(&mut r, n);
        let tol = 2.0 * eps_geom();
        let fg = epi_distance(&f, &g, &RADII).unwrap();
        let gf = epi_distance(&g, &f, &RADII).unwrap();
        let gh = epi_distance(&g, &h, &RADII).unwrap();
        let fh = epi_distance(&f, &h, &RADII).unwrap();
        prop_assert!(epi_distance(&f, &f, &RADII).unwrap().sup() == 0.0);
        for i in 0..RADII.len() {
            let (a, b, c, d) = (fg.distances[i], gf.distances[i], gh.distances[i], fh.distances[i]);
            if a.is_finite() && b.is_finite() {
                prop_assert!((a - b).abs() <= tol);
            } else {
                prop_assert_eq!(a, b);
            }
            if a.is_finite() && c.is_finite() && d.is_finite() {
                prop_assert!(d <= a + c + tol, "R = {}: {} > {} + {}", RADII[i], d, a, c);
            }
            prop_assert!(a >= 0.0);
        }
    }
}
