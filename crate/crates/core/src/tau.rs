//! Epi-convergence diagnostics through truncated Hausdorff distances of
//! epigraphs, level sets, masses and centroids along a sequence of functions.

use crate::error::{Error, Result};
use crate::function::{MassKind, Function};
use crate::geometry::{hausdorff, Halfspace, Polyhedron};
use crate::linalg::dist;
use crate::measure::exp_integral;
use crate::transforms::Transform;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Truncated epigraph distances, one per window radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpiDistanceProfile {
    pub window_radii: Vec<f64>,
    pub distances: Vec<f64>,
}

impl EpiDistanceProfile {
    /// Largest distance over all windows.
    pub fn sup(&self) -> f64 {
        self.distances.iter().copied().fold(0.0, f64::max)
    }
}

fn window(p: &Polyhedron, r: f64) -> Option<Polyhedron> {
    let d = p.dim();
    let mut hs = Vec::with_capacity(2 * d);
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut a = vec![0.0; d];
            a[i] = s;
            hs.push(Halfspace { normal: a, offset: r });
        }
    }
    p.intersect_halfspaces(&hs).ok()
}

fn window_distance(a: &Polyhedron, b: &Polyhedron, r: f64) -> f64 {
    set_gap(window(a, r).as_ref(), window(b, r).as_ref())
}

/// Hausdorff distance between `epi φ ∩ W_R` and `epi ψ ∩ W_R` for the boxes
/// `W_R = [-R, R]^{n+1}`.
pub fn epi_distance(f: &Function, g: &Function, radii: &[f64]) -> Result<EpiDistanceProfile> {
    if f.n() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            found: g.n(),
        });
    }
    check_radii(radii)?;
    Ok(EpiDistanceProfile {
        window_radii: radii.to_vec(),
        distances: radii.iter().map(|&r| window_distance(f.epigraph(), g.epigraph(), r)).collect(),
    })
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("window radii must be positive and increasing".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TauConfig {
    pub radii: Vec<f64>,
    pub threshold: f64,
    pub burn_in: usize,
    /// Levels for the level-set gaps.
    pub levels: Vec<f64>,
    /// Levels closer than this to `inf` of the limit are skipped.
    pub level_margin: f64,
    /// Lattice `step Z^n ∩ [-extent, extent]^n` for the pointwise gap.
    pub lattice_step: f64,
    pub lattice_extent: f64,
    pub pointwise: bool,
    pub mass: bool,
    pub centroid: bool,
    pub transforms: Vec<Transform>,
}

impl Default for TauConfig {
    fn default() -> Self {
        Self {
            radii: vec![1.0, 2.0, 4.0, 8.0],
            threshold: 1e-3,
            burn_in: 2,
            levels: vec![1.0],
            level_margin: 1e-3,
            lattice_step: 0.25,
            lattice_extent: 4.0,
            pointwise: true,
            mass: true,
            centroid: true,
            transforms: vec![Transform::L, Transform::A, Transform::J],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelGap {
    pub level: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformGap {
    pub transform: Transform,
    /// `None` when the transform is undefined for both the term and the limit.
    pub profile: Option<EpiDistanceProfile>,
    pub gap: Option<f64>,
}

/// Gaps of one sequence term to the limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub index: usize,
    pub name: Option<String>,
    pub epi: EpiDistanceProfile,
    pub level_gaps: Vec<LevelGap>,
    pub pointwise_gap: Option<f64>,
    pub mass_gap: Option<f64>,
    pub centroid_gap: Option<f64>,
    pub transform_gaps: Vec<TransformGap>,
}

/// Outcome of one diagnostic across the sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub diagnostic: String,
    pub values: Vec<f64>,
    /// Non-increasing from the burn-in term on.
    pub monotone: bool,
    /// Final value below the threshold.
    pub below_threshold: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub config: TauConfig,
    pub terms: Vec<TermRecord>,
    pub verdicts: Vec<Verdict>,
    /// Largest ratio of the polarity-transformed epi gap to the epi gap.
    pub kappa: Option<f64>,
    pub passed: bool,
}

impl ConvergenceReport {
    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.diagnostic == name)
    }
}

struct LimitData {
    windows: Vec<Option<Polyhedron>>,
    mass: Option<(MassKind, Option<f64>, Option<Vec<f64>>)>,
    lattice: Vec<(Vec<f64>, f64)>,
    levels: Vec<(f64, Option<Polyhedron>)>,
    /// Transformed limit and its windows.
    transforms: Vec<(Transform, Option<Vec<Option<Polyhedron>>>)>,
}

fn lattice(n: usize, step: f64, extent: f64) -> Vec<Vec<f64>> {
    let k = (extent / step).floor() as i64;
    let axis: Vec<f64> = (-k..=k).map(|i| i as f64 * step).collect();
    let mut pts = vec![Vec::new()];
    for _ in 0..n {
        pts = pts
            .into_iter()
            .flat_map(|p: Vec<f64>| {
                axis.iter().map(move |&a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    pts
}

fn mass_data(f: &Function) -> (MassKind, Option<f64>, Option<Vec<f64>>) {
    let r = exp_integral(f);
    let c = match (r.value, &r.moment) {
        (Some(v), Some(m)) if r.kind == MassKind::Finite && v > 0.0 => Some(m.iter().map(|x| x / v).collect()),
        _ => None,
    };
    (r.kind, r.value, c)
}

fn prepare(limit: &Function, cfg: &TauConfig) -> LimitData {
    let n = limit.n();
    let inf = limit.inf();
    let dom = limit.domain_or_whole();
    let lattice = if cfg.pointwise {
        lattice(n, cfg.lattice_step, cfg.lattice_extent)
            .into_iter()
            .filter(|x| dom.contains_strictly(x, 1e-12))
            .map(|x| {
                let v = limit.eval(&x);
                (x, v)
            })
            .collect()
    } else {
        Vec::new()
    };
    let levels = cfg
        .levels
        .iter()
        .filter(|&&t| t - inf > cfg.level_margin)
        .map(|&t| (t, limit.level_set(t).ok()))
        .collect();
    let windows = |g: &Function| -> Vec<Option<Polyhedron>> { cfg.radii.par_iter().map(|&r| window(g.epigraph(), r)).collect() };
    let ((windows_, mass), transforms) = rayon::join(
        || rayon::join(|| windows(limit), || (cfg.mass || cfg.centroid).then(|| mass_data(limit))),
        || {
            cfg.transforms
                .par_iter()
                .map(|&t| (t, t.apply(limit).ok().map(|g| windows(&g))))
                .collect()
        },
    );
    LimitData {
        windows: windows_,
        mass,
        lattice,
        levels,
        transforms,
    }
}

fn set_gap(a: Option<&Polyhedron>, b: Option<&Polyhedron>) -> f64 {
    match (a, b) {
        (None, None) => 0.0,
        (Some(x), Some(y)) => hausdorff(x, y),
        _ => f64::INFINITY,
    }
}

fn windowed_profile(f: &Function, limit_windows: &[Option<Polyhedron>], radii: &[f64]) -> EpiDistanceProfile {
    EpiDistanceProfile {
        window_radii: radii.to_vec(),
        distances: radii
            .iter()
            .zip(limit_windows)
            .map(|(&r, w)| set_gap(window(f.epigraph(), r).as_ref(), w.as_ref()))
            .collect(),
    }
}

fn term_record(index: usize, f: &Function, data: &LimitData, cfg: &TauConfig) -> TermRecord {
    let epi = windowed_profile(f, &data.windows, &cfg.radii);
    let level_gaps = data
        .levels
        .iter()
        .map(|(t, g)| LevelGap {
            level: *t,
            gap: set_gap(f.level_set(*t).ok().as_ref(), g.as_ref()),
        })
        .collect();
    let pointwise_gap = cfg.pointwise.then(|| {
        data.lattice
            .iter()
            .map(|(x, v)| {
                let w = f.eval(x);
                if w.is_finite() {
                    (w - v).abs()
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    });
    let mine = data.mass.as_ref().map(|_| mass_data(f));
    let (mass_gap, centroid_gap) = match (&data.mass, &mine) {
        (Some((k0, v0, c0)), Some((k1, v1, c1))) => {
            let mg = match (v0, v1) {
                (Some(a), Some(b)) if k0 == k1 => Some((a - b).abs()),
                _ if k0 == k1 => Some(0.0),
                _ => Some(f64::INFINITY),
            };
            let cg = match (c0, c1) {
                (Some(a), Some(b)) => Some(dist(a, b)),
                (Some(_), None) => Some(f64::INFINITY),
                _ => None,
            };
            (mg.filter(|_| cfg.mass), cg.filter(|_| cfg.centroid))
        }
        _ => (None, None),
    };
    let transform_gaps = data
        .transforms
        .iter()
        .map(|(t, lt)| {
            let ft = t.apply(f).ok();
            let profile = match (&ft, lt) {
                (None, None) => None,
                (Some(a), Some(w)) => Some(windowed_profile(a, w, &cfg.radii)),
                _ => Some(EpiDistanceProfile {
                    window_radii: cfg.radii.clone(),
                    distances: vec![f64::INFINITY; cfg.radii.len()],
                }),
            };
            TransformGap {
                transform: *t,
                gap: profile.as_ref().map(|p| p.sup()),
                profile,
            }
        })
        .collect();
    TermRecord {
        index,
        name: f.name().map(str::to_string),
        epi,
        level_gaps,
        pointwise_gap,
        mass_gap,
        centroid_gap,
        transform_gaps,
    }
}

fn verdict(name: String, values: Vec<f64>, cfg: &TauConfig) -> Verdict {
    let monotone = values
        .iter()
        .enumerate()
        .skip(cfg.burn_in + 1)
        .all(|(i, &v)| v <= values[i - 1] * (1.0 + 1e-9) + 1e-12);
    let below_threshold = values.last().is_some_and(|&v| v < cfg.threshold);
    Verdict {
        diagnostic: name,
        monotone,
        below_threshold,
        passed: monotone && below_threshold,
        values,
    }
}

/// Runs every enabled diagnostic of `sequence` against `limit`.
pub fn diagnose_sequence(sequence: &[Function], limit: &Function, cfg: &TauConfig) -> Result<ConvergenceReport> {
    if let Some(f) = sequence.iter().find(|f| f.n() != limit.n()) {
        return Err(Error::DimensionMismatch {
            expected: limit.n(),
            found: f.n(),
        });
    }
    check_radii(&cfg.radii)?;
    let data = prepare(limit, cfg);
    let terms: Vec<TermRecord> = sequence
        .par_iter()
        .enumerate()
        .map(|(i, f)| term_record(i, f, &data, cfg))
        .collect();

    let mut verdicts = vec![verdict("epi".into(), terms.iter().map(|t| t.epi.sup()).collect(), cfg)];
    for (j, (t, _)) in data.levels.iter().enumerate() {
        verdicts.push(verdict(format!("level@{t}"), terms.iter().map(|r| r.level_gaps[j].gap).collect(), cfg));
    }
    let collect = |get: &dyn Fn(&TermRecord) -> Option<f64>| -> Option<Vec<f64>> { terms.iter().map(get).collect() };
    if let Some(v) = collect(&|t| t.pointwise_gap).filter(|v| !v.is_empty() && !data.lattice.is_empty()) {
        verdicts.push(verdict("pointwise".into(), v, cfg));
    }
    if let Some(v) = collect(&|t| t.mass_gap) {
        verdicts.push(verdict("mass".into(), v, cfg));
    }
    if let Some(v) = collect(&|t| t.centroid_gap) {
        verdicts.push(verdict("centroid".into(), v, cfg));
    }
    for (j, (t, _)) in data.transforms.iter().enumerate() {
        if let Some(v) = collect(&|r| r.transform_gaps[j].gap) {
            verdicts.push(verdict(format!("transform:{t}"), v, cfg));
        }
    }

    let kappa = data.transforms.iter().position(|(t, _)| *t == Transform::A).and_then(|j| {
        terms
            .iter()
            .filter_map(|r| {
                let e = r.epi.sup();
                r.transform_gaps[j].gap.filter(|_| e > 0.0 && e.is_finite()).map(|a| a / e)
            })
            .reduce(f64::max)
    });
    let passed = !sequence.is_empty() && verdicts.iter().all(|v| v.passed);
    Ok(ConvergenceReport {
        config: cfg.clone(),
        terms,
        verdicts,
        kappa,
        passed,
    })
}
