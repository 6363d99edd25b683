//! Numerical tolerances shared by every module.

use std::sync::OnceLock;

/// Default incidence/equality tolerance for geometric predicates.
pub const EPS_GEOM_DEFAULT: f64 = 1e-9;

/// Accuracy target of the maximum-volume ellipsoid program.
pub const EPS_JOHN: f64 = 1e-6;

/// Tolerance for "centroid at the origin" preconditions.
pub const EPS_CENT: f64 = 1e-8;

/// Environment variable overriding [`eps_geom`].
pub const TOL_ENV: &str = "CVXLAB_TOL";

static EPS_GEOM: OnceLock<f64> = OnceLock::new();

/// Geometric tolerance, read once from `CVXLAB_TOL` if set to a positive float.
pub fn eps_geom() -> f64 {
    *EPS_GEOM.get_or_init(|| {
        std::env::var(TOL_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
            .unwrap_or(EPS_GEOM_DEFAULT)
    })
}

/// Zero threshold for sign tests inside vertex enumeration (unit rows, unit rays).
pub(crate) const EPS_DD: f64 = 1e-11;
