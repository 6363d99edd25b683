//! The Legendre transform `L`, the polarity transform `A` and the gauge
//! transform `J = L∘A`, all computed exactly from epigraph generators.

use crate::error::{Error, Result};
use crate::function::Function;
use crate::geometry::{Halfspace, Polyhedron};
use crate::linalg::{norm, scale};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Transform {
    L,
    A,
    J,
}

impl Transform {
    pub fn apply(self, f: &Function) -> Result<Function> {
        match self {
            Transform::L => legendre(f),
            Transform::A => polarity(f),
            Transform::J => gauge(f),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Transform::L => "L",
            Transform::A => "A",
            Transform::J => "J",
        };
        f.write_str(s)
    }
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "l" | "legendre" => Ok(Transform::L),
            "A" | "a" | "polarity" => Ok(Transform::A),
            "J" | "j" | "gauge" => Ok(Transform::J),
            _ => Err(Error::InvalidInput(format!("unknown transform `{s}`"))),
        }
    }
}

/// Pushes `<a, z> <= b` unless `a` vanishes; a vanishing `a` with `b < 0`
/// means the constraint set is empty.
fn push(hs: &mut Vec<Halfspace>, a: Vec<f64>, b: f64) -> Result<()> {
    if norm(&a) <= 1e-13 {
        if b < -1e-13 {
            return Err(Error::ImproperInput("transform is identically +inf".into()));
        }
        return Ok(());
    }
    hs.push(Halfspace::new(a, b)?);
    Ok(())
}

/// Legendre conjugate `φ*(y) = sup_x <x, y> - φ(x)`.
///
/// Every epigraph vertex `(v, h)` becomes the piece `<v, y> - h`, every ray
/// `(d, σ)` the domain constraint `<d, y> <= σ` and every line an equality.
pub fn legendre(f: &Function) -> Result<Function> {
    let n = f.n();
    let epi = f.epigraph();
    let mut hs = Vec::new();
    for v in epi.vertices() {
        let mut a = v[..n].to_vec();
        a.push(-1.0);
        push(&mut hs, a, v[n])?;
    }
    for r in epi.rays() {
        let mut a = r[..n].to_vec();
        a.push(0.0);
        push(&mut hs, a, r[n])?;
    }
    for l in epi.lines() {
        let mut a = l[..n].to_vec();
        a.push(0.0);
        push(&mut hs, a.clone(), l[n])?;
        push(&mut hs, scale(&a, -1.0), -l[n])?;
    }
    Function::from_epigraph_hrep(n, hs)
}

/// Polarity transform: `epi(Aφ)` is the reflection of the polar of `epi(φ)`
/// through `R^n × {0}`.
pub fn polarity(f: &Function) -> Result<Function> {
    if !f.is_geometric() {
        return Err(Error::NotGeometric);
    }
    let epi = f.epigraph();
    let n = f.n();
    let polar = epi.polar()?.reflect_last();
    debug_assert_eq!(polar.dim(), n + 1);
    Function::from_epigraph(polar)
}

/// Gauge transform `J = L∘A`.
pub fn gauge(f: &Function) -> Result<Function> {
    legendre(&polarity(f)?)
}

/// Negates the last coordinate of a polyhedron in `R^{n+1}`.
pub fn reflect(p: &Polyhedron) -> Polyhedron {
    p.reflect_last()
}
