//! JSON interchange for polyhedra and functions.
//!
//! Polyhedron: `{"dim", "halfspaces": [{"normal", "offset"}], "vertices", "rays"}`,
//! either representation optional on input, both written on output (plus
//! `"lines"` when the lineality space is nontrivial).
//! Function: `{"n", "pieces": [{"slope", "intercept"}], "domain": <polyhedron> | "all", "meta": {"name"}}`.

use crate::error::{Error, Result};
use crate::function::{AffinePiece, Function};
use crate::geometry::{Halfspace, Polyhedron};
use crate::linalg::scale;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyhedronJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<Halfspace>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rays: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lines: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainJson {
    Keyword(String),
    Set(PolyhedronJson),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetaJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionJson {
    pub n: usize,
    pub pieces: Vec<AffinePiece>,
    #[serde(default = "all")]
    pub domain: DomainJson,
    #[serde(default)]
    pub meta: MetaJson,
}

fn all() -> DomainJson {
    DomainJson::Keyword("all".into())
}

impl From<&Polyhedron> for PolyhedronJson {
    fn from(p: &Polyhedron) -> Self {
        Self {
            dim: p.dim(),
            halfspaces: Some(p.halfspaces().to_vec()),
            vertices: Some(p.vertices().to_vec()),
            rays: Some(p.rays().to_vec()),
            lines: (!p.lines().is_empty()).then(|| p.lines().to_vec()),
        }
    }
}

impl TryFrom<PolyhedronJson> for Polyhedron {
    type Error = Error;

    fn try_from(j: PolyhedronJson) -> Result<Self> {
        if let Some(hs) = j.halfspaces {
            // renormalize: hand-written files need not carry unit normals
            let hs = hs
                .into_iter()
                .map(|h| Halfspace::new(h.normal, h.offset))
                .collect::<Result<Vec<_>>>()?;
            for h in &hs {
                if h.normal.len() != j.dim {
                    return Err(Error::DimensionMismatch {
                        expected: j.dim,
                        found: h.normal.len(),
                    });
                }
            }
            return Polyhedron::from_hrep(j.dim, hs);
        }
        let Some(points) = j.vertices else {
            return Err(Error::InvalidInput("polyhedron needs halfspaces or vertices".into()));
        };
        let mut rays = j.rays.unwrap_or_default();
        for l in j.lines.unwrap_or_default() {
            rays.push(scale(&l, -1.0));
            rays.push(l);
        }
        Polyhedron::from_vrep(j.dim, points, rays)
    }
}

impl From<&Function> for FunctionJson {
    fn from(f: &Function) -> Self {
        Self {
            n: f.n(),
            pieces: f.pieces().to_vec(),
            domain: f.domain().map_or_else(all, |d| DomainJson::Set(d.into())),
            meta: MetaJson {
                name: f.name().map(str::to_owned),
            },
        }
    }
}

impl TryFrom<FunctionJson> for Function {
    type Error = Error;

    fn try_from(j: FunctionJson) -> Result<Self> {
        let domain = match j.domain {
            DomainJson::Keyword(k) if k == "all" => None,
            DomainJson::Keyword(k) => return Err(Error::InvalidInput(format!("unknown domain keyword {k:?}"))),
            DomainJson::Set(p) => Some(Polyhedron::try_from(p)?),
        };
        let f = Function::new(j.n, j.pieces, domain)?;
        Ok(match j.meta.name {
            Some(name) => f.with_name(name),
            None => f,
        })
    }
}

impl From<Polyhedron> for PolyhedronJson {
    fn from(p: Polyhedron) -> Self {
        (&p).into()
    }
}

impl From<Function> for FunctionJson {
    fn from(f: Function) -> Self {
        (&f).into()
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::InvalidInput(format!("malformed JSON: {e}"))
}

pub fn function_from_json(s: &str) -> Result<Function> {
    let j: FunctionJson = serde_json::from_str(s).map_err(parse_error)?;
    j.try_into()
}

pub fn function_to_json(f: &Function) -> String {
    serde_json::to_string_pretty(&FunctionJson::from(f)).expect("function JSON is serializable")
}

pub fn polyhedron_from_json(s: &str) -> Result<Polyhedron> {
    let j: PolyhedronJson = serde_json::from_str(s).map_err(parse_error)?;
    j.try_into()
}

pub fn polyhedron_to_json(p: &Polyhedron) -> String {
    serde_json::to_string_pretty(&PolyhedronJson::from(p)).expect("polyhedron JSON is serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_from_minimal_json() {
        let f = function_from_json(r#"{"n":1,"pieces":[{"slope":[1],"intercept":0},{"slope":[-1],"intercept":0}],"domain":"all","meta":{"name":"abs"}}"#).unwrap();
        assert_eq!(f.name(), Some("abs"));
        assert!(f.domain().is_none());
        assert_eq!(f.eval(&[-2.0]), 2.0);
        let back = function_from_json(&function_to_json(&f)).unwrap();
        assert!(back.approx_eq(&f, 0.0));
        assert_eq!(function_to_json(&back), function_to_json(&f));
    }

    #[test]
    fn domain_from_vertices_only() {
        let f = function_from_json(r#"{"n":1,"pieces":[],"domain":{"dim":1,"vertices":[[-1],[2]]}}"#).unwrap();
        assert!(f.in_domain(&[1.5]) && !f.in_domain(&[2.5]));
        let p = polyhedron_from_json(r#"{"dim":2,"vertices":[[0,0]],"rays":[[1,0]],"lines":[[0,1]]}"#).unwrap();
        assert_eq!(p.halfspaces().len(), 1);
        let q = polyhedron_from_json(&polyhedron_to_json(&p)).unwrap();
        assert!(q.approx_eq(&p, 1e-12));
    }

    #[test]
    fn halfspaces_are_renormalized() {
        let p = polyhedron_from_json(r#"{"dim":1,"halfspaces":[{"normal":[2],"offset":2},{"normal":[-1],"offset":1}]}"#).unwrap();
        assert_eq!(p.vertices().len(), 2);
        assert!(p.contains(&[1.0], 0.0) && !p.contains(&[1.1], 0.0));
    }

    #[test]
    fn malformed_inputs_are_errors() {
        assert!(matches!(function_from_json("{"), Err(Error::InvalidInput(_))));
        assert!(matches!(function_from_json(r#"{"n":1,"pieces":[],"domain":"none"}"#), Err(Error::InvalidInput(_))));
        assert!(matches!(function_from_json(r#"{"n":2,"pieces":[{"slope":[1],"intercept":0}]}"#), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(polyhedron_from_json(r#"{"dim":2}"#), Err(Error::InvalidInput(_))));
        assert!(function_from_json(r#"{"n":1,"pieces":[{"slope":[1],"intercept":0}],"extra":1}"#).is_err());
    }
}
