//! Exact polyhedral convex analysis: Legendre, polarity and gauge transforms
//! of piecewise-linear convex functions, the associated Santaló-type
//! products, John-position normalization, epi-convergence diagnostics and a
//! small extremizer search.

pub mod error;
pub mod function;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod position;
pub mod search;
pub mod tau;
pub mod tol;
pub mod transforms;

pub use error::{Error, Result};

pub use geometry::{Ellipsoid, Halfspace, Polyhedron};
pub use function::{AffinePiece, ClassTags, CombineOp, Function, MassKind, Reference};
pub use measure::{MassResult, ProductReport};
pub use transforms::{gauge, legendre, polarity, Transform};
