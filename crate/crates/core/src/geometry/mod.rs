//! Convex polyhedra in dimension at most 5: representation conversion,
//! polarity, volume, moments, distances and the John ellipsoid.

mod dd;
mod distance;
mod john;
mod polyhedron;
mod volume;

pub use distance::{directed_distance, hausdorff, point_distance, project_point};
pub use john::{john_ellipsoid, unit_ball_volume, Ellipsoid};
pub use polyhedron::{Halfspace, Polyhedron, MAX_DIM};
pub use volume::{moment, volume};
