//! Polynomial spaces: bases, quadrature, degree maps, projections.

pub mod basis;
pub mod degree;
pub mod project;
pub mod quadrature;
pub mod tables;

pub use basis::n_modes;
pub use degree::DegreeMap;
pub use quadrature::{edge_rule, tri_rule, EdgeRule, TriRule};
