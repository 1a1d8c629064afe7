//! Block-sparse linear algebra: matrix storage, ILU preconditioning, GMRES.

pub mod block;
pub mod gmres;
pub mod ilu;

pub use block::BlockMatrix;
pub use gmres::{gmres, GmresOutcome};
pub use ilu::BlockIlu;
