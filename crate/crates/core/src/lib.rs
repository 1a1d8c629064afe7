//! hp-adaptive hybridized discontinuous Galerkin (HDG) solver for 2D steady
//! compressible flow, with a non-hybridized DG baseline sharing the same
//! physics, meshes and solvers.
//!
//! The crate is organized along the solver pipeline:
//!
//! * [`mesh`] — unstructured triangular meshes, conforming red-green
//!   refinement, mesh file I/O.
//! * [`space`] — orthonormal modal bases on the reference triangle, quadrature
//!   rules, per-element degree maps and projections.
//! * [`physics`] — scalar convection-diffusion, Euler and Navier-Stokes flux
//!   functions, boundary states and output functionals.
//! * [`hdg`] — the hybridized discretization: local solvers, trace coupling,
//!   static condensation to the edge-based system.
//! * [`dg`] — baseline discontinuous Galerkin discretization
//!   (Lax-Friedrichs / BR2).
//! * [`solver`] — pseudo-transient Newton continuation, block-sparse GMRES
//!   with block-ILU preconditioning.
//! * [`adjoint`] — discrete adjoint in an enriched space and the
//!   dual-weighted-residual error estimate.
//! * [`adapt`] — Dörfler marking, smoothness sensing and the h/p decision.
//! * [`driver`] — run orchestration, configuration and output files.

pub mod adapt;
pub mod adjoint;
pub mod dg;
pub mod driver;
pub mod error;
pub mod geom;
pub mod hdg;
pub mod linalg;
pub mod mesh;
pub mod mms;
pub mod num;
pub mod physics;
pub mod solver;
pub mod space;
pub mod verification;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
