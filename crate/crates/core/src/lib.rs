//! Hybridized discontinuous Galerkin (HDG) discretization of
//! `-div(A grad u) = f` on two-dimensional simplicial meshes.
//!
//! The crate provides mesh generation and I/O ([`mesh`]), discontinuous
//! polynomial spaces ([`fespace`]), the Crouzeix-Raviart lifting of skeleton
//! data ([`cr`]), the HDG scheme with static condensation ([`hdg`]),
//! minimization of discrete convex functionals over the HDG space
//! ([`variational`]) and the small linear algebra kernels they share
//! ([`linalg`]).

pub mod cr;
pub mod error;
pub mod fespace;
pub mod hdg;
pub mod linalg;
pub mod mesh;
pub mod variational;

pub use error::{Error, Result};
pub use fespace::{ElementField, ElementVectorField, FaceField};
pub use hdg::{HdgState, ProblemSpec, SeminormReport, WeightMode};
pub use mesh::{BoundaryLabel, Diagonal, Mesh, MeshStats, Point};
