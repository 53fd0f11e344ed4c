//! Discontinuous polynomial spaces on elements and faces: quadrature,
//! orthonormal bases, L2 projections and error norms.

mod basis;
mod field;
mod quadrature;

pub use basis::{edge_basis_values, element_dofs, face_dofs, ElementGeometry, ReferenceBasis, MAX_DEGREE};
pub use field::{
    element_l2_project, element_l2_project_with, face_l2_project, face_l2_project_with, l2_error,
    l2_error_vector, l2_norm, ElementField, ElementVectorField, FaceField, ERROR_QUADRATURE_DEGREE,
};
pub(crate) use field::check_degree;
pub use quadrature::{gauss_legendre, QuadratureRule};
