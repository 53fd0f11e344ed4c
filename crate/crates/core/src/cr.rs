//! Crouzeix-Raviart lifting of skeleton data.
//!
//! A [`CrField`] is a piecewise linear function whose value on each face has
//! the prescribed mean; the means are its degrees of freedom. Inside an
//! element the linear function is recovered from the three face means, which
//! for a linear function coincide with the edge-midpoint values.

use crate::error::{Error, Result};
use crate::fespace::{ElementVectorField, FaceField};
use crate::linalg::{dense_solve, DenseMatrix};
use crate::mesh::{Mesh, Point};

const MIN_AREA: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct CrField {
    means: Vec<f64>,
}

/// Linear function `value + gradient . (x - centroid)` on one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalLinear {
    pub centroid: Point,
    pub value: f64,
    pub gradient: Point,
}

impl LocalLinear {
    pub fn at(&self, x: Point) -> f64 {
        self.value + self.gradient.dot(&(x - self.centroid))
    }
}

impl CrField {
    pub fn from_means(mesh: &Mesh, means: Vec<f64>) -> Result<Self> {
        if means.len() != mesh.num_faces() {
            return Err(Error::DimensionMismatch(format!(
                "{} face means for {} faces",
                means.len(),
                mesh.num_faces()
            )));
        }
        Ok(Self { means })
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Solves the pivoted 3x3 midpoint system of element `k`.
    pub fn local_linear(&self, mesh: &Mesh, k: usize) -> Result<LocalLinear> {
        let area = mesh.area(k);
        if area < MIN_AREA {
            return Err(Error::DegenerateElement { element: k, area });
        }
        let centroid = mesh.centroid(k);
        let faces = mesh.element_faces(k);
        let mut matrix = DenseMatrix::zeros(3);
        let mut rhs = vec![0.0; 3];
        for (row, &f) in faces.iter().enumerate() {
            let d = mesh.face_midpoint(f) - centroid;
            matrix[(row, 0)] = 1.0;
            matrix[(row, 1)] = d.x;
            matrix[(row, 2)] = d.y;
            rhs[row] = self.means[f];
        }
        let sol = dense_solve(&matrix, &[rhs]).map_err(|_| Error::DegenerateElement { element: k, area })?;
        Ok(LocalLinear {
            centroid,
            value: sol[0][0],
            gradient: Point::new(sol[0][1], sol[0][2]),
        })
    }

    pub fn evaluate(&self, mesh: &Mesh, k: usize, x: Point) -> Result<f64> {
        if !mesh.contains(k, x, 1e-10) {
            return Err(Error::OutsideEntity {
                entity: "element",
                index: k,
                x: x.x,
                y: x.y,
            });
        }
        Ok(self.local_linear(mesh, k)?.at(x))
    }
}

/// Lifting into the Crouzeix-Raviart space: the dof of each face is the mean
/// of `trace` over it. Only the means matter, so any trace degree is exact.
pub fn cr_lift(mesh: &Mesh, trace: &FaceField) -> CrField {
    CrField {
        means: (0..mesh.num_faces()).map(|f| trace.mean(mesh, f)).collect(),
    }
}

/// Elementwise (constant) gradient of a Crouzeix-Raviart function, as a
/// degree-0 vector field.
pub fn cr_broken_gradient(mesh: &Mesh, field: &CrField) -> Result<ElementVectorField> {
    let mut out = ElementVectorField::zeros(mesh, 0);
    for k in 0..mesh.num_elements() {
        let g = field.local_linear(mesh, k)?.gradient;
        let s = mesh.area(k).sqrt();
        out.x.block_mut(k)[0] = g.x * s;
        out.y.block_mut(k)[0] = g.y * s;
    }
    Ok(out)
}
