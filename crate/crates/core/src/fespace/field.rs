use serde::{Deserialize, Serialize};

use super::basis::{edge_basis_values, element_dofs, face_dofs, ElementGeometry, ReferenceBasis, MAX_DEGREE};
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};
use crate::linalg::pairwise_sum;
use crate::mesh::{Mesh, Point};

/// Quadrature degree used for error norms unless overridden.
pub const ERROR_QUADRATURE_DEGREE: usize = 10;

pub(crate) fn check_degree(degree: usize) -> Result<()> {
    if degree > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    Ok(())
}

/// Piecewise polynomial of degree `k` on the elements, stored as contiguous
/// per-element coefficient blocks in the element-orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementField {
    degree: usize,
    coeffs: Vec<f64>,
}

impl ElementField {
    pub fn zeros(mesh: &Mesh, degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![0.0; mesh.num_elements() * element_dofs(degree)],
        }
    }

    pub fn from_coeffs(mesh: &Mesh, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_degree(degree)?;
        if coeffs.len() != mesh.num_elements() * element_dofs(degree) {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} elements of degree {degree}",
                coeffs.len(),
                mesh.num_elements()
            )));
        }
        Ok(Self { degree, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn block_len(&self) -> usize {
        element_dofs(self.degree)
    }

    pub fn num_blocks(&self) -> usize {
        self.coeffs.len() / self.block_len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn block(&self, k: usize) -> &[f64] {
        let m = self.block_len();
        &self.coeffs[k * m..(k + 1) * m]
    }

    pub fn block_mut(&mut self, k: usize) -> &mut [f64] {
        let m = self.block_len();
        &mut self.coeffs[k * m..(k + 1) * m]
    }

    /// Value at a point of element `k`.
    pub fn evaluate(&self, mesh: &Mesh, k: usize, x: Point) -> Result<f64> {
        if k >= mesh.num_elements() || !mesh.contains(k, x, 1e-10) {
            return Err(Error::OutsideEntity {
                entity: "element",
                index: k,
                x: x.x,
                y: x.y,
            });
        }
        let geo = ElementGeometry::new(mesh, k);
        Ok(self.evaluate_reference(&geo, k, geo.to_reference(x)))
    }

    pub(crate) fn evaluate_reference(&self, geo: &ElementGeometry, k: usize, xi: [f64; 2]) -> f64 {
        let basis = ReferenceBasis::new(self.degree);
        let mut v = [0.0; element_dofs(MAX_DEGREE)];
        geo.values(&basis, xi, &mut v);
        self.block(k).iter().zip(&v).map(|(c, b)| c * b).sum()
    }

    pub fn to_json(&self, mesh: &Mesh) -> String {
        field_json(self.degree, mesh, self.coeffs.chunks(self.block_len()))
    }

    pub fn from_json(mesh: &Mesh, text: &str) -> Result<Self> {
        let (degree, coeffs) = parse_field_json(mesh, text, mesh.num_elements(), element_dofs)?;
        Self::from_coeffs(mesh, degree, coeffs)
    }
}

/// Pair of element fields holding the `x` and `y` components.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementVectorField {
    pub x: ElementField,
    pub y: ElementField,
}

impl ElementVectorField {
    pub fn zeros(mesh: &Mesh, degree: usize) -> Self {
        Self {
            x: ElementField::zeros(mesh, degree),
            y: ElementField::zeros(mesh, degree),
        }
    }

    pub fn degree(&self) -> usize {
        self.x.degree()
    }

    pub fn evaluate(&self, mesh: &Mesh, k: usize, p: Point) -> Result<Point> {
        Ok(Point::new(self.x.evaluate(mesh, k, p)?, self.y.evaluate(mesh, k, p)?))
    }

    /// Blocks hold the `x` coefficients followed by the `y` coefficients.
    pub fn to_json(&self, mesh: &Mesh) -> String {
        let blocks: Vec<Vec<f64>> = (0..self.x.num_blocks())
            .map(|k| self.x.block(k).iter().chain(self.y.block(k)).copied().collect())
            .collect();
        field_json(self.degree(), mesh, blocks.iter().map(|b| b.as_slice()))
    }

    pub fn from_json(mesh: &Mesh, text: &str) -> Result<Self> {
        let (degree, coeffs) = parse_field_json(mesh, text, mesh.num_elements(), |d| 2 * element_dofs(d))?;
        let m = element_dofs(degree);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for block in coeffs.chunks(2 * m) {
            xs.extend_from_slice(&block[..m]);
            ys.extend_from_slice(&block[m..]);
        }
        Ok(Self {
            x: ElementField::from_coeffs(mesh, degree, xs)?,
            y: ElementField::from_coeffs(mesh, degree, ys)?,
        })
    }
}

/// Piecewise polynomial of degree `k` on the faces, stored per face in the
/// orthonormal Legendre basis of the face's arc-length parameterization.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    degree: usize,
    coeffs: Vec<f64>,
}

impl FaceField {
    pub fn zeros(mesh: &Mesh, degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![0.0; mesh.num_faces() * face_dofs(degree)],
        }
    }

    pub fn from_coeffs(mesh: &Mesh, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_degree(degree)?;
        if coeffs.len() != mesh.num_faces() * face_dofs(degree) {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} faces of degree {degree}",
                coeffs.len(),
                mesh.num_faces()
            )));
        }
        Ok(Self { degree, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn block_len(&self) -> usize {
        face_dofs(self.degree)
    }

    pub fn num_blocks(&self) -> usize {
        self.coeffs.len() / self.block_len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn block(&self, f: usize) -> &[f64] {
        let m = self.block_len();
        &self.coeffs[f * m..(f + 1) * m]
    }

    pub fn block_mut(&mut self, f: usize) -> &mut [f64] {
        let m = self.block_len();
        &mut self.coeffs[f * m..(f + 1) * m]
    }

    /// Mean value over face `f`.
    pub fn mean(&self, mesh: &Mesh, f: usize) -> f64 {
        self.block(f)[0] / mesh.face_length(f).sqrt()
    }

    /// Value at parameter `t` in `[0, 1]` along face `f`.
    pub fn evaluate_param(&self, mesh: &Mesh, f: usize, t: f64) -> f64 {
        let mut v = [0.0; 3];
        edge_basis_values(self.degree, t, &mut v);
        let s = 1.0 / mesh.face_length(f).sqrt();
        self.block(f).iter().zip(&v).map(|(c, b)| c * b * s).sum()
    }

    /// Value at a point on face `f`.
    pub fn evaluate(&self, mesh: &Mesh, f: usize, x: Point) -> Result<f64> {
        let outside = Error::OutsideEntity {
            entity: "face",
            index: f,
            x: x.x,
            y: x.y,
        };
        if f >= mesh.num_faces() {
            return Err(outside);
        }
        let (a, b) = mesh.face_endpoints(f);
        let d = b - a;
        let len2 = d.norm_squared();
        let t = (x - a).dot(&d) / len2;
        let off = (x - a - d * t).norm();
        if !(-1e-10..=1.0 + 1e-10).contains(&t) || off > 1e-10 * len2.sqrt() {
            return Err(outside);
        }
        Ok(self.evaluate_param(mesh, f, t))
    }

    pub fn to_json(&self, mesh: &Mesh) -> String {
        field_json(self.degree, mesh, self.coeffs.chunks(self.block_len()))
    }

    pub fn from_json(mesh: &Mesh, text: &str) -> Result<Self> {
        let (degree, coeffs) = parse_field_json(mesh, text, mesh.num_faces(), face_dofs)?;
        Self::from_coeffs(mesh, degree, coeffs)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    degree: usize,
    mesh_hash: String,
    blocks: Vec<Vec<f64>>,
}

fn field_json<'a>(degree: usize, mesh: &Mesh, blocks: impl Iterator<Item = &'a [f64]>) -> String {
    let doc = FieldJson {
        degree,
        mesh_hash: mesh.hash(),
        blocks: blocks.map(|b| b.to_vec()).collect(),
    };
    serde_json::to_string(&doc).expect("field serialization")
}

fn parse_field_json(
    mesh: &Mesh,
    text: &str,
    expected_blocks: usize,
    block_len: impl Fn(usize) -> usize,
) -> Result<(usize, Vec<f64>)> {
    let doc: FieldJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    check_degree(doc.degree)?;
    if doc.mesh_hash != mesh.hash() {
        return Err(Error::Parse(format!(
            "field belongs to mesh {}, not {}",
            doc.mesh_hash,
            mesh.hash()
        )));
    }
    let len = block_len(doc.degree);
    if doc.blocks.len() != expected_blocks || doc.blocks.iter().any(|b| b.len() != len) {
        return Err(Error::Parse("block layout does not match the mesh".into()));
    }
    Ok((doc.degree, doc.blocks.concat()))
}

/// Elementwise L2 projection with a quadrature rule exact to degree
/// `2k + 2`.
pub fn element_l2_project<F>(mesh: &Mesh, degree: usize, u: F) -> Result<ElementField>
where
    F: Fn(Point) -> f64,
{
    element_l2_project_with(mesh, degree, u, 2 * degree + 2)
}

pub fn element_l2_project_with<F>(mesh: &Mesh, degree: usize, u: F, quad_degree: usize) -> Result<ElementField>
where
    F: Fn(Point) -> f64,
{
    check_degree(degree)?;
    let basis = ReferenceBasis::new(degree);
    let rule = QuadratureRule::triangle(quad_degree);
    let mut field = ElementField::zeros(mesh, degree);
    let mut v = [0.0; element_dofs(MAX_DEGREE)];
    for k in 0..mesh.num_elements() {
        let geo = ElementGeometry::new(mesh, k);
        let jac = 2.0 * geo.area;
        let block = field.block_mut(k);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            geo.values(&basis, *p, &mut v);
            let val = u(geo.to_physical(*p)) * w * jac;
            block.iter_mut().zip(&v).for_each(|(c, b)| *c += val * b);
        }
    }
    Ok(field)
}

/// Facewise L2 projection with a rule exact to degree `2k + 2`.
pub fn face_l2_project<F>(mesh: &Mesh, degree: usize, u: F) -> Result<FaceField>
where
    F: Fn(Point) -> f64,
{
    face_l2_project_with(mesh, degree, u, 2 * degree + 2)
}

pub fn face_l2_project_with<F>(mesh: &Mesh, degree: usize, u: F, quad_degree: usize) -> Result<FaceField>
where
    F: Fn(Point) -> f64,
{
    check_degree(degree)?;
    let rule = QuadratureRule::edge(quad_degree);
    let mut field = FaceField::zeros(mesh, degree);
    let mut v = [0.0; 3];
    for f in 0..mesh.num_faces() {
        let (a, b) = mesh.face_endpoints(f);
        let sqrt_len = (b - a).norm().sqrt();
        let block = field.block_mut(f);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let t = p[0];
            edge_basis_values(degree, t, &mut v);
            // |e| * (1 / sqrt|e|) from the measure and the basis scaling
            let val = u(a + (b - a) * t) * w * sqrt_len;
            block.iter_mut().zip(&v).for_each(|(c, bv)| *c += val * bv);
        }
    }
    Ok(field)
}

/// `||u - u_h||` over the mesh by quadrature of degree `quad_degree`.
pub fn l2_error<F>(mesh: &Mesh, field: &ElementField, exact: F, quad_degree: usize) -> f64
where
    F: Fn(Point) -> f64,
{
    let rule = QuadratureRule::triangle(quad_degree);
    let per_element: Vec<f64> = (0..mesh.num_elements())
        .map(|k| {
            let geo = ElementGeometry::new(mesh, k);
            let jac = 2.0 * geo.area;
            rule.points
                .iter()
                .zip(&rule.weights)
                .map(|(p, w)| {
                    let e = exact(geo.to_physical(*p)) - field.evaluate_reference(&geo, k, *p);
                    w * jac * e * e
                })
                .sum()
        })
        .collect();
    pairwise_sum(&per_element).sqrt()
}

/// Vector variant of [`l2_error`], summing both components.
pub fn l2_error_vector<F>(mesh: &Mesh, field: &ElementVectorField, exact: F, quad_degree: usize) -> f64
where
    F: Fn(Point) -> Point,
{
    let rule = QuadratureRule::triangle(quad_degree);
    let per_element: Vec<f64> = (0..mesh.num_elements())
        .map(|k| {
            let geo = ElementGeometry::new(mesh, k);
            let jac = 2.0 * geo.area;
            rule.points
                .iter()
                .zip(&rule.weights)
                .map(|(p, w)| {
                    let g = exact(geo.to_physical(*p));
                    let ex = g.x - field.x.evaluate_reference(&geo, k, *p);
                    let ey = g.y - field.y.evaluate_reference(&geo, k, *p);
                    w * jac * (ex * ex + ey * ey)
                })
                .sum()
        })
        .collect();
    pairwise_sum(&per_element).sqrt()
}

/// `||u_h||` of an element field (exact for its degree).
pub fn l2_norm(field: &ElementField) -> f64 {
    let squares: Vec<f64> = field.coeffs().iter().map(|c| c * c).collect();
    pairwise_sum(&squares).sqrt()
}
