//! Two-dimensional simplicial meshes with an explicit face skeleton.
//!
//! Local face `i` of an element is the edge opposite its vertex `i`. Faces
//! store their endpoints in ascending vertex order; that order fixes the
//! arc-length parameterization shared by both neighbouring elements.

mod generate;
mod io;

use std::collections::HashMap;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use generate::{lshape_mesh, uniform_square_mesh, Diagonal};

pub type Point = Vector2<f64>;

/// Dirichlet (`Gamma0`) or Neumann (`Gamma1`) part of the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryLabel {
    Gamma0,
    Gamma1,
}

/// One element adjacent to a face, with the face's local index in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceSide {
    pub element: usize,
    pub local: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Endpoints, ascending vertex indices.
    pub vertices: [usize; 2],
    pub left: FaceSide,
    pub right: Option<FaceSide>,
    /// `Some` exactly for boundary faces.
    pub label: Option<BoundaryLabel>,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }

    pub fn sides(&self) -> impl Iterator<Item = FaceSide> + '_ {
        std::iter::once(self.left).chain(self.right)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    elements: Vec<[usize; 3]>,
    element_faces: Vec<[usize; 3]>,
    faces: Vec<Face>,
    nominal_h: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    /// Largest element diameter.
    pub h_max: f64,
    /// Nominal grid spacing of generated meshes; `h_max` otherwise.
    pub h_grid: f64,
    /// Largest ratio of incenter-to-vertex reach over inradius.
    pub max_aspect: f64,
}

impl Mesh {
    /// Builds the face skeleton of a counterclockwise triangulation. All
    /// boundary faces start out labelled `Gamma0`.
    pub fn new(vertices: Vec<Point>, elements: Vec<[usize; 3]>, nominal_h: Option<f64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidMesh("no elements".into()));
        }
        let mut faces: Vec<Face> = Vec::with_capacity(elements.len() * 3 / 2 + 1);
        let mut lookup: HashMap<[usize; 2], usize> = HashMap::with_capacity(elements.len() * 2);
        let mut element_faces = Vec::with_capacity(elements.len());
        for (k, tri) in elements.iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::InvalidMesh(format!(
                    "element {k} references missing vertex {bad}"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::InvalidMesh(format!("element {k} repeats a vertex")));
            }
            let area = signed_area(&vertices[tri[0]], &vertices[tri[1]], &vertices[tri[2]]);
            if !(area > 0.0) {
                return Err(Error::InvalidMesh(format!(
                    "element {k} is not counterclockwise (signed area {area:e})"
                )));
            }
            let mut local_faces = [0; 3];
            for (local, slot) in local_faces.iter_mut().enumerate() {
                let a = tri[(local + 1) % 3];
                let b = tri[(local + 2) % 3];
                let key = [a.min(b), a.max(b)];
                let side = FaceSide { element: k, local };
                *slot = match lookup.get(&key) {
                    Some(&f) => {
                        let face = &mut faces[f];
                        if face.right.is_some() {
                            return Err(Error::InvalidMesh(format!(
                                "edge ({}, {}) shared by more than two elements",
                                key[0], key[1]
                            )));
                        }
                        // a consistently oriented neighbour traverses the edge backwards
                        let first = elements[face.left.element];
                        if first[(face.left.local + 1) % 3] != b {
                            return Err(Error::InvalidMesh(format!(
                                "elements {} and {k} have inconsistent orientation",
                                face.left.element
                            )));
                        }
                        face.right = Some(side);
                        face.label = None;
                        f
                    }
                    None => {
                        faces.push(Face {
                            vertices: key,
                            left: side,
                            right: None,
                            label: Some(BoundaryLabel::Gamma0),
                        });
                        lookup.insert(key, faces.len() - 1);
                        faces.len() - 1
                    }
                };
            }
            element_faces.push(local_faces);
        }
        Ok(Self {
            vertices,
            elements,
            element_faces,
            faces,
            nominal_h,
        })
    }

    /// Relabels the boundary by evaluating `predicate` at face midpoints.
    /// At least one `Gamma0` face must remain.
    pub fn with_boundary_partition<F>(&self, predicate: F) -> Result<Self>
    where
        F: Fn(Point) -> BoundaryLabel,
    {
        let mut mesh = self.clone();
        for f in 0..mesh.faces.len() {
            if mesh.faces[f].is_boundary() {
                let label = predicate(mesh.face_midpoint(f));
                mesh.faces[f].label = Some(label);
            }
        }
        mesh.check_dirichlet()?;
        Ok(mesh)
    }

    pub(crate) fn with_labels(mut self, labels: &HashMap<[usize; 2], BoundaryLabel>) -> Result<Self> {
        for face in self.faces.iter_mut().filter(|f| f.is_boundary()) {
            let label = labels.get(&face.vertices).ok_or_else(|| {
                Error::InvalidMesh(format!(
                    "boundary face ({}, {}) has no label",
                    face.vertices[0], face.vertices[1]
                ))
            })?;
            face.label = Some(*label);
        }
        if labels.len() != self.num_boundary_faces() {
            return Err(Error::InvalidMesh(format!(
                "{} labels for {} boundary faces",
                labels.len(),
                self.num_boundary_faces()
            )));
        }
        Ok(self)
    }

    fn check_dirichlet(&self) -> Result<()> {
        if self.count_label(BoundaryLabel::Gamma0) == 0 {
            return Err(Error::EmptyDirichletBoundary);
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_boundary_faces(&self) -> usize {
        self.faces.iter().filter(|f| f.is_boundary()).count()
    }

    pub fn count_label(&self, label: BoundaryLabel) -> usize {
        self.faces.iter().filter(|f| f.label == Some(label)).count()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn elements(&self) -> &[[usize; 3]] {
        &self.elements
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    /// Global face indices of an element, by local index.
    pub fn element_faces(&self, k: usize) -> [usize; 3] {
        self.element_faces[k]
    }

    pub fn nominal_h(&self) -> Option<f64> {
        self.nominal_h
    }

    pub fn element_points(&self, k: usize) -> [Point; 3] {
        let [a, b, c] = self.elements[k];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self, k: usize) -> f64 {
        let [a, b, c] = self.element_points(k);
        signed_area(&a, &b, &c)
    }

    pub fn centroid(&self, k: usize) -> Point {
        let [a, b, c] = self.element_points(k);
        (a + b + c) / 3.0
    }

    pub fn diameter(&self, k: usize) -> f64 {
        let [a, b, c] = self.element_points(k);
        (a - b).norm().max((b - c).norm()).max((c - a).norm())
    }

    /// Endpoints in the face's own orientation (ascending vertex index).
    pub fn face_endpoints(&self, f: usize) -> (Point, Point) {
        let [a, b] = self.faces[f].vertices;
        (self.vertices[a], self.vertices[b])
    }

    pub fn face_length(&self, f: usize) -> f64 {
        let (a, b) = self.face_endpoints(f);
        (b - a).norm()
    }

    pub fn face_midpoint(&self, f: usize) -> Point {
        let (a, b) = self.face_endpoints(f);
        (a + b) * 0.5
    }

    /// Unit normal of local face `local` pointing out of element `k`.
    pub fn outward_normal(&self, k: usize, local: usize) -> Point {
        let tri = self.elements[k];
        let a = self.vertices[tri[(local + 1) % 3]];
        let b = self.vertices[tri[(local + 2) % 3]];
        let t = b - a;
        // counterclockwise traversal: the exterior is on the right
        Point::new(t.y, -t.x) / t.norm()
    }

    pub fn label(&self, f: usize) -> Option<BoundaryLabel> {
        self.faces[f].label
    }

    /// Euler characteristic `V - E + T`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.faces.len() as i64 + self.elements.len() as i64
    }

    /// Short hex digest of the vertex coordinates and connectivity.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        for v in &self.vertices {
            hasher.update(v.x.to_bits().to_le_bytes());
            hasher.update(v.y.to_bits().to_le_bytes());
        }
        for tri in &self.elements {
            for &i in tri {
                hasher.update((i as u64).to_le_bytes());
            }
        }
        let digest = hasher.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn stats(&self) -> MeshStats {
        let mut h_max = 0.0f64;
        let mut max_aspect = 0.0f64;
        for k in 0..self.num_elements() {
            h_max = h_max.max(self.diameter(k));
            max_aspect = max_aspect.max(aspect_ratio(&self.element_points(k)));
        }
        MeshStats {
            h_max,
            h_grid: self.nominal_h.unwrap_or(h_max),
            max_aspect,
        }
    }

    /// Reference length used by h-scaled stabilization weights.
    pub fn h_grid(&self) -> f64 {
        self.nominal_h.unwrap_or_else(|| self.stats().h_max)
    }

    /// Index of an element containing `p` (closed triangles), if any.
    pub fn locate(&self, p: Point) -> Option<usize> {
        (0..self.num_elements()).find(|&k| self.contains(k, p, 1e-12))
    }

    /// Whether `p` lies in element `k` up to a relative tolerance on the
    /// barycentric coordinates.
    pub fn contains(&self, k: usize, p: Point, tol: f64) -> bool {
        let [a, b, c] = self.element_points(k);
        let area = signed_area(&a, &b, &c);
        let l0 = signed_area(&p, &b, &c) / area;
        let l1 = signed_area(&a, &p, &c) / area;
        let l2 = 1.0 - l0 - l1;
        l0 >= -tol && l1 >= -tol && l2 >= -tol
    }

    pub fn write_text(&self) -> String {
        io::write_text(self)
    }

    pub fn read_text(text: &str) -> Result<Self> {
        io::read_text(text)
    }
}

/// Mesh statistics; see [`Mesh::stats`].
pub fn mesh_stats(mesh: &Mesh) -> MeshStats {
    mesh.stats()
}

/// Free-function form of [`Mesh::with_boundary_partition`].
pub fn set_boundary_partition<F>(mesh: &Mesh, predicate: F) -> Result<Mesh>
where
    F: Fn(Point) -> BoundaryLabel,
{
    mesh.with_boundary_partition(predicate)
}

pub(crate) fn signed_area(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}

/// `r_K / rho_K`: largest incenter-to-vertex distance over the inradius.
fn aspect_ratio(p: &[Point; 3]) -> f64 {
    let la = (p[1] - p[2]).norm();
    let lb = (p[2] - p[0]).norm();
    let lc = (p[0] - p[1]).norm();
    let perimeter = la + lb + lc;
    let incenter = (p[0] * la + p[1] * lb + p[2] * lc) / perimeter;
    let inradius = 2.0 * signed_area(&p[0], &p[1], &p[2]) / perimeter;
    let reach = p.iter().map(|v| (v - incenter).norm()).fold(0.0, f64::max);
    reach / inradius
}
