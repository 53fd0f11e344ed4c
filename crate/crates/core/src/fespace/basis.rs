use std::sync::OnceLock;

use nalgebra::{Matrix2, Vector2};

use super::quadrature::QuadratureRule;
use crate::mesh::{Mesh, Point};

/// Largest supported polynomial degree.
pub const MAX_DEGREE: usize = 2;

/// Dimension of `P_k` on a triangle.
pub const fn element_dofs(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Dimension of `P_k` on an edge.
pub const fn face_dofs(degree: usize) -> usize {
    degree + 1
}

const NMONO: usize = element_dofs(MAX_DEGREE);

fn monomials(x: f64, y: f64) -> [f64; NMONO] {
    [1.0, x, y, x * x, x * y, y * y]
}

fn monomial_gradients(x: f64, y: f64) -> [[f64; 2]; NMONO] {
    [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0 * x, 0.0], [y, x], [0.0, 2.0 * y]]
}

/// Coefficients of the reference basis in the monomials `1, x, y, x^2, xy, y^2`,
/// from Gram-Schmidt in `L^2` of the reference triangle. Row `i` is basis
/// function `i`; leading rows form the basis of every lower degree.
fn reference_coefficients() -> &'static [[f64; NMONO]; NMONO] {
    static COEFFS: OnceLock<[[f64; NMONO]; NMONO]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let rule = QuadratureRule::triangle(2 * MAX_DEGREE);
        let values: Vec<[f64; NMONO]> = rule.points.iter().map(|p| monomials(p[0], p[1])).collect();
        let inner = |a: &[f64; NMONO], b: &[f64; NMONO]| -> f64 {
            values
                .iter()
                .zip(&rule.weights)
                .map(|(m, w)| {
                    let fa: f64 = a.iter().zip(m).map(|(c, v)| c * v).sum();
                    let fb: f64 = b.iter().zip(m).map(|(c, v)| c * v).sum();
                    w * fa * fb
                })
                .sum()
        };
        let mut basis = [[0.0; NMONO]; NMONO];
        for i in 0..NMONO {
            let mut v = [0.0; NMONO];
            v[i] = 1.0;
            // modified Gram-Schmidt, applied twice for a clean identity Gram matrix
            for _ in 0..2 {
                for prev in basis.iter().take(i) {
                    let proj = inner(&v, prev);
                    v.iter_mut().zip(prev).for_each(|(a, b)| *a -= proj * b);
                }
            }
            let norm = inner(&v, &v).sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
            basis[i] = v;
        }
        basis
    })
}

/// L2-orthonormal basis of `P_k` on the reference triangle.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceBasis {
    degree: usize,
}

impl ReferenceBasis {
    pub fn new(degree: usize) -> Self {
        assert!(degree <= MAX_DEGREE, "degree {degree} unsupported");
        Self { degree }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        element_dofs(self.degree)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self, xi: [f64; 2], out: &mut [f64]) {
        let m = monomials(xi[0], xi[1]);
        let c = reference_coefficients();
        for (i, o) in out.iter_mut().enumerate().take(self.len()) {
            *o = c[i].iter().zip(&m).map(|(a, b)| a * b).sum();
        }
    }

    /// Reference-coordinate gradients.
    pub fn gradients(&self, xi: [f64; 2], out: &mut [[f64; 2]]) {
        let g = monomial_gradients(xi[0], xi[1]);
        let c = reference_coefficients();
        for (i, o) in out.iter_mut().enumerate().take(self.len()) {
            let mut acc = [0.0; 2];
            for (coef, gm) in c[i].iter().zip(&g) {
                acc[0] += coef * gm[0];
                acc[1] += coef * gm[1];
            }
            *o = acc;
        }
    }
}

/// Orthonormal Legendre polynomials on `[0, 1]`.
pub fn edge_basis_values(degree: usize, t: f64, out: &mut [f64]) {
    let all = [1.0, 3f64.sqrt() * (2.0 * t - 1.0), 5f64.sqrt() * (6.0 * t * t - 6.0 * t + 1.0)];
    out[..=degree].copy_from_slice(&all[..=degree]);
}

/// Affine map from the reference triangle onto a mesh element.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub origin: Point,
    pub jacobian: Matrix2<f64>,
    pub inverse: Matrix2<f64>,
    pub area: f64,
    /// `1 / sqrt(2 |K|)`: scales reference basis values to physical ones.
    pub scale: f64,
}

impl ElementGeometry {
    pub fn new(mesh: &Mesh, k: usize) -> Self {
        let [a, b, c] = mesh.element_points(k);
        let jacobian = Matrix2::from_columns(&[b - a, c - a]);
        let det = jacobian.determinant();
        let inverse = jacobian.try_inverse().unwrap_or_else(Matrix2::zeros);
        Self {
            origin: a,
            jacobian,
            inverse,
            area: 0.5 * det,
            scale: 1.0 / det.sqrt(),
        }
    }

    pub fn to_physical(&self, xi: [f64; 2]) -> Point {
        self.origin + self.jacobian * Vector2::new(xi[0], xi[1])
    }

    pub fn to_reference(&self, x: Point) -> [f64; 2] {
        let r = self.inverse * (x - self.origin);
        [r.x, r.y]
    }

    /// Physical basis values and gradients at a reference point.
    pub fn eval(&self, basis: &ReferenceBasis, xi: [f64; 2], values: &mut [f64], grads: &mut [Point]) {
        basis.values(xi, values);
        let mut ref_grads = [[0.0; 2]; NMONO];
        basis.gradients(xi, &mut ref_grads);
        let jit = self.inverse.transpose();
        for i in 0..basis.len() {
            values[i] *= self.scale;
            if i < grads.len() {
                grads[i] = jit * Vector2::new(ref_grads[i][0], ref_grads[i][1]) * self.scale;
            }
        }
    }

    pub fn values(&self, basis: &ReferenceBasis, xi: [f64; 2], values: &mut [f64]) {
        basis.values(xi, values);
        values[..basis.len()].iter_mut().for_each(|v| *v *= self.scale);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_gram_matrix_is_identity() {
        let rule = QuadratureRule::triangle(6);
        for k in 0..=MAX_DEGREE {
            let basis = ReferenceBasis::new(k);
            let n = basis.len();
            let mut gram = vec![0.0; n * n];
            let mut v = [0.0; NMONO];
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                basis.values(*p, &mut v);
                for i in 0..n {
                    for j in 0..n {
                        gram[i * n + j] += w * v[i] * v[j];
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((gram[i * n + j] - target).abs() < 1e-13, "k={k} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn edge_basis_is_orthonormal() {
        let rule = QuadratureRule::edge(6);
        let mut v = [0.0; 3];
        let mut gram = [[0.0; 3]; 3];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            edge_basis_values(2, p[0], &mut v);
            for i in 0..3 {
                for j in 0..3 {
                    gram[i][j] += w * v[i] * v[j];
                }
            }
        }
        for (i, row) in gram.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let basis = ReferenceBasis::new(2);
        let (x, y, h) = (0.21, 0.33, 1e-6);
        let mut g = [[0.0; 2]; NMONO];
        basis.gradients([x, y], &mut g);
        let mut plus = [0.0; NMONO];
        let mut minus = [0.0; NMONO];
        for dir in 0..2 {
            let (dx, dy) = if dir == 0 { (h, 0.0) } else { (0.0, h) };
            basis.values([x + dx, y + dy], &mut plus);
            basis.values([x - dx, y - dy], &mut minus);
            for i in 0..NMONO {
                assert!(((plus[i] - minus[i]) / (2.0 * h) - g[i][dir]).abs() < 1e-7);
            }
        }
    }
}
