use serde::{Deserialize, Serialize};

use super::{BoundaryLabel, Mesh, Point};
use crate::error::{Error, Result};

/// Which diagonal splits each grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Diagonal {
    /// From the lower-left to the upper-right corner.
    #[default]
    Ne,
    /// From the lower-right to the upper-left corner.
    Nw,
}

fn split_cell(v00: usize, v10: usize, v01: usize, v11: usize, diagonal: Diagonal) -> [[usize; 3]; 2] {
    match diagonal {
        Diagonal::Ne => [[v00, v10, v11], [v00, v11, v01]],
        Diagonal::Nw => [[v00, v10, v01], [v10, v11, v01]],
    }
}

/// Uniform `n x n` triangulation of the unit square.
///
/// Faces on `y = 0` and `y = 1` are labelled `Gamma0`, those on `x = 0` and
/// `x = 1` are labelled `Gamma1`.
pub fn uniform_square_mesh(n: usize, diagonal: Diagonal) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidSize("square mesh needs n >= 1".into()));
    }
    let h = 1.0 / n as f64;
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let vertices: Vec<Point> = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| Point::new(i as f64 / n as f64, j as f64 / n as f64)))
        .collect();
    let mut elements = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            elements.extend(split_cell(idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1), diagonal));
        }
    }
    Mesh::new(vertices, elements, Some(h))?.with_boundary_partition(|p| {
        if p.y.abs() < 0.25 * h || (p.y - 1.0).abs() < 0.25 * h {
            BoundaryLabel::Gamma0
        } else {
            BoundaryLabel::Gamma1
        }
    })
}

/// Uniform triangulation of the L-shaped domain `(-1,1)^2 \ [0,1)x(-1,0)`
/// with cell size `2/n`. Every boundary face is labelled `Gamma0`.
pub fn lshape_mesh(n: usize) -> Result<Mesh> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidSize(format!("L-shape mesh needs an even n >= 2, got {n}")));
    }
    let half = n / 2;
    let h = 2.0 / n as f64;
    // grid point (i, j) sits at (-1 + i h, -1 + j h); points with i > half and
    // j < half lie strictly inside the removed quadrant
    let removed_point = |i: usize, j: usize| i > half && j < half;
    let removed_cell = |i: usize, j: usize| i >= half && j < half;
    let mut index = vec![usize::MAX; (n + 1) * (n + 1)];
    let mut vertices = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            if !removed_point(i, j) {
                index[j * (n + 1) + i] = vertices.len();
                vertices.push(Point::new(
                    -1.0 + 2.0 * i as f64 / n as f64,
                    -1.0 + 2.0 * j as f64 / n as f64,
                ));
            }
        }
    }
    let idx = |i: usize, j: usize| index[j * (n + 1) + i];
    let mut elements = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if !removed_cell(i, j) {
                elements.extend(split_cell(
                    idx(i, j),
                    idx(i + 1, j),
                    idx(i, j + 1),
                    idx(i + 1, j + 1),
                    Diagonal::Ne,
                ));
            }
        }
    }
    Mesh::new(vertices, elements, Some(h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let mesh = uniform_square_mesh(1, Diagonal::Ne).unwrap();
        assert_eq!(mesh.num_vertices(), 4);
        assert_eq!(mesh.num_elements(), 2);
        assert_eq!(mesh.num_faces(), 5);
        assert_eq!(mesh.num_faces() - mesh.num_boundary_faces(), 1);
    }

    #[test]
    fn counts_for_n8() {
        for diagonal in [Diagonal::Ne, Diagonal::Nw] {
            let mesh = uniform_square_mesh(8, diagonal).unwrap();
            assert_eq!(mesh.num_vertices(), 81);
            assert_eq!(mesh.num_elements(), 128);
            assert_eq!(mesh.num_faces(), 208);
            assert_eq!(mesh.num_boundary_faces(), 32);
            assert_eq!(mesh.euler_characteristic(), 1);
            assert_eq!(mesh.count_label(BoundaryLabel::Gamma0), 16);
            assert_eq!(mesh.count_label(BoundaryLabel::Gamma1), 16);
        }
    }

    #[test]
    fn zero_size_rejected() {
        assert!(matches!(uniform_square_mesh(0, Diagonal::Ne), Err(Error::InvalidSize(_))));
    }

    #[test]
    fn stats_for_n8() {
        let s = uniform_square_mesh(8, Diagonal::Ne).unwrap().stats();
        assert!((s.h_max - 2f64.sqrt() / 8.0).abs() < 1e-15);
        assert_eq!(s.h_grid, 0.125);
        assert!(s.h_max >= s.h_grid && s.max_aspect > 1.0);
    }

    #[test]
    fn lshape_counts() {
        let m2 = lshape_mesh(2).unwrap();
        assert_eq!(m2.num_elements(), 6);
        assert_eq!(m2.num_vertices(), 8);
        assert_eq!(lshape_mesh(4).unwrap().num_elements(), 24);
        assert_eq!(m2.count_label(BoundaryLabel::Gamma1), 0);
        assert_eq!(m2.euler_characteristic(), 1);
    }

    #[test]
    fn lshape_rejects_odd_n() {
        assert!(lshape_mesh(3).is_err());
        assert!(lshape_mesh(0).is_err());
    }

    #[test]
    fn lshape_domain_excludes_quadrant() {
        let mesh = lshape_mesh(8).unwrap();
        let area: f64 = (0..mesh.num_elements()).map(|k| mesh.area(k)).sum();
        assert!((area - 3.0).abs() < 1e-13);
        for k in 0..mesh.num_elements() {
            let c = mesh.centroid(k);
            assert!(!(c.x > 0.0 && c.y < 0.0));
        }
    }

    #[test]
    fn partition_relabelling() {
        let mesh = uniform_square_mesh(8, Diagonal::Ne).unwrap();
        let all = mesh.with_boundary_partition(|_| BoundaryLabel::Gamma0).unwrap();
        assert_eq!(all.count_label(BoundaryLabel::Gamma0), 32);
        let err = mesh.with_boundary_partition(|_| BoundaryLabel::Gamma1).unwrap_err();
        assert_eq!(err, Error::EmptyDirichletBoundary);
    }
}
