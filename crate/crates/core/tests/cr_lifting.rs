mod common;

use common::*;
use hdg_core::cr::{cr_broken_gradient, cr_lift, CrField};
use hdg_core::fespace::{face_l2_project, QuadratureRule};
use hdg_core::mesh::uniform_square_mesh;
use hdg_core::{Diagonal, Point};
use rand::Rng;

#[test]
fn boundary_identity_for_piecewise_constant_test_fields() {
    let mut rng = rng(11);
    let mesh = uniform_square_mesh(4, Diagonal::Ne).unwrap();
    let edge = QuadratureRule::edge(4);
    for _ in 0..50 {
        let means: Vec<f64> = (0..mesh.num_faces()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let field = CrField::from_means(&mesh, means).unwrap();
        let grad = cr_broken_gradient(&mesh, &field).unwrap();
        for _ in 0..10 {
            let q: Vec<Point> = (0..mesh.num_elements())
                .map(|_| Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let (mut volume, mut boundary) = (0.0, 0.0);
            for k in 0..mesh.num_elements() {
                let p = grad.evaluate(&mesh, k, mesh.centroid(k)).unwrap();
                volume += mesh.area(k) * p.dot(&q[k]);
                for (local, &f) in mesh.element_faces(k).iter().enumerate() {
                    let n = mesh.outward_normal(k, local);
                    let (a, b) = mesh.face_endpoints(f);
                    for (t, w) in edge.points.iter().zip(&edge.weights) {
                        let x = a + (b - a) * t[0];
                        boundary += w * (b - a).norm() * field.evaluate(&mesh, k, x).unwrap() * q[k].dot(&n);
                    }
                }
            }
            assert!((volume - boundary).abs() <= 1e-11);
        }
    }
}

#[test]
fn neighbouring_traces_have_equal_means() {
    let mut rng = rng(12);
    for diag in [Diagonal::Ne, Diagonal::Nw] {
        let mesh = uniform_square_mesh(5, diag).unwrap();
        let means: Vec<f64> = (0..mesh.num_faces()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let field = CrField::from_means(&mesh, means).unwrap();
        for (f, face) in mesh.faces().iter().enumerate() {
            let Some(right) = face.right else { continue };
            // a linear function's face mean is its midpoint value
            let mid = mesh.face_midpoint(f);
            let left = field.local_linear(&mesh, face.left.element).unwrap().at(mid);
            let right = field.local_linear(&mesh, right.element).unwrap().at(mid);
            assert!((left - right).abs() <= 1e-12);
            assert!((left - field.means()[f]).abs() <= 1e-12);
        }
    }
}

#[test]
fn lift_keeps_exact_edge_means_of_a_quadratic() {
    let mesh = uniform_square_mesh(4, Diagonal::Ne).unwrap();
    for degree in 0..=2 {
        let trace = face_l2_project(&mesh, degree, |p| p.x * p.x).unwrap();
        let lifted = cr_lift(&mesh, &trace);
        for f in 0..mesh.num_faces() {
            let (a, b) = mesh.face_endpoints(f);
            let exact = (a.x * a.x + a.x * b.x + b.x * b.x) / 3.0;
            assert!((lifted.means()[f] - exact).abs() <= 1e-12);
        }
    }
}

#[test]
fn gradient_of_lifted_linear_is_constant() {
    let mesh = uniform_square_mesh(3, Diagonal::Nw).unwrap();
    let trace = face_l2_project(&mesh, 0, |p| p.x).unwrap();
    let grad = cr_broken_gradient(&mesh, &cr_lift(&mesh, &trace)).unwrap();
    for k in 0..mesh.num_elements() {
        let g = grad.evaluate(&mesh, k, mesh.centroid(k)).unwrap();
        assert!((g - Point::new(1.0, 0.0)).norm() < 1e-12);
    }
}
