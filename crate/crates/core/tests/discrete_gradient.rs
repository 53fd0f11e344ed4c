mod common;

use common::*;
use hdg_core::cr::{cr_broken_gradient, cr_lift};
use hdg_core::fespace::{
    element_dofs, element_l2_project, element_l2_project_with, face_l2_project, face_l2_project_with,
    ElementGeometry, QuadratureRule, ReferenceBasis,
};
use hdg_core::hdg::{discrete_gradient, seminorms};
use hdg_core::mesh::uniform_square_mesh;
use hdg_core::{Diagonal, ElementField, FaceField, Point};

#[test]
fn defining_identity_holds_for_every_basis_function() {
    let mut rng = rng(1);
    for diag in [Diagonal::Ne, Diagonal::Nw] {
        let mesh = uniform_square_mesh(3, diag).unwrap();
        for degree in 0..=2 {
            let u = random_element_field(&mut rng, &mesh, degree);
            let t = random_face_field(&mut rng, &mesh, degree);
            let g = discrete_gradient(&mesh, &u, &t).unwrap();
            let m = element_dofs(degree);
            for k in 0..mesh.num_elements() {
                let rhs = gradient_identity_rhs(&mesh, &u, &t, k);
                for b in 0..m {
                    assert!((g.x.block(k)[b] - rhs[b]).abs() <= 1e-12, "k={k} degree={degree}");
                    assert!((g.y.block(k)[b] - rhs[m + b]).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn linear_in_both_arguments() {
    let mut rng = rng(2);
    let mesh = uniform_square_mesh(4, Diagonal::Ne).unwrap();
    for degree in 0..=2 {
        let (u1, u2) = (random_element_field(&mut rng, &mesh, degree), random_element_field(&mut rng, &mesh, degree));
        let (t1, t2) = (random_face_field(&mut rng, &mesh, degree), random_face_field(&mut rng, &mesh, degree));
        let (a, b) = (0.7, -1.3);
        let combine = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| a * p + b * q).collect() };
        let u = ElementField::from_coeffs(&mesh, degree, combine(u1.coeffs(), u2.coeffs())).unwrap();
        let t = FaceField::from_coeffs(&mesh, degree, combine(t1.coeffs(), t2.coeffs())).unwrap();
        let g = discrete_gradient(&mesh, &u, &t).unwrap();
        let g1 = discrete_gradient(&mesh, &u1, &t1).unwrap();
        let g2 = discrete_gradient(&mesh, &u2, &t2).unwrap();
        let expect_x = combine(g1.x.coeffs(), g2.x.coeffs());
        let expect_y = combine(g1.y.coeffs(), g2.y.coeffs());
        for (p, q) in g.x.coeffs().iter().zip(&expect_x).chain(g.y.coeffs().iter().zip(&expect_y)) {
            assert!((p - q).abs() <= 1e-12);
        }
    }
}

#[test]
fn exact_on_linear_functions() {
    let mesh = uniform_square_mesh(3, Diagonal::Nw).unwrap();
    let ell = |p: Point| 1.0 + 2.0 * p.x - 3.0 * p.y;
    for degree in 0..=2 {
        let u = element_l2_project(&mesh, degree, ell).unwrap();
        let t = face_l2_project(&mesh, degree, ell).unwrap();
        let g = discrete_gradient(&mesh, &u, &t).unwrap();
        for k in 0..mesh.num_elements() {
            let v = g.evaluate(&mesh, k, mesh.element_points(k)[1]).unwrap();
            assert!((v - Point::new(2.0, -3.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn lowest_order_gradient_is_the_crouzeix_raviart_gradient() {
    let mut rng = rng(3);
    for diag in [Diagonal::Ne, Diagonal::Nw] {
        let mesh = uniform_square_mesh(4, diag).unwrap();
        for _ in 0..10 {
            let u = random_element_field(&mut rng, &mesh, 0);
            let t = random_face_field(&mut rng, &mesh, 0);
            let g = discrete_gradient(&mesh, &u, &t).unwrap();
            let cr = cr_broken_gradient(&mesh, &cr_lift(&mesh, &t)).unwrap();
            assert!(rel_diff(g.x.coeffs(), cr.x.coeffs()) < 1e-12);
            assert!(rel_diff(g.y.coeffs(), cr.y.coeffs()) < 1e-12);
        }
    }
}

#[test]
fn piecewise_constant_part_is_the_crouzeix_raviart_gradient() {
    let mut rng = rng(4);
    let mesh = uniform_square_mesh(4, Diagonal::Ne).unwrap();
    for degree in 1..=2 {
        for _ in 0..20 {
            let u = random_element_field(&mut rng, &mesh, degree);
            let t = random_face_field(&mut rng, &mesh, degree);
            let g = discrete_gradient(&mesh, &u, &t).unwrap();
            let cr = cr_broken_gradient(&mesh, &cr_lift(&mesh, &t)).unwrap();
            let (mut cr_norm2, mut g_norm2) = (0.0, 0.0);
            for k in 0..mesh.num_elements() {
                // the first basis function is the normalized constant
                assert!((g.x.block(k)[0] - cr.x.block(k)[0]).abs() < 1e-12);
                assert!((g.y.block(k)[0] - cr.y.block(k)[0]).abs() < 1e-12);
                cr_norm2 += cr.x.block(k)[0].powi(2) + cr.y.block(k)[0].powi(2);
                g_norm2 += g.x.block(k).iter().chain(g.y.block(k)).map(|c| c * c).sum::<f64>();
            }
            assert!(cr_norm2.sqrt() <= g_norm2.sqrt() + 1e-12);
        }
    }
}

#[test]
fn gradient_of_projections_is_projection_of_gradient() {
    let mesh = uniform_square_mesh(6, Diagonal::Ne).unwrap();
    for degree in 0..=2 {
        let u = element_l2_project_with(&mesh, degree, cosine, 20).unwrap();
        let t = face_l2_project_with(&mesh, degree, cosine, 20).unwrap();
        let g = discrete_gradient(&mesh, &u, &t).unwrap();
        let gx = element_l2_project_with(&mesh, degree, |p| cosine_grad(p).x, 20).unwrap();
        let gy = element_l2_project_with(&mesh, degree, |p| cosine_grad(p).y, 20).unwrap();
        assert!(rel_diff(g.x.coeffs(), gx.coeffs()) < 1e-10, "degree {degree}");
        assert!(rel_diff(g.y.coeffs(), gy.coeffs()) < 1e-10);
    }
}

/// `||grad_h v||^2` by quadrature of the broken gradient.
fn broken_gradient_norm2(mesh: &hdg_core::Mesh, u: &ElementField) -> f64 {
    let m = element_dofs(u.degree());
    let basis = ReferenceBasis::new(u.degree());
    let rule = QuadratureRule::triangle(2 * u.degree());
    let (mut values, mut grads) = (vec![0.0; m], vec![Point::zeros(); m]);
    let mut total = 0.0;
    for k in 0..mesh.num_elements() {
        let geo = ElementGeometry::new(mesh, k);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            geo.eval(&basis, *p, &mut values, &mut grads);
            let g: Point = grads.iter().zip(u.block(k)).map(|(g, c)| g * *c).sum();
            total += w * 2.0 * geo.area * g.norm_squared();
        }
    }
    total
}

#[test]
fn broken_gradient_is_controlled_by_the_hdg_seminorm() {
    let mut rng = rng(5);
    let mesh = uniform_square_mesh(4, Diagonal::Ne).unwrap();
    let h = mesh.h_grid();
    let mut worst: f64 = 0.0;
    for degree in 1..=2 {
        for _ in 0..50 {
            let u = random_element_field(&mut rng, &mesh, degree);
            let t = random_face_field(&mut rng, &mesh, degree);
            let s = seminorms(&mesh, &u, &t).unwrap();
            let ratio = h * broken_gradient_norm2(&mesh, &u) / (h * s.gnorm * s.gnorm + s.jump * s.jump);
            assert!(ratio.is_finite());
            worst = worst.max(ratio);
        }
    }
    println!("max h|grad v|^2 / (h|G|^2 + jump^2) = {worst:.3}");
    assert!(worst <= 1e3);
}

#[test]
fn seminorms_of_a_linear_function() {
    let mesh = uniform_square_mesh(4, Diagonal::Nw).unwrap();
    for degree in 0..=2 {
        let u = element_l2_project(&mesh, degree, |p| p.x).unwrap();
        let t = face_l2_project(&mesh, degree, |p| p.x).unwrap();
        let s = seminorms(&mesh, &u, &t).unwrap();
        if degree > 0 {
            assert!(s.jump < 1e-12);
        }
        assert!((s.gnorm - 1.0).abs() < 1e-12);
        assert!((s.uh_norm.powi(2) - s.jump.powi(2) - s.gnorm.powi(2)).abs() < 1e-12);
    }
}

#[test]
fn jump_of_projections_decays_like_sqrt_h() {
    let jumps: Vec<f64> = [8, 16, 32, 64]
        .iter()
        .map(|&n| {
            let mesh = uniform_square_mesh(n, Diagonal::Ne).unwrap();
            let u = element_l2_project_with(&mesh, 0, cosine, 10).unwrap();
            let t = face_l2_project_with(&mesh, 0, cosine, 10).unwrap();
            seminorms(&mesh, &u, &t).unwrap().jump
        })
        .collect();
    for w in jumps.windows(2) {
        assert!(w[0] / w[1] >= 1.3, "{jumps:?}");
    }
}
