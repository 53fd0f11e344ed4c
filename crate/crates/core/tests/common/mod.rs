#![allow(dead_code)]

use std::f64::consts::PI;

use hdg_core::fespace::{element_dofs, face_dofs, ElementGeometry, QuadratureRule, ReferenceBasis};
use hdg_core::hdg::ProblemSpec;
use hdg_core::{Diagonal, ElementField, FaceField, Mesh, Point, WeightMode};
use nalgebra::Matrix2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cosine(p: Point) -> f64 {
    (2.0 * PI * p.x).cos() * (2.0 * PI * p.y).cos()
}

pub fn cosine_grad(p: Point) -> Point {
    let (cx, sx) = ((2.0 * PI * p.x).cos(), (2.0 * PI * p.x).sin());
    let (cy, sy) = ((2.0 * PI * p.y).cos(), (2.0 * PI * p.y).sin());
    Point::new(-2.0 * PI * sx * cy, -2.0 * PI * cx * sy)
}

/// Manufactured cosine problem on the unit square with zero side flux.
pub fn cosine_spec(degree: usize, weight: WeightMode) -> ProblemSpec {
    ProblemSpec::poisson(|p| 8.0 * PI * PI * cosine(p), cosine, |_| 0.0, degree).with_weight(weight)
}

pub fn random_element_field(rng: &mut ChaCha8Rng, mesh: &Mesh, degree: usize) -> ElementField {
    let n = mesh.num_elements() * element_dofs(degree);
    ElementField::from_coeffs(mesh, degree, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

pub fn random_face_field(rng: &mut ChaCha8Rng, mesh: &Mesh, degree: usize) -> FaceField {
    let n = mesh.num_faces() * face_dofs(degree);
    FaceField::from_coeffs(mesh, degree, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

/// Random symmetric positive definite constant matrix.
pub fn random_spd(rng: &mut ChaCha8Rng) -> Matrix2<f64> {
    let b = Matrix2::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    b.transpose() * b + Matrix2::identity() * 0.5
}

/// Random problem with polynomial data, variable coefficient and weight.
pub fn random_spec(rng: &mut ChaCha8Rng, degree: usize) -> ProblemSpec {
    let c: Vec<f64> = (0..10).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let a0 = random_spd(rng);
    let wiggle = rng.gen_range(0.0..0.5);
    let weight = WeightMode::ALL[rng.gen_range(0..3)];
    let (c1, c2, c3) = (c.clone(), c.clone(), c);
    ProblemSpec::poisson(
        move |p| c1[0] + c1[1] * p.x + c1[2] * p.y * p.y,
        move |p| c2[3] + c2[4] * p.x * p.y + c2[5] * (3.0 * p.x).sin(),
        move |p| c3[6] + c3[7] * p.y,
        degree,
    )
    .with_coefficient(move |p| a0 * (1.0 + wiggle * (p.x * p.y).sin()))
    .with_weight(weight)
}

pub fn random_diagonal(rng: &mut ChaCha8Rng) -> Diagonal {
    if rng.gen_bool(0.5) {
        Diagonal::Ne
    } else {
        Diagonal::Nw
    }
}

/// `(int_K grad v . q_b e_x, int_K grad v . q_b e_y)` plus the face terms
/// `<v_hat - v, q_b n>` for every basis `q_b`, by plain quadrature.
pub fn gradient_identity_rhs(mesh: &Mesh, u: &ElementField, trace: &FaceField, k: usize) -> Vec<f64> {
    let degree = u.degree();
    let m = element_dofs(degree);
    let basis = ReferenceBasis::new(degree);
    let geo = ElementGeometry::new(mesh, k);
    let mut values = vec![0.0; m];
    let mut grads = vec![Point::zeros(); m];
    let mut out = vec![0.0; 2 * m];
    let rule = QuadratureRule::triangle(2 * degree + 2);
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        geo.eval(&basis, *p, &mut values, &mut grads);
        let grad_v: Point = grads.iter().zip(u.block(k)).map(|(g, c)| g * *c).sum();
        for b in 0..m {
            out[b] += w * 2.0 * geo.area * grad_v.x * values[b];
            out[m + b] += w * 2.0 * geo.area * grad_v.y * values[b];
        }
    }
    let edge = QuadratureRule::edge(2 * degree + 4);
    for (local, &f) in mesh.element_faces(k).iter().enumerate() {
        let n = mesh.outward_normal(k, local);
        let (a, b) = mesh.face_endpoints(f);
        let len = (b - a).norm();
        for (p, w) in edge.points.iter().zip(&edge.weights) {
            let x = a + (b - a) * p[0];
            let diff = trace.evaluate(mesh, f, x).unwrap() - u.evaluate(mesh, k, x).unwrap();
            geo.values(&basis, geo.to_reference(x), &mut values);
            for c in 0..m {
                out[c] += w * len * diff * values[c] * n.x;
                out[m + c] += w * len * diff * values[c] * n.y;
            }
        }
    }
    out
}

/// Relative max-norm difference of two coefficient vectors.
pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}
