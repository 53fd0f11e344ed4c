mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::*;
use hdg_core::hdg::{solve, solve_with, LinearSolver, ProblemSpec, ScalarFn, SolveOptions};
use hdg_core::mesh::uniform_square_mesh;
use hdg_core::variational::{
    continuous_functional, minimize, Functional, Integrand, MinimizeOptions, VariationalProblem,
};
use hdg_core::{BoundaryLabel, Diagonal, Point, WeightMode};
use rand::Rng;

fn load() -> ScalarFn {
    Arc::new(|p| 8.0 * PI * PI * cosine(p))
}

fn zero() -> ScalarFn {
    Arc::new(|_| 0.0)
}

fn cosine_problem(degree: usize) -> VariationalProblem {
    VariationalProblem::new(Integrand::quadratic(load()), Arc::new(cosine), zero(), degree)
}

fn direct() -> SolveOptions {
    SolveOptions {
        solver: LinearSolver::Direct,
        ..SolveOptions::default()
    }
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = rng(31);
    let mesh = uniform_square_mesh(4, Diagonal::Ne).unwrap();
    let integrands = [
        Integrand::quadratic(load()),
        Integrand::sqrt1pu2(Arc::new(|p: Point| 1.0 + p.x)),
    ];
    for integrand in integrands {
        for degree in 0..=2 {
            let neumann: ScalarFn = Arc::new(|p: Point| 0.3 * p.y);
            let problem = VariationalProblem::new(integrand.clone(), Arc::new(cosine), neumann, degree);
            let functional = Functional::new(&mesh, problem).unwrap();
            let x: Vec<f64> = (0..functional.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let grad = functional.gradient(&x).unwrap();
            for _ in 0..20 {
                let d: Vec<f64> = (0..x.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let step = 1e-5;
                let shifted = |s: f64| -> Vec<f64> { x.iter().zip(&d).map(|(a, b)| a + s * b).collect() };
                let fd = (functional.value(&shifted(step)).unwrap() - functional.value(&shifted(-step)).unwrap())
                    / (2.0 * step);
                let exact: f64 = grad.iter().zip(&d).map(|(g, v)| g * v).sum();
                let rel = (fd - exact).abs() / exact.abs().max(1e-8);
                assert!(rel <= 1e-6, "{} k={degree}: {fd} vs {exact}", integrand.name);
            }
        }
    }
}

#[test]
fn integrands_are_convex_in_the_gradient() {
    let mut rng = rng(32);
    for integrand in [Integrand::quadratic(load()), Integrand::sqrt1pu2(load())] {
        for _ in 0..100 {
            let x = Point::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            let u = rng.gen_range(-5.0..5.0);
            let g1 = Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let g2 = Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            assert!(integrand.secant_defect(x, u, g1, g2) <= 1e-10);
        }
    }
}

#[test]
fn functional_at_linear_solution_is_the_quadratic_form_value() {
    let mesh = uniform_square_mesh(8, Diagonal::Ne).unwrap();
    for degree in 0..=1 {
        let functional = Functional::new(&mesh, cosine_problem(degree)).unwrap();
        let state = solve_with(&cosine_spec(degree, WeightMode::Unit).with_quadrature_degree(2 * degree + 4), &mesh, &direct()).unwrap();
        let x = functional.pack(&state.u, &state.trace).unwrap();
        // at x0 = 0 (plus the Dirichlet lift) the gradient is -b, and for a
        // quadratic I(x*) = I(x0) + x*.grad(x0) / 2 when grad(x*) = 0
        let x0 = vec![0.0; x.len()];
        let e0 = functional.evaluate(&x0).unwrap();
        let expected = e0.value + 0.5 * x.iter().zip(&e0.gradient).map(|(a, b)| a * b).sum::<f64>();
        let at_solution = functional.evaluate(&x).unwrap();
        assert!((at_solution.value - expected).abs() <= 1e-8 * expected.abs().max(1.0));
        let scale = e0.gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
        let residual = at_solution.gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
        assert!(residual <= 1e-8 * scale, "{residual:e} vs scale {scale:e}");
    }
}

#[test]
fn minimizer_of_quadratic_matches_linear_solve() {
    let mesh = uniform_square_mesh(8, Diagonal::Ne).unwrap();
    for degree in 0..=1 {
        let options = MinimizeOptions {
            tolerance: 1e-10,
            ..MinimizeOptions::default()
        };
        let result = minimize(&mesh, &cosine_problem(degree), &options).unwrap();
        assert!(result.converged);
        let state = solve_with(&cosine_spec(degree, WeightMode::Unit).with_quadrature_degree(2 * degree + 4), &mesh, &direct()).unwrap();
        let max_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(max_diff(result.u.coeffs(), state.u.coeffs()) <= 1e-6);
        assert!(max_diff(result.trace.coeffs(), state.trace.coeffs()) <= 1e-6);
        // A = I, so G_h should equal A^{-1} p_h = p_h
        assert!(max_diff(result.discrete_gradient.x.coeffs(), state.flux.x.coeffs()) <= 1e-6);
        assert!(max_diff(result.discrete_gradient.y.coeffs(), state.flux.y.coeffs()) <= 1e-6);
        assert!(result.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-13 * w[0].abs().max(1.0)));
    }
}

#[test]
fn neumann_term_enters_with_opposite_sign_to_the_linear_scheme() {
    let mut mesh = uniform_square_mesh(4, Diagonal::Nw).unwrap();
    mesh = mesh.with_boundary_partition(|p| if p.x == 0.0 { BoundaryLabel::Gamma0 } else { BoundaryLabel::Gamma1 }).unwrap();
    let g: ScalarFn = Arc::new(|p: Point| 1.0 + p.y);
    let problem = VariationalProblem::new(Integrand::quadratic(zero()), zero(), g, 0);
    let options = MinimizeOptions {
        tolerance: 1e-11,
        ..MinimizeOptions::default()
    };
    let result = minimize(&mesh, &problem, &options).unwrap();
    let spec = ProblemSpec::poisson(|_| 0.0, |_| 0.0, |p| -(1.0 + p.y), 0);
    let state = solve_with(&spec, &mesh, &direct()).unwrap();
    assert!(rel_diff(result.trace.coeffs(), state.trace.coeffs()) < 1e-7);
}

#[test]
fn smooth_nonquadratic_minimizer_beats_random_perturbations() {
    let mut rng = rng(33);
    let mesh = uniform_square_mesh(4, Diagonal::Ne).unwrap();
    let problem = VariationalProblem::new(Integrand::sqrt1pu2(Arc::new(|_| 1.0)), zero(), zero(), 0);
    let result = minimize(&mesh, &problem, &MinimizeOptions::default()).unwrap();
    assert!(result.grad_norm <= 1e-8);
    assert!(result.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-13 * w[0].abs().max(1.0)));
    let functional = Functional::new(&mesh, problem).unwrap();
    let x = functional.pack(&result.u, &result.trace).unwrap();
    for _ in 0..50 {
        let scale = 10f64.powf(rng.gen_range(-4.0..0.0));
        let y: Vec<f64> = x.iter().map(|v| v + scale * rng.gen_range(-1.0..1.0)).collect();
        assert!(result.objective <= functional.value(&y).unwrap());
    }
}

#[test]
fn iterates_stay_bounded_in_the_hdg_norm() {
    let mesh = uniform_square_mesh(8, Diagonal::Ne).unwrap();
    let problems = [
        cosine_problem(0),
        VariationalProblem::new(Integrand::sqrt1pu2(Arc::new(|_| 1.0)), Arc::new(|p: Point| p.x), zero(), 1),
    ];
    for problem in problems {
        let result = minimize(&mesh, &problem, &MinimizeOptions::default()).unwrap();
        assert!(result.initial_uh_norm > 0.0);
        assert!(result.max_uh_norm <= 10.0 * result.initial_uh_norm, "{result:?}");
        assert!(result.coercivity_margin.is_finite());
    }
}

#[test]
fn discrete_minimum_approaches_continuous_minimum() {
    let gaps: Vec<f64> = [4, 8, 16]
        .iter()
        .map(|&n| {
            let mesh = uniform_square_mesh(n, Diagonal::Ne).unwrap();
            let problem = cosine_problem(0);
            let result = minimize(&mesh, &problem, &MinimizeOptions::default()).unwrap();
            let exact = continuous_functional(&problem, &mesh, cosine, cosine_grad, 12);
            (result.objective - exact).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn linear_solution_agrees_with_minimizer_on_both_diagonals() {
    for diag in [Diagonal::Ne, Diagonal::Nw] {
        let mesh = uniform_square_mesh(4, diag).unwrap();
        let result = minimize(
            &mesh,
            &cosine_problem(1),
            &MinimizeOptions {
                tolerance: 1e-10,
                ..MinimizeOptions::default()
            },
        )
        .unwrap();
        let state = solve(&cosine_spec(1, WeightMode::Unit).with_quadrature_degree(6), &mesh).unwrap();
        assert!(rel_diff(result.u.coeffs(), state.u.coeffs()) < 1e-6);
    }
}
