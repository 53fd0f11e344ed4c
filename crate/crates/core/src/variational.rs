//! Minimization of discrete convex functionals over the HDG space.
//!
//! For an integrand `f(x, u, g)` the discrete functional is
//!
//! ```text
//! I_h(u_h, u_hat_h) = 1/2 <u_h - u_hat_h>^2 + int f(x, u_h, G_h(u_h, u_hat_h)) + int_Gamma1 g u_hat_h
//! ```
//!
//! with the trace fixed to the projected Dirichlet datum on `Gamma0`. The
//! unknowns are all element coefficients followed by the free trace
//! coefficients. For `f = 1/2 |g|^2 - F u` the stationarity condition is the
//! linear HDG scheme with unit weight and Neumann datum `-g`.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fespace::{
    check_degree, edge_basis_values, element_dofs, element_l2_project_with, face_dofs, face_l2_project_with,
    ElementField, ElementGeometry, ElementVectorField, FaceField, QuadratureRule, ReferenceBasis,
};
use crate::hdg::{gather_trace, ElementOperators, ScalarFn};
use crate::linalg::pairwise_sum;
use crate::mesh::{BoundaryLabel, Mesh, Point};

type ValueFn = Arc<dyn Fn(Point, f64, Point) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(Point, f64, Point) -> Point + Send + Sync>;

/// Integrand `f(x, u, g)` with its partial derivatives, assumed convex in `g`.
#[derive(Clone)]
pub struct Integrand {
    pub name: String,
    pub value: ValueFn,
    pub du: ValueFn,
    pub dg: VectorFn,
    /// Coercivity constant `a2` in `f(x, u, g) >= a2 |g|^2 - ...`; diagnostics only.
    pub coercivity: f64,
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("name", &self.name)
            .field("coercivity", &self.coercivity)
            .finish_non_exhaustive()
    }
}

impl Integrand {
    /// `1/2 |g|^2 - F(x) u`.
    pub fn quadratic(load: ScalarFn) -> Self {
        let (l1, l2) = (load.clone(), load);
        Self {
            name: "quadratic".into(),
            value: Arc::new(move |x, u, g| 0.5 * g.norm_squared() - l1(x) * u),
            du: Arc::new(move |x, _, _| -l2(x)),
            dg: Arc::new(|_, _, g| g),
            coercivity: 0.5,
        }
    }

    /// `1/2 g.A(x)g - F(x) u` for a symmetric positive definite `A`.
    pub fn quadratic_with_coefficient(
        coefficient: Arc<dyn Fn(Point) -> Matrix2<f64> + Send + Sync>,
        load: ScalarFn,
    ) -> Self {
        let (a1, a2) = (coefficient.clone(), coefficient);
        let (l1, l2) = (load.clone(), load);
        Self {
            name: "quadratic".into(),
            value: Arc::new(move |x, u, g| 0.5 * g.dot(&(a1(x) * g)) - l1(x) * u),
            du: Arc::new(move |x, _, _| -l2(x)),
            dg: Arc::new(move |x, _, g| a2(x) * g),
            coercivity: 0.0,
        }
    }

    /// `1/2 |g|^2 + sqrt(1 + u^2) - F(x) u`.
    pub fn sqrt1pu2(load: ScalarFn) -> Self {
        let (l1, l2) = (load.clone(), load);
        Self {
            name: "sqrt1pu2".into(),
            value: Arc::new(move |x, u, g| 0.5 * g.norm_squared() + (1.0 + u * u).sqrt() - l1(x) * u),
            du: Arc::new(move |x, u, _| u / (1.0 + u * u).sqrt() - l2(x)),
            dg: Arc::new(|_, _, g| g),
            coercivity: 0.5,
        }
    }

    /// `f(mid) - (f(g1) + f(g2)) / 2` along the secant in `g`; positive values
    /// violate convexity.
    pub fn secant_defect(&self, x: Point, u: f64, g1: Point, g2: Point) -> f64 {
        let mid = (self.value)(x, u, 0.5 * (g1 + g2));
        mid - 0.5 * ((self.value)(x, u, g1) + (self.value)(x, u, g2))
    }
}

/// Boundary data and discretization choices of a minimization problem.
#[derive(Clone)]
pub struct VariationalProblem {
    pub integrand: Integrand,
    pub dirichlet: ScalarFn,
    /// Density of the linear boundary term on `Gamma1`.
    pub neumann: ScalarFn,
    pub degree: usize,
    /// Integrand quadrature degree; at least `2k + 4` is used.
    pub quadrature_degree: Option<usize>,
}

impl fmt::Debug for VariationalProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VariationalProblem")
            .field("integrand", &self.integrand)
            .field("degree", &self.degree)
            .field("quadrature_degree", &self.quadrature_degree)
            .finish_non_exhaustive()
    }
}

impl VariationalProblem {
    pub fn new(integrand: Integrand, dirichlet: ScalarFn, neumann: ScalarFn, degree: usize) -> Self {
        Self {
            integrand,
            dirichlet,
            neumann,
            degree,
            quadrature_degree: None,
        }
    }

    fn quad_degree(&self) -> usize {
        self.quadrature_degree.unwrap_or(0).max(2 * self.degree + 4)
    }
}

struct ElementData {
    ops: ElementOperators,
    points: Vec<Point>,
    weights: Vec<f64>,
    /// Basis values, one row per quadrature point.
    values: DMatrix<f64>,
}

/// Precomputed discrete functional on one mesh.
pub struct Functional<'a> {
    mesh: &'a Mesh,
    problem: VariationalProblem,
    m: usize,
    r: usize,
    elements: Vec<ElementData>,
    /// `<g, psi_c>` per global trace dof (zero off `Gamma1`).
    boundary: Vec<f64>,
    dirichlet: FaceField,
    free_dofs: Vec<usize>,
}

/// Value, gradient over the unknowns and the `U_h` seminorm parts.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub jump: f64,
    pub gnorm: f64,
}

struct Local {
    value: f64,
    jump2: f64,
    g2: f64,
    grad_u: DVector<f64>,
    grad_t: DVector<f64>,
}

impl<'a> Functional<'a> {
    pub fn new(mesh: &'a Mesh, problem: VariationalProblem) -> Result<Self> {
        let degree = problem.degree;
        check_degree(degree)?;
        if mesh.count_label(BoundaryLabel::Gamma0) == 0 {
            return Err(Error::EmptyDirichletBoundary);
        }
        let (m, r) = (element_dofs(degree), face_dofs(degree));
        let basis = ReferenceBasis::new(degree);
        let rule = QuadratureRule::triangle(problem.quad_degree());
        let elements = (0..mesh.num_elements())
            .into_par_iter()
            .map(|k| {
                let geo = ElementGeometry::new(mesh, k);
                let mut values = DMatrix::zeros(rule.len(), m);
                let mut row = vec![0.0; m];
                for (q, p) in rule.points.iter().enumerate() {
                    geo.values(&basis, *p, &mut row);
                    for a in 0..m {
                        values[(q, a)] = row[a];
                    }
                }
                ElementData {
                    ops: ElementOperators::new(mesh, k, degree),
                    points: rule.points.iter().map(|p| geo.to_physical(*p)).collect(),
                    weights: rule.weights.iter().map(|w| w * 2.0 * geo.area).collect(),
                    values,
                }
            })
            .collect();

        let edge_rule = QuadratureRule::edge(problem.quad_degree());
        let mut boundary = vec![0.0; mesh.num_faces() * r];
        let mut psi = [0.0; 3];
        for f in 0..mesh.num_faces() {
            if mesh.label(f) != Some(BoundaryLabel::Gamma1) {
                continue;
            }
            let (a, b) = mesh.face_endpoints(f);
            let sqrt_len = (b - a).norm().sqrt();
            for (p, w) in edge_rule.points.iter().zip(&edge_rule.weights) {
                edge_basis_values(degree, p[0], &mut psi);
                let g = (problem.neumann)(a + (b - a) * p[0]) * w * sqrt_len;
                for c in 0..r {
                    boundary[f * r + c] += g * psi[c];
                }
            }
        }

        let mut dirichlet = face_l2_project_with(mesh, degree, |x| (problem.dirichlet)(x), problem.quad_degree())?;
        let mut free_dofs = Vec::new();
        for f in 0..mesh.num_faces() {
            if mesh.label(f) == Some(BoundaryLabel::Gamma0) {
                continue;
            }
            dirichlet.block_mut(f).iter_mut().for_each(|c| *c = 0.0);
            free_dofs.extend((0..r).map(|c| f * r + c));
        }
        Ok(Self {
            mesh,
            problem,
            m,
            r,
            elements,
            boundary,
            dirichlet,
            free_dofs,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        self.mesh
    }

    pub fn degree(&self) -> usize {
        self.problem.degree
    }

    /// Number of unknowns: every element coefficient plus the free trace dofs.
    pub fn len(&self) -> usize {
        self.mesh.num_elements() * self.m + self.free_dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of element coefficients at the head of the unknown vector.
    pub fn num_element_dofs(&self) -> usize {
        self.mesh.num_elements() * self.m
    }

    /// Global trace dof of each free trace unknown.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free_dofs
    }

    /// Projections of the Dirichlet datum onto elements and faces, with the
    /// free part of the trace taken from the same projection.
    pub fn initial_state(&self) -> Result<Vec<f64>> {
        let q = self.problem.quad_degree();
        let u = element_l2_project_with(self.mesh, self.degree(), |x| (self.problem.dirichlet)(x), q)?;
        let t = face_l2_project_with(self.mesh, self.degree(), |x| (self.problem.dirichlet)(x), q)?;
        let mut x = u.coeffs().to_vec();
        x.extend(self.free_dofs.iter().map(|&g| t.coeffs()[g]));
        Ok(x)
    }

    /// Unknown vector of an `(u_h, u_hat_h)` pair; `Gamma0` trace values are dropped.
    pub fn pack(&self, u: &ElementField, trace: &FaceField) -> Result<Vec<f64>> {
        if u.degree() != self.degree()
            || trace.degree() != self.degree()
            || u.num_blocks() != self.mesh.num_elements()
            || trace.num_blocks() != self.mesh.num_faces()
        {
            return Err(Error::DimensionMismatch("state does not match the functional".into()));
        }
        let mut x = u.coeffs().to_vec();
        x.extend(self.free_dofs.iter().map(|&g| trace.coeffs()[g]));
        Ok(x)
    }

    /// Splits an unknown vector into `(u_h, u_hat_h)` with the Dirichlet lift.
    pub fn unpack(&self, x: &[f64]) -> Result<(ElementField, FaceField)> {
        self.check_len(x)?;
        let ne = self.num_element_dofs();
        let u = ElementField::from_coeffs(self.mesh, self.degree(), x[..ne].to_vec())?;
        let mut trace = self.dirichlet.clone();
        for (&g, v) in self.free_dofs.iter().zip(&x[ne..]) {
            trace.coeffs_mut()[g] = *v;
        }
        Ok((u, trace))
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::DimensionMismatch(format!("{} values for {} unknowns", x.len(), self.len())));
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.evaluate(x)?.value)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.evaluate(x)?.gradient)
    }

    /// Functional value and gradient in one element-parallel sweep.
    pub fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        let (u, trace) = self.unpack(x)?;
        let (m, r) = (self.m, self.r);
        let f = &self.problem.integrand;
        let locals: Vec<Local> = self
            .elements
            .par_iter()
            .enumerate()
            .map(|(k, data)| -> Result<Local> {
                let ops = &data.ops;
                let uk = DVector::from_column_slice(u.block(k));
                let tk = DVector::from_vec(gather_trace(self.mesh, k, r, trace.coeffs()));
                let g = ops.gradient(uk.as_slice(), tk.as_slice());
                let (gx, gy) = (g.rows(0, m), g.rows(m, m));
                let uq = &data.values * &uk;
                let gxq = &data.values * gx;
                let gyq = &data.values * gy;

                let mut terms = Vec::with_capacity(data.weights.len());
                let mut du = DVector::zeros(data.weights.len());
                let mut dgx = DVector::zeros(data.weights.len());
                let mut dgy = DVector::zeros(data.weights.len());
                for (q, (&p, &w)) in data.points.iter().zip(&data.weights).enumerate() {
                    let gq = Point::new(gxq[q], gyq[q]);
                    let v = (f.value)(p, uq[q], gq);
                    let d = (f.du)(p, uq[q], gq);
                    let dg = (f.dg)(p, uq[q], gq);
                    if !(v.is_finite() && d.is_finite() && dg.x.is_finite() && dg.y.is_finite()) {
                        return Err(Error::NonFinite { element: k, x: p.x, y: p.y });
                    }
                    terms.push(w * v);
                    du[q] = w * d;
                    dgx[q] = w * dg.x;
                    dgy[q] = w * dg.y;
                }
                // chain rule: dI/dG coefficients, then through the G_h maps
                let vt = data.values.transpose();
                let mut dg = DVector::zeros(2 * m);
                dg.rows_mut(0, m).copy_from(&(&vt * dgx));
                dg.rows_mut(m, m).copy_from(&(&vt * dgy));
                let mut grad_u = &vt * du + ops.grad_u.transpose() * &dg;
                let mut grad_t = ops.grad_trace.transpose() * &dg;

                // 1/2 sum_e <u - u_hat>^2_e with unit weight
                let (suu, sut, stt) = ops.stabilization([1.0; 3]);
                let su = &suu * &uk + &sut * &tk;
                let st = sut.transpose() * &uk + &stt * &tk;
                let jump2 = ops.jump_squared(uk.as_slice(), tk.as_slice(), [1.0; 3]);
                grad_u += &su;
                grad_t += &st;
                Ok(Local {
                    value: pairwise_sum(&terms) + 0.5 * jump2,
                    jump2,
                    g2: g.norm_squared(),
                    grad_u,
                    grad_t,
                })
            })
            .collect::<Result<_>>()?;

        let ne = self.num_element_dofs();
        let mut grad_trace = self.boundary.clone();
        let mut gradient = vec![0.0; self.len()];
        for (k, local) in locals.iter().enumerate() {
            gradient[k * m..(k + 1) * m].copy_from_slice(local.grad_u.as_slice());
            for (l, &face) in self.mesh.element_faces(k).iter().enumerate() {
                for c in 0..r {
                    grad_trace[face * r + c] += local.grad_t[l * r + c];
                }
            }
        }
        for (i, &g) in self.free_dofs.iter().enumerate() {
            gradient[ne + i] = grad_trace[g];
        }
        let boundary: Vec<f64> = self.boundary.iter().zip(trace.coeffs()).map(|(b, t)| b * t).collect();
        let values: Vec<f64> = locals.iter().map(|l| l.value).collect();
        let jumps: Vec<f64> = locals.iter().map(|l| l.jump2).collect();
        let gs: Vec<f64> = locals.iter().map(|l| l.g2).collect();
        Ok(Evaluation {
            value: pairwise_sum(&values) + pairwise_sum(&boundary),
            gradient,
            jump: pairwise_sum(&jumps).max(0.0).sqrt(),
            gnorm: pairwise_sum(&gs).max(0.0).sqrt(),
        })
    }
}

/// `I_h` at a state.
pub fn eval_functional(
    problem: &VariationalProblem,
    mesh: &Mesh,
    u: &ElementField,
    trace: &FaceField,
) -> Result<f64> {
    let functional = Functional::new(mesh, problem.clone())?;
    functional.value(&functional.pack(u, trace)?)
}

/// Gradient of `I_h` over the unknowns (element coefficients, then free traces).
pub fn gradient(problem: &VariationalProblem, mesh: &Mesh, u: &ElementField, trace: &FaceField) -> Result<Vec<f64>> {
    let functional = Functional::new(mesh, problem.clone())?;
    functional.gradient(&functional.pack(u, trace)?)
}

/// `I(u) = int f(x, u, grad u) + int_Gamma1 g u` for an analytic `u`.
pub fn continuous_functional<U, G>(
    problem: &VariationalProblem,
    mesh: &Mesh,
    u: U,
    grad: G,
    quad_degree: usize,
) -> f64
where
    U: Fn(Point) -> f64 + Sync,
    G: Fn(Point) -> Point + Sync,
{
    let rule = QuadratureRule::triangle(quad_degree);
    let f = &problem.integrand;
    let volume: Vec<f64> = (0..mesh.num_elements())
        .map(|k| {
            let geo = ElementGeometry::new(mesh, k);
            let terms: Vec<f64> = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(p, w)| {
                    let x = geo.to_physical(*p);
                    w * 2.0 * geo.area * (f.value)(x, u(x), grad(x))
                })
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    let edge = QuadratureRule::edge(quad_degree);
    let surface: Vec<f64> = (0..mesh.num_faces())
        .filter(|&e| mesh.label(e) == Some(BoundaryLabel::Gamma1))
        .map(|e| {
            let (a, b) = mesh.face_endpoints(e);
            let len = (b - a).norm();
            edge.points
                .iter()
                .zip(&edge.weights)
                .map(|(p, w)| {
                    let x = a + (b - a) * p[0];
                    w * len * (problem.neumann)(x) * u(x)
                })
                .sum()
        })
        .collect();
    pairwise_sum(&volume) + pairwise_sum(&surface)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    /// Exit when the Euclidean norm of the gradient drops to this value.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Number of stored curvature pairs; zero gives steepest descent.
    pub memory: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 100_000,
            memory: 10,
        }
    }
}

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-16;

/// Outcome of [`minimize`].
#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub u: ElementField,
    pub trace: FaceField,
    /// `G_h(u_h, u_hat_h)` at exit.
    pub discrete_gradient: ElementVectorField,
    pub objective: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every accepted step, starting with the initial state.
    pub objective_trace: Vec<f64>,
    pub jump: f64,
    pub gnorm: f64,
    pub initial_uh_norm: f64,
    /// Largest `U_h` seminorm seen along the iterates.
    pub max_uh_norm: f64,
    /// Smallest `I_h - 1/2 min(1/2, a2) ||.||^2_{U_h}` along the iterates.
    pub coercivity_margin: f64,
}

/// Compact JSON summary of a minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeReport {
    pub iterations: usize,
    /// At most 200 entries: every `stride`-th objective plus the last one.
    pub objective_trace: Vec<f64>,
    pub grad_norm: f64,
    pub jump: f64,
    pub gnorm: f64,
}

impl MinimizeResult {
    pub fn report(&self) -> MinimizeReport {
        let n = self.objective_trace.len();
        let stride = n.div_ceil(200).max(1);
        let mut trace: Vec<f64> = self.objective_trace.iter().step_by(stride).copied().collect();
        if (n - 1) % stride != 0 {
            trace.push(self.objective_trace[n - 1]);
        }
        MinimizeReport {
            iterations: self.iterations,
            objective_trace: trace,
            grad_norm: self.grad_norm,
            jump: self.jump,
            gnorm: self.gnorm,
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    crate::linalg::norm2(v)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    crate::linalg::dot(a, b)
}

/// Limited-memory BFGS direction `-H grad` from the stored pairs.
fn lbfgs_direction(grad: &[f64], pairs: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(pairs.len());
    for (s, y, rho) in pairs.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = pairs.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in pairs.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Descent from the projections of `u0` with a backtracking Armijo line
/// search (constant `1e-4`, halving). Directions come from limited-memory
/// BFGS and fall back to steepest descent when they fail to descend.
pub fn minimize(mesh: &Mesh, problem: &VariationalProblem, options: &MinimizeOptions) -> Result<MinimizeResult> {
    let functional = Functional::new(mesh, problem.clone())?;
    let x0 = functional.initial_state()?;
    minimize_from(&functional, x0, options)
}

/// [`minimize`] from a given unknown vector.
pub fn minimize_from(functional: &Functional<'_>, x0: Vec<f64>, options: &MinimizeOptions) -> Result<MinimizeResult> {
    let a = 0.5 * functional.problem.integrand.coercivity.min(0.5);
    let mut x = x0;
    let mut eval = functional.evaluate(&x)?;
    let mut objective_trace = vec![eval.value];
    let uh = |e: &Evaluation| (e.jump * e.jump + e.gnorm * e.gnorm).sqrt();
    let initial_uh_norm = uh(&eval);
    let mut max_uh_norm = initial_uh_norm;
    let mut margin = eval.value - a * initial_uh_norm * initial_uh_norm;
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0;

    while norm(&eval.gradient) > options.tolerance && iterations < options.max_iterations {
        let g = &eval.gradient;
        let mut dir = lbfgs_direction(g, &pairs);
        let mut slope = dot(g, &dir);
        let mut step = 1.0;
        if pairs.is_empty() || !(slope < 0.0) {
            pairs.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(g, g);
            step = (1.0 / norm(g)).min(1.0);
        }

        let (trial_x, trial) = loop {
            let trial_x: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
            let trial = functional.evaluate(&trial_x)?;
            let decrease = trial.value - eval.value;
            if decrease <= ARMIJO * step * slope {
                break (trial_x, trial);
            }
            // Near the minimizer the change in value drowns in rounding; the
            // slope at the trial point then decides (exact for quadratics).
            let noise = 1e-14 * eval.value.abs().max(1.0);
            if decrease.abs() <= noise && dot(&trial.gradient, &dir) <= (1.0 - 2.0 * ARMIJO) * -slope {
                break (trial_x, trial);
            }
            step *= 0.5;
            if step < MIN_STEP {
                return Err(Error::LineSearch { iteration: iterations, step });
            }
        };

        let s: Vec<f64> = trial_x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = trial.gradient.iter().zip(&eval.gradient).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if options.memory > 0 && sy > 1e-12 * norm(&s) * norm(&y) {
            if pairs.len() == options.memory {
                pairs.pop_front();
            }
            pairs.push_back((s, y, 1.0 / sy));
        }
        x = trial_x;
        eval = trial;
        iterations += 1;
        objective_trace.push(eval.value);
        let n = uh(&eval);
        max_uh_norm = max_uh_norm.max(n);
        margin = margin.min(eval.value - a * n * n);
    }

    let (u, trace) = functional.unpack(&x)?;
    let discrete_gradient = crate::hdg::discrete_gradient(functional.mesh, &u, &trace)?;
    let grad_norm = norm(&eval.gradient);
    Ok(MinimizeResult {
        u,
        trace,
        discrete_gradient,
        objective: eval.value,
        grad_norm,
        iterations,
        converged: grad_norm <= options.tolerance,
        objective_trace,
        jump: eval.jump,
        gnorm: eval.gnorm,
        initial_uh_norm,
        max_uh_norm,
        coercivity_margin: margin,
    })
}
