use serde::{Deserialize, Serialize};

use super::assemble::{assemble_condensed, assemble_full_saddle};
use super::local::{gather_trace, ElementOperators};
use super::problem::ProblemSpec;
use crate::error::{Error, Result};
use crate::fespace::{element_dofs, face_dofs, l2_norm, ElementField, ElementVectorField, FaceField};
use crate::linalg::{cg_solve, DenseMatrix, Preconditioner};
use crate::mesh::Mesh;

/// Discrete solution `(u_h, u_hat_h, p_h)` with solver metadata.
#[derive(Debug, Clone)]
pub struct HdgState {
    pub u: ElementField,
    pub trace: FaceField,
    pub flux: ElementVectorField,
    pub iterations: usize,
    /// Relative residual of the condensed system.
    pub residual: f64,
    /// Number of free trace unknowns.
    pub dofs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearSolver {
    /// Jacobi-preconditioned conjugate gradients.
    #[default]
    Cg,
    /// Dense LU of the condensed matrix.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tolerance: f64,
    /// Defaults to ten times the number of unknowns.
    pub max_iterations: Option<usize>,
    pub solver: LinearSolver,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: None,
            solver: LinearSolver::Cg,
        }
    }
}

/// Condensed solve followed by element-wise back-substitution.
pub fn solve(spec: &ProblemSpec, mesh: &Mesh) -> Result<HdgState> {
    solve_with(spec, mesh, &SolveOptions::default())
}

pub fn solve_with(spec: &ProblemSpec, mesh: &Mesh, options: &SolveOptions) -> Result<HdgState> {
    let system = assemble_condensed(spec, mesh)?;
    let n = system.num_free();
    let (free, iterations, residual) = match options.solver {
        LinearSolver::Cg => {
            let max_iter = options.max_iterations.unwrap_or(10 * n.max(1));
            let out = cg_solve(&system.matrix, &system.rhs, options.tolerance, max_iter, Preconditioner::Jacobi)?;
            if !out.converged {
                return Err(Error::CgNotConverged {
                    iterations: out.iterations,
                    residual: out.residual,
                });
            }
            (out.x, out.iterations, out.residual)
        }
        LinearSolver::Direct => {
            let mut dense = DenseMatrix::zeros(n);
            for i in 0..n {
                for (j, v) in system.matrix.row(i) {
                    dense[(i, j)] = v;
                }
            }
            let x = if n == 0 { Vec::new() } else { dense.lu()?.solve(&system.rhs) };
            let mx = system.matrix.matvec(&x);
            let num: f64 = mx.iter().zip(&system.rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let den: f64 = system.rhs.iter().map(|b| b * b).sum::<f64>().sqrt();
            (x, 0, if den > 0.0 { num / den } else { num })
        }
    };
    let trace = system.trace_from_free(&free)?;
    let (u, flux) = system.back_substitute(mesh, &trace);
    Ok(HdgState {
        u,
        trace,
        flux,
        iterations,
        residual,
        dofs: n,
    })
}

/// Solves the uncondensed saddle-point system by dense LU.
pub fn solve_full_saddle(spec: &ProblemSpec, mesh: &Mesh) -> Result<HdgState> {
    let system = assemble_full_saddle(spec, mesh)?;
    let (u, trace, flux) = system.solve_dense(mesh)?;
    Ok(HdgState {
        u,
        trace,
        flux,
        iterations: 0,
        residual: 0.0,
        dofs: system.dim(),
    })
}

fn check_pair(u: &ElementField, trace: &FaceField, mesh: &Mesh) -> Result<()> {
    if u.degree() != trace.degree()
        || u.num_blocks() != mesh.num_elements()
        || trace.num_blocks() != mesh.num_faces()
    {
        return Err(Error::DimensionMismatch(format!(
            "element field (degree {}, {} blocks) and trace (degree {}, {} blocks) on a mesh with {} elements and {} faces",
            u.degree(),
            u.num_blocks(),
            trace.degree(),
            trace.num_blocks(),
            mesh.num_elements(),
            mesh.num_faces()
        )));
    }
    Ok(())
}

/// Discrete distributional gradient `G_h(u, u_hat)`: the degree-`k` field
/// with `(G, q) = (grad u, q) + <u_hat - u, q.n>` for all `q` in `P_k^2`.
pub fn discrete_gradient(mesh: &Mesh, u: &ElementField, trace: &FaceField) -> Result<ElementVectorField> {
    check_pair(u, trace, mesh)?;
    let degree = u.degree();
    let (m, r) = (element_dofs(degree), face_dofs(degree));
    let mut out = ElementVectorField::zeros(mesh, degree);
    for k in 0..mesh.num_elements() {
        let ops = ElementOperators::new(mesh, k, degree);
        let g = ops.gradient(u.block(k), &gather_trace(mesh, k, r, trace.coeffs()));
        out.x.block_mut(k).copy_from_slice(&g.as_slice()[..m]);
        out.y.block_mut(k).copy_from_slice(&g.as_slice()[m..]);
    }
    Ok(out)
}

/// `<u_h - u_hat_h>`, `||G_h(u_h, u_hat_h)||` and the resulting `U_h` norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub jump: f64,
    pub gnorm: f64,
    pub uh_norm: f64,
}

pub fn seminorms(mesh: &Mesh, u: &ElementField, trace: &FaceField) -> Result<SeminormReport> {
    check_pair(u, trace, mesh)?;
    let r = face_dofs(u.degree());
    let mut jump2 = Vec::with_capacity(mesh.num_elements());
    for k in 0..mesh.num_elements() {
        let ops = ElementOperators::new(mesh, k, u.degree());
        jump2.push(ops.jump_squared(u.block(k), &gather_trace(mesh, k, r, trace.coeffs()), [1.0; 3]));
    }
    let jump = crate::linalg::pairwise_sum(&jump2).max(0.0).sqrt();
    let g = discrete_gradient(mesh, u, trace)?;
    let gnorm = (l2_norm(&g.x).powi(2) + l2_norm(&g.y).powi(2)).sqrt();
    Ok(SeminormReport {
        jump,
        gnorm,
        uh_norm: (jump * jump + gnorm * gnorm).sqrt(),
    })
}

impl HdgState {
    pub fn seminorms(&self, mesh: &Mesh) -> Result<SeminormReport> {
        seminorms(mesh, &self.u, &self.trace)
    }

    pub fn discrete_gradient(&self, mesh: &Mesh) -> Result<ElementVectorField> {
        discrete_gradient(mesh, &self.u, &self.trace)
    }
}
