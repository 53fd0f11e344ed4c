//! Static condensation onto the skeleton and the uncondensed saddle-point
//! system used as its oracle.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::local::{gather_trace, ElementOperators};
use super::problem::{ellipticity, ProblemSpec};
use crate::error::{Error, Result};
use crate::fespace::{
    check_degree, edge_basis_values, element_dofs, face_dofs, face_l2_project_with, ElementGeometry, ElementField,
    ElementVectorField, FaceField, QuadratureRule, ReferenceBasis,
};
use crate::linalg::{DenseMatrix, LuFactors, SparseSym};
use crate::mesh::{BoundaryLabel, Mesh, Point};

/// Element system in the symmetric form
///
/// ```text
/// [ -M_A   B_u  ] [p]   [ B_t  ]         [0]
/// [ B_u^T  S_uu ] [u] + [ S_ut ] u_hat = [F]
/// ```
///
/// with the trace rows `W^T [p; u] + S_tt u_hat = <g, v_hat>`.
pub(crate) struct LocalSystem {
    pub interior: DMatrix<f64>,
    pub coupling: DMatrix<f64>,
    pub trace_trace: DMatrix<f64>,
    pub load: DVector<f64>,
    pub ellipticity: (f64, f64),
}

pub(crate) fn local_system(spec: &ProblemSpec, mesh: &Mesh, k: usize, ops: &ElementOperators) -> Result<LocalSystem> {
    let (m, r) = (ops.m, ops.r);
    let degree = spec.degree;
    let basis = ReferenceBasis::new(degree);
    let geo = ElementGeometry::new(mesh, k);
    let rule = QuadratureRule::triangle(spec.volume_quadrature_degree());
    let jac = 2.0 * geo.area;

    let mut mass_a = DMatrix::zeros(2 * m, 2 * m);
    let mut load = DVector::zeros(3 * m);
    let mut values = vec![0.0; m];
    let mut bounds = (f64::INFINITY, 0.0f64);
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let x = geo.to_physical(*p);
        let a = (spec.coefficient)(x);
        let (lo, hi) = ellipticity(&a).ok_or(Error::NotElliptic { element: k, x: x.x, y: x.y })?;
        bounds = (bounds.0.min(lo), bounds.1.max(hi));
        let a_inv = a.try_inverse().ok_or(Error::NotElliptic { element: k, x: x.x, y: x.y })?;
        geo.values(&basis, *p, &mut values);
        let wj = w * jac;
        let fx = (spec.load)(x) * wj;
        for a_idx in 0..m {
            load[2 * m + a_idx] += fx * values[a_idx];
            for b in 0..m {
                let vv = wj * values[a_idx] * values[b];
                for i in 0..2 {
                    for j in 0..2 {
                        mass_a[(i * m + a_idx, j * m + b)] += a_inv[(i, j)] * vv;
                    }
                }
            }
        }
    }

    let faces = mesh.element_faces(k);
    let tau = [spec.tau(mesh, faces[0]), spec.tau(mesh, faces[1]), spec.tau(mesh, faces[2])];
    let (suu, sut, stt) = ops.stabilization(tau);

    let mut interior = DMatrix::zeros(3 * m, 3 * m);
    interior.view_mut((0, 0), (2 * m, 2 * m)).copy_from(&(-mass_a));
    interior.view_mut((0, 2 * m), (2 * m, m)).copy_from(&ops.grad_u);
    interior.view_mut((2 * m, 0), (m, 2 * m)).copy_from(&ops.grad_u.transpose());
    interior.view_mut((2 * m, 2 * m), (m, m)).copy_from(&suu);

    let mut coupling = DMatrix::zeros(3 * m, 3 * r);
    coupling.view_mut((0, 0), (2 * m, 3 * r)).copy_from(&ops.grad_trace);
    coupling.view_mut((2 * m, 0), (m, 3 * r)).copy_from(&sut);

    Ok(LocalSystem {
        interior,
        coupling,
        trace_trace: stt,
        load,
        ellipticity: bounds,
    })
}

fn to_dense(m: &DMatrix<f64>) -> DenseMatrix {
    let n = m.nrows();
    let mut out = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = m[(i, j)];
        }
    }
    out
}

/// `<g, psi_c>` on every `Gamma1` face, in global trace numbering.
fn neumann_vector(spec: &ProblemSpec, mesh: &Mesh) -> Vec<f64> {
    let r = face_dofs(spec.degree);
    let rule = QuadratureRule::edge(spec.volume_quadrature_degree());
    let mut out = vec![0.0; mesh.num_faces() * r];
    let mut psi = [0.0; 3];
    for f in 0..mesh.num_faces() {
        if mesh.label(f) != Some(BoundaryLabel::Gamma1) {
            continue;
        }
        let (a, b) = mesh.face_endpoints(f);
        let sqrt_len = (b - a).norm().sqrt();
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let t = p[0];
            edge_basis_values(spec.degree, t, &mut psi);
            let g = (spec.neumann)(a + (b - a) * t) * w * sqrt_len;
            for c in 0..r {
                out[f * r + c] += g * psi[c];
            }
        }
    }
    out
}

/// Projection of the Dirichlet datum onto `Gamma0` faces; zero elsewhere.
pub(crate) fn dirichlet_trace(spec: &ProblemSpec, mesh: &Mesh) -> Result<FaceField> {
    let quad = spec.volume_quadrature_degree();
    let mut trace = face_l2_project_with(mesh, spec.degree, |x: Point| (spec.dirichlet)(x), quad)?;
    for f in 0..mesh.num_faces() {
        if mesh.label(f) != Some(BoundaryLabel::Gamma0) {
            trace.block_mut(f).iter_mut().for_each(|c| *c = 0.0);
        }
    }
    Ok(trace)
}

fn validate(spec: &ProblemSpec, mesh: &Mesh) -> Result<()> {
    check_degree(spec.degree)?;
    if mesh.count_label(BoundaryLabel::Gamma0) == 0 {
        return Err(Error::EmptyDirichletBoundary);
    }
    Ok(())
}

/// `[p; u] = particular - response * u_hat` on one element.
#[derive(Debug, Clone)]
pub(crate) struct LocalSolution {
    pub response: DMatrix<f64>,
    pub particular: DVector<f64>,
}

/// Symmetric positive definite trace system after elimination of the
/// element unknowns and the `Gamma0` trace dofs.
#[derive(Debug, Clone)]
pub struct CondensedSystem {
    pub matrix: SparseSym,
    pub rhs: Vec<f64>,
    /// Global trace dof (`face * (k+1) + c`) of every free unknown.
    pub free_dofs: Vec<usize>,
    /// Free index of every global trace dof; `None` on `Gamma0`.
    pub dof_to_free: Vec<Option<usize>>,
    /// Projected Dirichlet datum (zero off `Gamma0`).
    pub dirichlet: FaceField,
    /// Smallest and largest eigenvalue of `A` seen at quadrature points.
    pub ellipticity: (f64, f64),
    degree: usize,
    locals: Vec<LocalSolution>,
}

/// Condensed trace matrix, right-hand side and Dirichlet lift.
pub fn assemble_condensed(spec: &ProblemSpec, mesh: &Mesh) -> Result<CondensedSystem> {
    validate(spec, mesh)?;
    let degree = spec.degree;
    let (m, r) = (element_dofs(degree), face_dofs(degree));

    let dirichlet = dirichlet_trace(spec, mesh)?;
    let neumann = neumann_vector(spec, mesh);
    let mut dof_to_free = vec![None; mesh.num_faces() * r];
    let mut free_dofs = Vec::new();
    for f in 0..mesh.num_faces() {
        if mesh.label(f) == Some(BoundaryLabel::Gamma0) {
            continue;
        }
        for c in 0..r {
            dof_to_free[f * r + c] = Some(free_dofs.len());
            free_dofs.push(f * r + c);
        }
    }

    struct Condensed {
        matrix: DMatrix<f64>,
        rhs: DVector<f64>,
        solution: LocalSolution,
        ellipticity: (f64, f64),
    }

    let locals: Vec<Condensed> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|k| -> Result<Condensed> {
            let ops = ElementOperators::new(mesh, k, degree);
            let sys = local_system(spec, mesh, k, &ops)?;
            let lu: LuFactors = to_dense(&sys.interior)
                .lu()
                .map_err(|_| Error::SingularElement { element: k })?;
            let mut response = DMatrix::zeros(3 * m, 3 * r);
            for j in 0..3 * r {
                let col: Vec<f64> = sys.coupling.column(j).iter().copied().collect();
                response.set_column(j, &DVector::from_vec(lu.solve(&col)));
            }
            let particular = DVector::from_vec(lu.solve(sys.load.as_slice()));
            let wt = sys.coupling.transpose();
            Ok(Condensed {
                matrix: &sys.trace_trace - &wt * &response,
                rhs: -(&wt * &particular),
                solution: LocalSolution { response, particular },
                ellipticity: sys.ellipticity,
            })
        })
        .collect::<Result<_>>()?;

    let n_free = free_dofs.len();
    let mut rhs = vec![0.0; n_free];
    for (g, &free) in dof_to_free.iter().enumerate() {
        if let Some(i) = free {
            rhs[i] += neumann[g];
        }
    }
    let mut triplets = Vec::with_capacity(mesh.num_elements() * 9 * r * r);
    let mut bounds = (f64::INFINITY, 0.0f64);
    for (k, local) in locals.iter().enumerate() {
        bounds = (bounds.0.min(local.ellipticity.0), bounds.1.max(local.ellipticity.1));
        let global: Vec<usize> = mesh
            .element_faces(k)
            .iter()
            .flat_map(|&f| (0..r).map(move |c| f * r + c))
            .collect();
        for (i, &gi) in global.iter().enumerate() {
            let Some(fi) = dof_to_free[gi] else { continue };
            rhs[fi] += local.rhs[i];
            for (j, &gj) in global.iter().enumerate() {
                match dof_to_free[gj] {
                    Some(fj) => triplets.push((fi, fj, local.matrix[(i, j)])),
                    None => rhs[fi] -= local.matrix[(i, j)] * dirichlet.coeffs()[gj],
                }
            }
        }
    }
    let matrix = SparseSym::from_triplets(n_free, &triplets)?.into_symmetric(1e-10)?;
    Ok(CondensedSystem {
        matrix,
        rhs,
        free_dofs,
        dof_to_free,
        dirichlet,
        ellipticity: bounds,
        degree,
        locals: locals.into_iter().map(|c| c.solution).collect(),
    })
}

impl CondensedSystem {
    pub fn num_free(&self) -> usize {
        self.free_dofs.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Full trace from the free unknowns plus the Dirichlet lift.
    pub fn trace_from_free(&self, free: &[f64]) -> Result<FaceField> {
        if free.len() != self.num_free() {
            return Err(Error::DimensionMismatch(format!(
                "{} free values for {} unknowns",
                free.len(),
                self.num_free()
            )));
        }
        let mut trace = self.dirichlet.clone();
        for (&g, v) in self.free_dofs.iter().zip(free) {
            trace.coeffs_mut()[g] = *v;
        }
        Ok(trace)
    }

    /// Element unknowns `(u_h, p_h)` recovered from a full trace.
    pub fn back_substitute(&self, mesh: &Mesh, trace: &FaceField) -> (ElementField, ElementVectorField) {
        let degree = self.degree;
        let (m, r) = (element_dofs(degree), face_dofs(degree));
        let mut u = ElementField::zeros(mesh, degree);
        let mut p = ElementVectorField::zeros(mesh, degree);
        for (k, local) in self.locals.iter().enumerate() {
            let t = DVector::from_vec(gather_trace(mesh, k, r, trace.coeffs()));
            let x = &local.particular - &local.response * t;
            p.x.block_mut(k).copy_from_slice(&x.as_slice()[..m]);
            p.y.block_mut(k).copy_from_slice(&x.as_slice()[m..2 * m]);
            u.block_mut(k).copy_from_slice(&x.as_slice()[2 * m..]);
        }
        (u, p)
    }
}

/// Uncondensed symmetric indefinite system over all `(p, u, u_hat)` dofs.
///
/// Unknowns are ordered element by element as `[p_x, p_y, u]`, followed by
/// all trace dofs. `Gamma0` trace rows and columns are replaced by identity
/// rows carrying the projected Dirichlet values.
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub matrix: SparseSym,
    pub rhs: Vec<f64>,
    degree: usize,
}

pub fn assemble_full_saddle(spec: &ProblemSpec, mesh: &Mesh) -> Result<SaddleSystem> {
    validate(spec, mesh)?;
    let degree = spec.degree;
    let (m, r) = (element_dofs(degree), face_dofs(degree));
    let ne = mesh.num_elements();
    let trace_offset = 3 * m * ne;
    let n = trace_offset + r * mesh.num_faces();

    let dirichlet = dirichlet_trace(spec, mesh)?;
    let neumann = neumann_vector(spec, mesh);
    let fixed: Vec<bool> = (0..mesh.num_faces() * r)
        .map(|g| mesh.label(g / r) == Some(BoundaryLabel::Gamma0))
        .collect();

    let mut rhs = vec![0.0; n];
    for (g, v) in neumann.iter().enumerate() {
        rhs[trace_offset + g] += v;
    }
    let mut triplets = Vec::new();
    // couples (row, col) with Dirichlet elimination of trace columns
    let mut push = |row: usize, col: usize, v: f64, rhs: &mut Vec<f64>| {
        let row_fixed = row >= trace_offset && fixed[row - trace_offset];
        let col_fixed = col >= trace_offset && fixed[col - trace_offset];
        match (row_fixed, col_fixed) {
            (true, _) => {}
            (false, true) => rhs[row] -= v * dirichlet.coeffs()[col - trace_offset],
            (false, false) => triplets.push((row, col, v)),
        }
    };
    for k in 0..ne {
        let ops = ElementOperators::new(mesh, k, degree);
        let sys = local_system(spec, mesh, k, &ops)?;
        let elem: Vec<usize> = (0..3 * m).map(|i| k * 3 * m + i).collect();
        let tr: Vec<usize> = mesh
            .element_faces(k)
            .iter()
            .flat_map(|&f| (0..r).map(move |c| trace_offset + f * r + c))
            .collect();
        for (i, &gi) in elem.iter().enumerate() {
            rhs[gi] += sys.load[i];
            for (j, &gj) in elem.iter().enumerate() {
                push(gi, gj, sys.interior[(i, j)], &mut rhs);
            }
            for (j, &gj) in tr.iter().enumerate() {
                push(gi, gj, sys.coupling[(i, j)], &mut rhs);
                push(gj, gi, sys.coupling[(i, j)], &mut rhs);
            }
        }
        for (i, &gi) in tr.iter().enumerate() {
            for (j, &gj) in tr.iter().enumerate() {
                push(gi, gj, sys.trace_trace[(i, j)], &mut rhs);
            }
        }
    }
    for (g, &is_fixed) in fixed.iter().enumerate() {
        if is_fixed {
            triplets.push((trace_offset + g, trace_offset + g, 1.0));
            rhs[trace_offset + g] = dirichlet.coeffs()[g];
        }
    }
    let matrix = SparseSym::from_triplets(n, &triplets)?.into_symmetric(1e-10)?;
    Ok(SaddleSystem { matrix, rhs, degree })
}

impl SaddleSystem {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Dense LU solve, split back into `(u_h, u_hat_h, p_h)`.
    pub fn solve_dense(&self, mesh: &Mesh) -> Result<(ElementField, FaceField, ElementVectorField)> {
        let n = self.dim();
        let mut dense = DenseMatrix::zeros(n);
        for i in 0..n {
            for (j, v) in self.matrix.row(i) {
                dense[(i, j)] = v;
            }
        }
        let x = dense.lu()?.solve(&self.rhs);
        let (m, r) = (element_dofs(self.degree), face_dofs(self.degree));
        let ne = mesh.num_elements();
        let mut u = ElementField::zeros(mesh, self.degree);
        let mut p = ElementVectorField::zeros(mesh, self.degree);
        for k in 0..ne {
            let b = &x[k * 3 * m..(k + 1) * 3 * m];
            p.x.block_mut(k).copy_from_slice(&b[..m]);
            p.y.block_mut(k).copy_from_slice(&b[m..2 * m]);
            u.block_mut(k).copy_from_slice(&b[2 * m..]);
        }
        let trace = FaceField::from_coeffs(mesh, self.degree, x[3 * m * ne..].to_vec())?;
        debug_assert_eq!(trace.coeffs().len(), r * mesh.num_faces());
        Ok((u, trace, p))
    }
}
