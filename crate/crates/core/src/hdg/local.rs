//! Element-local matrices of the HDG scheme.
//!
//! Local unknown layout: flux `[p_x (m), p_y (m)]`, scalar `u (m)`, and the
//! traces of the three local faces `[f0 (r), f1 (r), f2 (r)]`, with
//! `m = dim P_k(K)` and `r = dim P_k(e)`.

use nalgebra::{DMatrix, DVector};

use crate::fespace::{edge_basis_values, element_dofs, face_dofs, ElementGeometry, QuadratureRule, ReferenceBasis};
use crate::mesh::{Mesh, Point};

/// Matrices of the discrete gradient and of the face pairings on one element.
#[derive(Debug, Clone)]
pub(crate) struct ElementOperators {
    pub m: usize,
    pub r: usize,
    /// `(G(u, 0), q)` coefficients: `2m x m`.
    pub grad_u: DMatrix<f64>,
    /// `(G(0, u_hat), q)` coefficients: `2m x 3r`.
    pub grad_trace: DMatrix<f64>,
    /// Per local face: `<phi_a, phi_b>_e` (`m x m`).
    pub face_uu: [DMatrix<f64>; 3],
    /// Per local face: `<phi_a, psi_c>_e` (`m x r`).
    pub face_ut: [DMatrix<f64>; 3],
    /// Per local face: `<psi_c, psi_d>_e` (`r x r`).
    pub face_tt: [DMatrix<f64>; 3],
    /// Per local face: element basis at the edge nodes, scaled by the square
    /// root of the weights (`nq x m`).
    face_u_nodes: [DMatrix<f64>; 3],
    /// Same for the face basis (`nq x r`).
    face_t_nodes: [DMatrix<f64>; 3],
}

impl ElementOperators {
    pub fn new(mesh: &Mesh, k: usize, degree: usize) -> Self {
        let basis = ReferenceBasis::new(degree);
        let m = element_dofs(degree);
        let r = face_dofs(degree);
        let geo = ElementGeometry::new(mesh, k);
        let mut grad_u = DMatrix::zeros(2 * m, m);
        let mut grad_trace = DMatrix::zeros(2 * m, 3 * r);
        let mut values = vec![0.0; m];
        let mut grads = vec![Point::zeros(); m];

        // volume part: (d_j phi_a, phi_b)
        let rule = QuadratureRule::triangle(2 * degree);
        let jac = 2.0 * geo.area;
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            geo.eval(&basis, *p, &mut values, &mut grads);
            let wj = w * jac;
            for a in 0..m {
                for b in 0..m {
                    grad_u[(b, a)] += wj * grads[a].x * values[b];
                    grad_u[(m + b, a)] += wj * grads[a].y * values[b];
                }
            }
        }

        let edge_rule = QuadratureRule::edge(2 * degree + 2);
        let faces = mesh.element_faces(k);
        let mut psi = [0.0; 3];
        let face_uu: [DMatrix<f64>; 3] = std::array::from_fn(|_| DMatrix::zeros(m, m));
        let face_ut: [DMatrix<f64>; 3] = std::array::from_fn(|_| DMatrix::zeros(m, r));
        let face_tt: [DMatrix<f64>; 3] = std::array::from_fn(|_| DMatrix::zeros(r, r));
        let (mut face_uu, mut face_ut, mut face_tt) = (face_uu, face_ut, face_tt);
        let nq = edge_rule.len();
        let mut face_u_nodes: [DMatrix<f64>; 3] = std::array::from_fn(|_| DMatrix::zeros(nq, m));
        let mut face_t_nodes: [DMatrix<f64>; 3] = std::array::from_fn(|_| DMatrix::zeros(nq, r));
        for local in 0..3 {
            let f = faces[local];
            let n = mesh.outward_normal(k, local);
            let (a_pt, b_pt) = mesh.face_endpoints(f);
            let len = (b_pt - a_pt).norm();
            let psi_scale = 1.0 / len.sqrt();
            for (q, (p, w)) in edge_rule.points.iter().zip(&edge_rule.weights).enumerate() {
                let t = p[0];
                let x = a_pt + (b_pt - a_pt) * t;
                geo.values(&basis, geo.to_reference(x), &mut values);
                edge_basis_values(degree, t, &mut psi);
                let wl = w * len;
                let sw = wl.sqrt();
                for a in 0..m {
                    face_u_nodes[local][(q, a)] = sw * values[a];
                }
                for c in 0..r {
                    face_t_nodes[local][(q, c)] = sw * psi[c] * psi_scale;
                }
                for a in 0..m {
                    for b in 0..m {
                        let vv = wl * values[a] * values[b];
                        face_uu[local][(a, b)] += vv;
                        // -<phi_a, q_b . n>
                        grad_u[(b, a)] -= vv * n.x;
                        grad_u[(m + b, a)] -= vv * n.y;
                    }
                    for c in 0..r {
                        let vt = wl * values[a] * psi[c] * psi_scale;
                        face_ut[local][(a, c)] += vt;
                        grad_trace[(a, local * r + c)] += vt * n.x;
                        grad_trace[(m + a, local * r + c)] += vt * n.y;
                    }
                }
                for c in 0..r {
                    for d in 0..r {
                        face_tt[local][(c, d)] += wl * psi[c] * psi[d] * psi_scale * psi_scale;
                    }
                }
            }
        }
        Self {
            m,
            r,
            grad_u,
            grad_trace,
            face_uu,
            face_ut,
            face_tt,
            face_u_nodes,
            face_t_nodes,
        }
    }

    /// Stabilization blocks `tau_e <u - u_hat, v - v_hat>` for the given
    /// per-face weights: `(S_uu, S_ut, S_tt)`.
    pub fn stabilization(&self, tau: [f64; 3]) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let (m, r) = (self.m, self.r);
        let mut suu = DMatrix::zeros(m, m);
        let mut sut = DMatrix::zeros(m, 3 * r);
        let mut stt = DMatrix::zeros(3 * r, 3 * r);
        for l in 0..3 {
            suu += &self.face_uu[l] * tau[l];
            sut.view_mut((0, l * r), (m, r)).copy_from(&(-&self.face_ut[l] * tau[l]));
            stt.view_mut((l * r, l * r), (r, r)).copy_from(&(&self.face_tt[l] * tau[l]));
        }
        (suu, sut, stt)
    }

    /// Discrete gradient coefficients `[g_x; g_y]` from local `u` and traces.
    pub fn gradient(&self, u: &[f64], trace: &[f64]) -> DVector<f64> {
        &self.grad_u * DVector::from_column_slice(u) + &self.grad_trace * DVector::from_column_slice(trace)
    }

    /// `sum_e tau_e ||u - u_hat||^2_e`, from the pointwise difference so that
    /// matching pairs give zero without cancellation.
    pub fn jump_squared(&self, u: &[f64], trace: &[f64], tau: [f64; 3]) -> f64 {
        let u = DVector::from_column_slice(u);
        (0..3)
            .map(|l| {
                let t = DVector::from_column_slice(&trace[l * self.r..(l + 1) * self.r]);
                let diff = &self.face_u_nodes[l] * &u - &self.face_t_nodes[l] * t;
                tau[l] * diff.norm_squared()
            })
            .sum()
    }
}

/// Gathers the local trace vector of element `k` from a global face vector.
pub(crate) fn gather_trace(mesh: &Mesh, k: usize, r: usize, global: &[f64]) -> Vec<f64> {
    mesh.element_faces(k)
        .iter()
        .flat_map(|&f| global[f * r..(f + 1) * r].iter().copied())
        .collect()
}
