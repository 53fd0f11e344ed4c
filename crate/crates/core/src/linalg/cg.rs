use super::{dot, norm2, SparseSym};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    Jacobi,
    None,
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Relative residual `||b - M x|| / ||b||`, recomputed from `x` on exit.
    pub residual: f64,
    pub converged: bool,
}

/// Preconditioned conjugate gradients for symmetric positive definite `m`.
///
/// Stops once the recurrence residual drops below `tol * ||b||` or after
/// `max_iter` iterations; the latter is reported through
/// [`CgOutcome::converged`]. A non-positive curvature `p^T M p` is reported
/// as [`Error::CgBreakdown`].
pub fn cg_solve(
    m: &SparseSym,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    preconditioner: Preconditioner,
) -> Result<CgOutcome> {
    let n = m.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for dimension {n}",
            b.len()
        )));
    }
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(CgOutcome {
            x: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
            converged: true,
        });
    }

    let inv_diag: Option<Vec<f64>> = match preconditioner {
        Preconditioner::None => None,
        Preconditioner::Jacobi => {
            let diag = m.diagonal();
            if let Some(i) = diag.iter().position(|d| !(*d > 0.0)) {
                return Err(Error::NonPositiveDiagonal { index: i });
            }
            Some(diag.iter().map(|d| 1.0 / d).collect())
        }
    };
    let apply_precond = |r: &[f64], z: &mut [f64]| match &inv_diag {
        Some(inv) => z.iter_mut().zip(r).zip(inv).for_each(|((z, r), d)| *z = r * d),
        None => z.copy_from_slice(r),
    };

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    apply_precond(&r, &mut z);
    let mut p = z.clone();
    let mut mp = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        m.matvec_into(&p, &mut mp);
        let curvature = dot(&p, &mp);
        if !(curvature > 0.0) {
            return Err(Error::CgBreakdown {
                iteration: iterations,
            });
        }
        let alpha = rz / curvature;
        x.iter_mut().zip(&p).for_each(|(x, p)| *x += alpha * p);
        r.iter_mut().zip(&mp).for_each(|(r, mp)| *r -= alpha * mp);
        iterations += 1;
        if norm2(&r) <= tol * b_norm {
            converged = true;
            break;
        }
        apply_precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }

    let mx = m.matvec(&x);
    let true_res: Vec<f64> = b.iter().zip(&mx).map(|(b, v)| b - v).collect();
    Ok(CgOutcome {
        residual: norm2(&true_res) / b_norm,
        x,
        iterations,
        converged,
    })
}
