//! The hybridized discontinuous Galerkin scheme.
//!
//! Unknowns are the element values `u_h`, the flux `p_h ~ A grad u` and the
//! skeleton trace `u_hat_h`. The scheme is written through the discrete
//! gradient `G_h`:
//!
//! ```text
//! tau <u_h - u_hat_h, v_h - v_hat_h> + (p_h, G_h(v_h, v_hat_h)) = (f, v_h) + <g, v_hat_h>_Gamma1
//! (A^-1 p_h, q_h) - (G_h(u_h, u_hat_h), q_h) = 0
//! u_hat_h = Pi(u0) on Gamma0
//! ```
//!
//! Element unknowns are eliminated locally, leaving a symmetric positive
//! definite system for the free trace dofs.

mod assemble;
mod local;
mod problem;
mod solve;

pub use assemble::{assemble_condensed, assemble_full_saddle, CondensedSystem, SaddleSystem};
pub use problem::{ProblemSpec, ScalarFn, TensorFn, WeightMode, WeightScale};
pub use solve::{
    discrete_gradient, seminorms, solve, solve_full_saddle, solve_with, HdgState, LinearSolver, SeminormReport,
    SolveOptions,
};

pub(crate) use local::{gather_trace, ElementOperators};
