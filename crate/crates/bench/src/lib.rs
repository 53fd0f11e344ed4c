//! Shared fixtures for the benchmarks.

use hdg_core::hdg::ProblemSpec;
use hdg_core::mesh::uniform_square_mesh;
use hdg_core::{Diagonal, Mesh};

/// Square mesh with the default diagonal.
pub fn square(n: usize) -> Mesh {
    uniform_square_mesh(n, Diagonal::Ne).expect("valid mesh size")
}

/// Poisson problem with a smooth cosine solution.
pub fn cosine_problem(degree: usize) -> ProblemSpec {
    use std::f64::consts::PI;
    ProblemSpec::poisson(
        |p| 8.0 * PI * PI * (2.0 * PI * p.x).cos() * (2.0 * PI * p.y).cos(),
        |p| (2.0 * PI * p.x).cos() * (2.0 * PI * p.y).cos(),
        |_| 0.0,
        degree,
    )
}
