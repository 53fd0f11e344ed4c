//! Named analytic expressions and the built-in problems assembled from them.
//!
//! Every scalar entry carries its exact gradient so that manufactured
//! solutions give exact flux errors without numerical differentiation.

use std::f64::consts::PI;
use std::sync::Arc;

use hdg_core::hdg::{ScalarFn, TensorFn};
use hdg_core::Point;
use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

pub type VectorFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;

/// Scalar expression with its gradient.
#[derive(Clone)]
pub struct Expression {
    pub value: ScalarFn,
    pub gradient: VectorFn,
}

fn expr<F, G>(value: F, gradient: G) -> Expression
where
    F: Fn(Point) -> f64 + Send + Sync + 'static,
    G: Fn(Point) -> Point + Send + Sync + 'static,
{
    Expression {
        value: Arc::new(value),
        gradient: Arc::new(gradient),
    }
}

pub const SCALAR_NAMES: [&str; 8] = ["zero", "one", "x", "y", "linear", "cosine", "cosine-load", "lshape-singular"];
pub const TENSOR_NAMES: [&str; 3] = ["identity", "anisotropic", "variable"];

/// Angle in `[0, 2 pi)` measured from the positive x axis.
fn angle(p: Point) -> f64 {
    let t = p.y.atan2(p.x);
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}

pub fn scalar(name: &str) -> Option<Expression> {
    let two_pi = 2.0 * PI;
    Some(match name {
        "zero" => expr(|_| 0.0, |_| Point::zeros()),
        "one" => expr(|_| 1.0, |_| Point::zeros()),
        "x" => expr(|p| p.x, |_| Point::new(1.0, 0.0)),
        "y" => expr(|p| p.y, |_| Point::new(0.0, 1.0)),
        "linear" => expr(|p| 1.0 + 2.0 * p.x - p.y, |_| Point::new(2.0, -1.0)),
        "cosine" => expr(
            move |p| (two_pi * p.x).cos() * (two_pi * p.y).cos(),
            move |p| {
                Point::new(
                    -two_pi * (two_pi * p.x).sin() * (two_pi * p.y).cos(),
                    -two_pi * (two_pi * p.x).cos() * (two_pi * p.y).sin(),
                )
            },
        ),
        "cosine-load" => {
            let c = 2.0 * two_pi * two_pi;
            expr(
                move |p| c * (two_pi * p.x).cos() * (two_pi * p.y).cos(),
                move |p| {
                    Point::new(
                        -c * two_pi * (two_pi * p.x).sin() * (two_pi * p.y).cos(),
                        -c * two_pi * (two_pi * p.x).cos() * (two_pi * p.y).sin(),
                    )
                },
            )
        }
        "lshape-singular" => expr(
            |p| p.norm().powf(2.0 / 3.0) * (2.0 * angle(p) / 3.0).sin(),
            |p| {
                let r = p.norm();
                if r == 0.0 {
                    return Point::zeros();
                }
                let t = angle(p) / 3.0;
                Point::new(-t.sin(), t.cos()) * (2.0 / 3.0 * r.powf(-1.0 / 3.0))
            },
        ),
        _ => return None,
    })
}

pub fn tensor(name: &str) -> Option<TensorFn> {
    Some(match name {
        "identity" => Arc::new(|_| Matrix2::identity()),
        "anisotropic" => Arc::new(|_| Matrix2::new(2.0, 0.5, 0.5, 1.0)),
        // inverse of a matrix with polynomial entries
        "variable" => Arc::new(|p: Point| {
            let c = 0.5 * p.x * p.y;
            let m = Matrix2::new(2.0 + p.x * p.x, c, c, 1.0 + p.y * p.y);
            m.try_inverse().unwrap_or_else(Matrix2::identity)
        }),
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Square,
    Lshape,
}

/// How boundary faces are split between Dirichlet and Neumann data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    /// Dirichlet on the bottom and top, Neumann on the sides.
    SidesNeumann,
    /// Dirichlet everywhere.
    Dirichlet,
}

/// Problem data by expression names; the JSON form of a custom problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemData {
    #[serde(default = "identity_name")]
    pub coefficient: String,
    pub load: String,
    pub dirichlet: String,
    #[serde(default = "zero_name")]
    pub neumann: String,
    /// Exact solution, used for error columns.
    #[serde(default)]
    pub exact: Option<String>,
    #[serde(default = "default_boundary")]
    pub boundary: BoundaryKind,
    #[serde(default = "default_domain")]
    pub domain: Domain,
}

fn identity_name() -> String {
    "identity".into()
}

fn zero_name() -> String {
    "zero".into()
}

fn default_boundary() -> BoundaryKind {
    BoundaryKind::SidesNeumann
}

fn default_domain() -> Domain {
    Domain::Square
}

/// Built-in problem: data by name plus study defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub data: ProblemData,
    pub degree: usize,
    pub n: Vec<usize>,
}

pub const PRESET_NAMES: [&str; 5] = ["paper-fig1", "zero", "linear-exact", "smooth-k1", "lshape-singular"];

fn data(load: &str, dirichlet: &str, exact: &str, boundary: BoundaryKind, domain: Domain) -> ProblemData {
    ProblemData {
        coefficient: identity_name(),
        load: load.into(),
        dirichlet: dirichlet.into(),
        neumann: zero_name(),
        exact: Some(exact.into()),
        boundary,
        domain,
    }
}

pub fn preset(name: &str) -> Option<Preset> {
    use BoundaryKind::*;
    let cosine = data("cosine-load", "cosine", "cosine", SidesNeumann, Domain::Square);
    Some(match name {
        "paper-fig1" => Preset {
            name: "paper-fig1",
            description: "u = cos(2 pi x) cos(2 pi y) on the unit square, Dirichlet top and bottom",
            data: cosine,
            degree: 0,
            n: vec![8, 16, 32, 64, 128],
        },
        "zero" => Preset {
            name: "zero",
            description: "homogeneous data, Dirichlet everywhere",
            data: data("zero", "zero", "zero", Dirichlet, Domain::Square),
            degree: 0,
            n: vec![4],
        },
        "linear-exact" => Preset {
            name: "linear-exact",
            description: "u = 1 + 2x - y, reproduced exactly for k >= 1",
            data: data("zero", "linear", "linear", Dirichlet, Domain::Square),
            degree: 1,
            n: vec![4],
        },
        "smooth-k1" => Preset {
            name: "smooth-k1",
            description: "the cosine problem with piecewise linears",
            data: cosine,
            degree: 1,
            n: vec![8, 16, 32, 64],
        },
        "lshape-singular" => Preset {
            name: "lshape-singular",
            description: "u = r^(2/3) sin(2 theta / 3) on the L-shaped domain, f = 0",
            data: data("zero", "lshape-singular", "lshape-singular", Dirichlet, Domain::Lshape),
            degree: 0,
            n: vec![4, 8, 16, 32],
        },
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_gradient(e: &Expression, p: Point) -> Point {
        let h = 1e-6;
        let dx = Point::new(h, 0.0);
        let dy = Point::new(0.0, h);
        Point::new(
            ((e.value)(p + dx) - (e.value)(p - dx)) / (2.0 * h),
            ((e.value)(p + dy) - (e.value)(p - dy)) / (2.0 * h),
        )
    }

    #[test]
    fn gradients_match_finite_differences() {
        let points = [Point::new(0.3, 0.7), Point::new(-0.4, 0.2), Point::new(-0.5, -0.6), Point::new(0.8, 0.1)];
        for name in SCALAR_NAMES {
            let e = scalar(name).unwrap();
            for p in points {
                let diff = (fd_gradient(&e, p) - (e.gradient)(p)).norm();
                assert!(diff < 1e-6 * (1.0 + (e.gradient)(p).norm()), "{name} at {p}");
            }
        }
    }

    #[test]
    fn singular_trace_vanishes_on_the_reentrant_edges() {
        let e = scalar("lshape-singular").unwrap();
        assert!((e.value)(Point::new(0.5, 0.0)).abs() < 1e-15);
        assert!((e.value)(Point::new(0.0, -0.5)).abs() < 1e-12);
        assert!((e.value)(Point::new(0.0, 0.5)) > 0.0);
    }

    #[test]
    fn every_preset_resolves() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            assert!(scalar(&p.data.load).is_some());
            assert!(scalar(&p.data.dirichlet).is_some());
            assert!(tensor(&p.data.coefficient).is_some());
        }
        assert!(preset("nope").is_none());
    }

    #[test]
    fn variable_tensor_is_symmetric_positive_definite() {
        let a = tensor("variable").unwrap();
        for p in [Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(0.3, 0.9)] {
            let m = a(p);
            assert!((m[(0, 1)] - m[(1, 0)]).abs() < 1e-15);
            assert!(m[(0, 0)] > 0.0 && m.determinant() > 0.0);
        }
    }
}
