use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type TensorFn = Arc<dyn Fn(Point) -> Matrix2<f64> + Send + Sync>;

/// Scaling of the stabilization term `tau <u - u_hat, v - v_hat>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// `tau = 1`.
    #[default]
    Unit,
    /// `tau = 1 / h`.
    InvH,
    /// `tau = h`.
    H,
}

impl WeightMode {
    pub const ALL: [WeightMode; 3] = [WeightMode::Unit, WeightMode::InvH, WeightMode::H];

    pub fn tau(self, h: f64) -> f64 {
        match self {
            WeightMode::Unit => 1.0,
            WeightMode::InvH => 1.0 / h,
            WeightMode::H => h,
        }
    }
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::Unit => "unit",
            WeightMode::InvH => "invh",
            WeightMode::H => "h",
        })
    }
}

impl FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "unit" | "1" => Ok(WeightMode::Unit),
            "invh" | "1/h" => Ok(WeightMode::InvH),
            "h" => Ok(WeightMode::H),
            other => Err(Error::Parse(format!("unknown weight `{other}` (unit|invh|h)"))),
        }
    }
}

/// Which length `h` enters the h-scaled weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightScale {
    /// Nominal grid spacing of the whole mesh.
    #[default]
    Global,
    /// Length of each face.
    PerFace,
}

/// Data of `-div(A grad u) = f` with `u = u0` on `Gamma0` and
/// `A grad u . n = g` on `Gamma1`, plus discretization choices.
#[derive(Clone)]
pub struct ProblemSpec {
    pub coefficient: TensorFn,
    pub load: ScalarFn,
    pub dirichlet: ScalarFn,
    pub neumann: ScalarFn,
    pub degree: usize,
    pub weight: WeightMode,
    pub weight_scale: WeightScale,
    /// Volume quadrature degree for assembly; at least `2k + 2` is used.
    pub quadrature_degree: Option<usize>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("degree", &self.degree)
            .field("weight", &self.weight)
            .field("weight_scale", &self.weight_scale)
            .field("quadrature_degree", &self.quadrature_degree)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    /// Poisson problem (`A = I`) with the given data, unit weight.
    pub fn poisson<F, D, G>(load: F, dirichlet: D, neumann: G, degree: usize) -> Self
    where
        F: Fn(Point) -> f64 + Send + Sync + 'static,
        D: Fn(Point) -> f64 + Send + Sync + 'static,
        G: Fn(Point) -> f64 + Send + Sync + 'static,
    {
        Self {
            coefficient: Arc::new(|_| Matrix2::identity()),
            load: Arc::new(load),
            dirichlet: Arc::new(dirichlet),
            neumann: Arc::new(neumann),
            degree,
            weight: WeightMode::Unit,
            weight_scale: WeightScale::Global,
            quadrature_degree: None,
        }
    }

    pub fn with_coefficient<A>(mut self, coefficient: A) -> Self
    where
        A: Fn(Point) -> Matrix2<f64> + Send + Sync + 'static,
    {
        self.coefficient = Arc::new(coefficient);
        self
    }

    pub fn with_weight(mut self, weight: WeightMode) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_weight_scale(mut self, scale: WeightScale) -> Self {
        self.weight_scale = scale;
        self
    }

    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = degree;
        self
    }

    pub fn with_quadrature_degree(mut self, degree: usize) -> Self {
        self.quadrature_degree = Some(degree);
        self
    }

    pub(crate) fn volume_quadrature_degree(&self) -> usize {
        self.quadrature_degree.unwrap_or(0).max(2 * self.degree + 2)
    }

    /// Stabilization weight on face `f`.
    pub fn tau(&self, mesh: &Mesh, f: usize) -> f64 {
        match (self.weight, self.weight_scale) {
            (WeightMode::Unit, _) => 1.0,
            (w, WeightScale::Global) => w.tau(mesh.h_grid()),
            (w, WeightScale::PerFace) => w.tau(mesh.face_length(f)),
        }
    }
}

/// Ellipticity check of a 2x2 coefficient: symmetric with positive
/// eigenvalues. Returns the eigenvalue range.
pub(crate) fn ellipticity(a: &Matrix2<f64>) -> Option<(f64, f64)> {
    let scale = a.abs().max().max(f64::MIN_POSITIVE);
    if !a.iter().all(|v| v.is_finite()) || (a[(0, 1)] - a[(1, 0)]).abs() > 1e-12 * scale {
        return None;
    }
    let mean = 0.5 * (a[(0, 0)] + a[(1, 1)]);
    let diff = 0.5 * (a[(0, 0)] - a[(1, 1)]);
    let rad = (diff * diff + a[(0, 1)] * a[(0, 1)]).sqrt();
    let (lo, hi) = (mean - rad, mean + rad);
    (lo > 0.0).then_some((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights() {
        assert_eq!(WeightMode::Unit.tau(0.25), 1.0);
        assert_eq!(WeightMode::InvH.tau(0.25), 4.0);
        assert_eq!(WeightMode::H.tau(0.25), 0.25);
        for w in WeightMode::ALL {
            assert_eq!(w.to_string().parse::<WeightMode>().unwrap(), w);
        }
        assert!("2h".parse::<WeightMode>().is_err());
    }

    #[test]
    fn ellipticity_bounds() {
        let a = Matrix2::new(2.0, 1.0, 1.0, 2.0);
        let (lo, hi) = ellipticity(&a).unwrap();
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 3.0).abs() < 1e-15);
        assert!(ellipticity(&Matrix2::new(1.0, 2.0, 2.0, 1.0)).is_none());
        assert!(ellipticity(&Matrix2::new(1.0, 0.5, 0.0, 1.0)).is_none());
    }
}
