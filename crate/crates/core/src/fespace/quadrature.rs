//! Gauss rules on `[0, 1]` and collapsed (Duffy) product rules on the
//! reference triangle with vertices `(0,0)`, `(1,0)`, `(0,1)`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// Polynomial degree integrated exactly.
    pub degree: usize,
}

impl QuadratureRule {
    /// Rule on the reference triangle (area 1/2) exact for total degree
    /// `degree`.
    pub fn triangle(degree: usize) -> Self {
        // x = s, y = t (1 - s), dA = (1 - s) ds dt; a monomial of total degree p
        // becomes a polynomial of degree p + 1 in s and p in t
        let ns = (degree + 2).div_ceil(2);
        let nt = (degree + 1).div_ceil(2).max(1);
        let (s_nodes, s_weights) = gauss_legendre_unit(ns);
        let (t_nodes, t_weights) = gauss_legendre_unit(nt);
        let mut points = Vec::with_capacity(ns * nt);
        let mut weights = Vec::with_capacity(ns * nt);
        for (s, ws) in s_nodes.iter().zip(&s_weights) {
            for (t, wt) in t_nodes.iter().zip(&t_weights) {
                points.push([*s, t * (1.0 - s)]);
                weights.push(ws * wt * (1.0 - s));
            }
        }
        Self {
            points,
            weights,
            degree,
        }
    }

    /// Gauss-Legendre rule on `[0, 1]` (stored in the first coordinate)
    /// exact for degree `degree`.
    pub fn edge(degree: usize) -> Self {
        let n = (degree + 1).div_ceil(2).max(1);
        let (nodes, weights) = gauss_legendre_unit(n);
        Self {
            points: nodes.into_iter().map(|t| [t, 0.0]).collect(),
            weights,
            degree,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.into_iter().map(|x| 0.5 * (x + 1.0)).collect(),
        w.into_iter().map(|w| 0.5 * w).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    #[test]
    fn weights_sum_to_reference_measure() {
        for degree in 0..=20 {
            let tri: f64 = QuadratureRule::triangle(degree).weights.iter().sum();
            let edge: f64 = QuadratureRule::edge(degree).weights.iter().sum();
            assert!((tri - 0.5).abs() < 1e-14, "degree {degree}: {tri}");
            assert!((edge - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn triangle_monomials_are_exact() {
        for degree in 0..=16 {
            let rule = QuadratureRule::triangle(degree);
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    let approx: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    assert!((approx - exact).abs() < 1e-12, "x^{a} y^{b} at degree {degree}");
                }
            }
        }
    }

    #[test]
    fn edge_monomials_are_exact() {
        for degree in 0..=20 {
            let rule = QuadratureRule::edge(degree);
            for a in 0..=degree as i32 {
                let approx: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * p[0].powi(a)).sum();
                assert!((approx - 1.0 / (a as f64 + 1.0)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn points_lie_inside_reference_triangle() {
        let rule = QuadratureRule::triangle(10);
        assert!(rule.points.iter().all(|p| p[0] > 0.0 && p[1] > 0.0 && p[0] + p[1] < 1.0));
        assert!(rule.weights.iter().all(|w| *w > 0.0));
    }
}
