//! Single solves, convergence studies and variational runs.

use std::sync::Arc;

use hdg_core::fespace::{l2_error, l2_error_vector, ERROR_QUADRATURE_DEGREE};
use hdg_core::hdg::{solve_with, HdgState, LinearSolver, ProblemSpec, ScalarFn, SolveOptions};
use hdg_core::mesh::{lshape_mesh, uniform_square_mesh};
use hdg_core::variational::{minimize, Integrand, MinimizeOptions, MinimizeReport, VariationalProblem};
use hdg_core::{BoundaryLabel, Mesh, Point, WeightMode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::StudyConfig;
use crate::error::CliError;
use crate::presets::{scalar, tensor, BoundaryKind, Domain, Expression, ProblemData};

/// Resolved problem: assembly data plus the exact solution if known.
#[derive(Clone)]
pub struct Resolved {
    pub data: ProblemData,
    pub spec: ProblemSpec,
    pub exact: Option<Expression>,
}

fn lookup(name: &str, path: &str) -> Result<Expression, CliError> {
    scalar(name).ok_or_else(|| CliError::config(path, format!("unknown expression `{name}`")))
}

pub fn resolve(config: &StudyConfig, weight: WeightMode) -> Result<Resolved, CliError> {
    let data = config.problem_data()?;
    let coefficient = tensor(&data.coefficient)
        .ok_or_else(|| CliError::config("problem.coefficient", format!("unknown coefficient `{}`", data.coefficient)))?;
    let mut spec = ProblemSpec {
        coefficient,
        load: lookup(&data.load, "problem.load")?.value,
        dirichlet: lookup(&data.dirichlet, "problem.dirichlet")?.value,
        neumann: lookup(&data.neumann, "problem.neumann")?.value,
        degree: config.degree(),
        weight,
        weight_scale: config.weight_scale,
        quadrature_degree: None,
    };
    if let Some(q) = config.quadrature.assembly {
        spec = spec.with_quadrature_degree(q);
    }
    let exact = data.exact.as_deref().map(|e| lookup(e, "problem.exact")).transpose()?;
    Ok(Resolved { data, spec, exact })
}

pub fn build_mesh(config: &StudyConfig, n: usize) -> Result<Mesh, CliError> {
    let data = config.problem_data()?;
    let mesh = match config.domain()? {
        Domain::Square => uniform_square_mesh(n, config.diagonal)?,
        Domain::Lshape => lshape_mesh(n)?,
    };
    Ok(match data.boundary {
        BoundaryKind::Dirichlet => mesh.with_boundary_partition(|_| BoundaryLabel::Gamma0)?,
        BoundaryKind::SidesNeumann if config.domain()? == Domain::Square => mesh,
        BoundaryKind::SidesNeumann => {
            return Err(CliError::config(
                "problem.boundary",
                "side Neumann data is only defined on the square",
            ))
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub u_l2: Option<f64>,
    pub p_l2: Option<f64>,
    pub jump: f64,
}

/// Solver report of one `(n, weight)` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n: usize,
    pub k: usize,
    pub weight: WeightMode,
    pub dofs: usize,
    pub iterations: usize,
    pub residual: f64,
    pub errors: ErrorReport,
}

/// Full outcome of one solve, for callers that need more than the report.
pub struct SolveRun {
    pub mesh: Mesh,
    pub state: HdgState,
    pub report: SolveReport,
    pub gnorm: f64,
}

pub fn solve_one(config: &StudyConfig, n: usize, weight: WeightMode) -> Result<SolveRun, CliError> {
    let resolved = resolve(config, weight)?;
    let mesh = build_mesh(config, n)?;
    let state = solve_with(&resolved.spec, &mesh, &SolveOptions::default())?;
    let seminorms = state.seminorms(&mesh)?;
    let q = config.quadrature.error.unwrap_or(ERROR_QUADRATURE_DEGREE);
    let (u_l2, p_l2) = match &resolved.exact {
        Some(exact) => {
            let a = resolved.spec.coefficient.clone();
            let grad = exact.gradient.clone();
            (
                Some(l2_error(&mesh, &state.u, |x| (exact.value)(x), q)),
                Some(l2_error_vector(&mesh, &state.flux, |x| a(x) * grad(x), q)),
            )
        }
        None => (None, None),
    };
    let report = SolveReport {
        n,
        k: resolved.spec.degree,
        weight,
        dofs: state.dofs,
        iterations: state.iterations,
        residual: state.residual,
        errors: ErrorReport {
            u_l2,
            p_l2,
            jump: seminorms.jump,
        },
    };
    Ok(SolveRun {
        mesh,
        state,
        report,
        gnorm: seminorms.gnorm,
    })
}

/// Single solve; the config must name exactly one size and one weight.
pub fn run_solve(config: &StudyConfig) -> Result<SolveReport, CliError> {
    config.validate()?;
    let sizes = config.sizes();
    if sizes.len() != 1 {
        return Err(CliError::config("n", "a single solve needs exactly one mesh size"));
    }
    if config.weights.len() != 1 {
        return Err(CliError::config("weights", "a single solve needs exactly one weight"));
    }
    Ok(solve_one(config, sizes[0], config.weights[0])?.report)
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub h: f64,
    pub n: usize,
    pub weight: WeightMode,
    pub u_l2: Option<f64>,
    pub p_l2: Option<f64>,
    pub jump: Option<f64>,
    pub gnorm: Option<f64>,
    pub dofs: Option<usize>,
    pub iters: Option<usize>,
    /// `log(e_prev / e) / log(h_prev / h)` against the previous size.
    pub u_rate: Option<f64>,
    pub p_rate: Option<f64>,
    /// Solver failure of this row; the study carries on.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyTable {
    pub problem: String,
    pub k: usize,
    pub rows: Vec<StudyRow>,
}

pub const CSV_HEADER: [&str; 10] = ["h", "weight", "u_l2", "p_l2", "jump", "gnorm", "dofs", "iters", "u_rate", "p_rate"];

fn rate(prev: Option<f64>, cur: Option<f64>, h_prev: f64, h: f64) -> Option<f64> {
    match (prev, cur) {
        (Some(a), Some(b)) if a > 0.0 && b > 0.0 => Some((a / b).ln() / (h_prev / h).ln()),
        _ => None,
    }
}

impl StudyTable {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER)?;
        let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let u = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.h.to_string(),
                r.weight.to_string(),
                f(r.u_l2),
                f(r.p_l2),
                f(r.jump),
                f(r.gnorm),
                u(r.dofs),
                u(r.iters),
                f(r.u_rate),
                f(r.p_rate),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Write(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("study table serializes")
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

/// One row per `(n, weight)`, ordered by size and then by the configured
/// weight order. Rows run in parallel.
pub fn run_study(config: &StudyConfig) -> Result<StudyTable, CliError> {
    config.validate()?;
    // surface config problems (e.g. unsupported boundary) before the sweep
    resolve(config, config.weights[0])?;
    build_mesh(config, config.sizes()[0])?;
    let jobs: Vec<(usize, WeightMode)> = config
        .sizes()
        .into_iter()
        .flat_map(|n| config.weights.iter().map(move |&w| (n, w)))
        .collect();
    let mut rows: Vec<StudyRow> = jobs
        .par_iter()
        .map(|&(n, weight)| {
            let mut row = StudyRow {
                h: 1.0 / n as f64,
                n,
                weight,
                u_l2: None,
                p_l2: None,
                jump: None,
                gnorm: None,
                dofs: None,
                iters: None,
                u_rate: None,
                p_rate: None,
                error: None,
            };
            match solve_one(config, n, weight) {
                Ok(run) => {
                    row.h = run.mesh.h_grid();
                    row.u_l2 = run.report.errors.u_l2;
                    row.p_l2 = run.report.errors.p_l2;
                    row.jump = Some(run.report.errors.jump);
                    row.gnorm = Some(run.gnorm);
                    row.dofs = Some(run.report.dofs);
                    row.iters = Some(run.report.iterations);
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect();
    for i in 0..rows.len() {
        let prev = (0..i).rev().find(|&j| rows[j].weight == rows[i].weight);
        if let Some(j) = prev {
            let (hp, h) = (rows[j].h, rows[i].h);
            rows[i].u_rate = rate(rows[j].u_l2, rows[i].u_l2, hp, h);
            rows[i].p_rate = rate(rows[j].p_l2, rows[i].p_l2, hp, h);
        }
    }
    let problem = match &config.problem {
        crate::config::ProblemRef::Preset(name) => name.clone(),
        crate::config::ProblemRef::Custom(_) => "custom".into(),
    };
    Ok(StudyTable {
        problem,
        k: config.degree(),
        rows,
    })
}

/// Minimization report plus the comparison with the linear scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalReport {
    pub n: usize,
    pub k: usize,
    pub integrand: String,
    pub objective: f64,
    pub converged: bool,
    #[serde(flatten)]
    pub minimize: MinimizeReport,
    /// Largest coefficient difference to the linear solve (quadratic only).
    pub linear_max_diff: Option<f64>,
}

/// Minimizes the discrete functional for the configured integrand.
///
/// The boundary term density is the negated Neumann datum, so the quadratic
/// integrand reproduces the linear problem of the same config.
pub fn run_variational(config: &StudyConfig) -> Result<VariationalReport, CliError> {
    config.validate()?;
    let sizes = config.sizes();
    if sizes.len() != 1 {
        return Err(CliError::config("n", "a variational run needs exactly one mesh size"));
    }
    let n = sizes[0];
    let name = config.integrand.clone().unwrap_or_else(|| "quadratic".into());
    let resolved = resolve(config, WeightMode::Unit)?;
    let mesh = build_mesh(config, n)?;
    let load = resolved.spec.load.clone();
    let integrand = match (name.as_str(), resolved.data.coefficient.as_str()) {
        ("quadratic", "identity") => Integrand::quadratic(load),
        ("quadratic", _) => Integrand::quadratic_with_coefficient(resolved.spec.coefficient.clone(), load),
        ("sqrt1pu2", _) => Integrand::sqrt1pu2(load),
        _ => return Err(CliError::config("integrand", format!("unknown integrand `{name}`"))),
    };
    let k = resolved.spec.degree;
    let neumann = resolved.spec.neumann.clone();
    let boundary: ScalarFn = Arc::new(move |p: Point| -neumann(p));
    let mut problem = VariationalProblem::new(integrand, resolved.spec.dirichlet.clone(), boundary, k);
    problem.quadrature_degree = config.quadrature.integrand;
    let defaults = MinimizeOptions::default();
    let options = MinimizeOptions {
        tolerance: config.tolerance.unwrap_or(defaults.tolerance),
        max_iterations: config.max_iterations.unwrap_or(defaults.max_iterations),
        ..defaults
    };
    let result = minimize(&mesh, &problem, &options)?;

    let linear_max_diff = if name == "quadratic" {
        // same quadrature as the functional so the two discrete problems coincide
        let q = config.quadrature.integrand.unwrap_or(0).max(2 * k + 4);
        let spec = resolved.spec.clone().with_weight(WeightMode::Unit).with_quadrature_degree(q);
        let options = SolveOptions {
            tolerance: 1e-13,
            solver: LinearSolver::Direct,
            ..SolveOptions::default()
        };
        let state = solve_with(&spec, &mesh, &options)?;
        let max_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        Some(
            max_diff(result.u.coeffs(), state.u.coeffs())
                .max(max_diff(result.trace.coeffs(), state.trace.coeffs())),
        )
    } else {
        None
    };
    Ok(VariationalReport {
        n,
        k,
        integrand: name,
        objective: result.objective,
        converged: result.converged,
        minimize: result.report(),
        linear_max_diff,
    })
}

/// Writes `study.csv` and `study.json` into `dir`, creating it if needed.
pub fn write_study(table: &StudyTable, dir: &std::path::Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("study.csv"), table.to_csv()?)?;
    std::fs::write(dir.join("study.json"), table.to_json())?;
    Ok(())
}
