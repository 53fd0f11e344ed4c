//! Study configuration: parsing, validation and command-line overrides.

use std::path::PathBuf;

use hdg_core::hdg::WeightScale;
use hdg_core::{Diagonal, WeightMode};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::presets::{preset, scalar, tensor, Domain, ProblemData};

/// A built-in preset name or an explicit problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemRef {
    Preset(String),
    Custom(ProblemData),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureOverrides {
    /// Assembly rule degree (load, coefficient, Dirichlet projection).
    pub assembly: Option<usize>,
    /// Rule degree for error norms.
    pub error: Option<usize>,
    /// Rule degree for nonlinear integrands.
    pub integrand: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub problem: ProblemRef,
    /// Mesh family; defaults to the problem's domain.
    #[serde(default)]
    pub mesh: Option<Domain>,
    #[serde(default)]
    pub diagonal: Diagonal,
    /// Mesh sizes; defaults to the preset's list.
    #[serde(default)]
    pub n: Option<Vec<usize>>,
    /// Polynomial degree; defaults to the preset's degree.
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default = "default_weights")]
    pub weights: Vec<WeightMode>,
    #[serde(default)]
    pub weight_scale: WeightScale,
    #[serde(default)]
    pub quadrature: QuadratureOverrides,
    /// Integrand for variational runs: `quadratic` or `sqrt1pu2`.
    #[serde(default)]
    pub integrand: Option<String>,
    /// Gradient tolerance for variational runs.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub max_iterations: Option<usize>,
    /// Directory for study tables.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_weights() -> Vec<WeightMode> {
    vec![WeightMode::Unit]
}

pub const INTEGRAND_NAMES: [&str; 2] = ["quadratic", "sqrt1pu2"];

/// Command-line values that replace config entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub weight: Option<WeightMode>,
    pub diagonal: Option<Diagonal>,
    pub output: Option<PathBuf>,
}

impl StudyConfig {
    /// Config for a preset with its defaults.
    pub fn preset(name: &str) -> Self {
        Self {
            problem: ProblemRef::Preset(name.into()),
            mesh: None,
            diagonal: Diagonal::Ne,
            n: None,
            k: None,
            weights: default_weights(),
            weight_scale: WeightScale::Global,
            quadrature: QuadratureOverrides::default(),
            integrand: None,
            tolerance: None,
            max_iterations: None,
            output: None,
        }
    }

    /// Parses JSON, reporting the path of the offending field.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::config(if path == "." { "$".into() } else { path }, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(k) = o.k {
            self.k = Some(k);
        }
        if let Some(n) = o.n {
            self.n = Some(vec![n]);
        }
        if let Some(w) = o.weight {
            self.weights = vec![w];
        }
        if let Some(d) = o.diagonal {
            self.diagonal = d;
        }
        if let Some(out) = &o.output {
            self.output = Some(out.clone());
        }
    }

    /// Problem data, resolving a preset name.
    pub fn problem_data(&self) -> Result<ProblemData, CliError> {
        match &self.problem {
            ProblemRef::Preset(name) => preset(name)
                .map(|p| p.data)
                .ok_or_else(|| CliError::config("problem", format!("unknown preset `{name}`"))),
            ProblemRef::Custom(data) => Ok(data.clone()),
        }
    }

    pub fn degree(&self) -> usize {
        self.k.unwrap_or_else(|| match &self.problem {
            ProblemRef::Preset(name) => preset(name).map_or(0, |p| p.degree),
            ProblemRef::Custom(_) => 0,
        })
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.n.clone().unwrap_or_else(|| match &self.problem {
            ProblemRef::Preset(name) => preset(name).map_or_else(|| vec![8], |p| p.n),
            ProblemRef::Custom(_) => vec![8],
        })
    }

    pub fn domain(&self) -> Result<Domain, CliError> {
        Ok(self.mesh.unwrap_or(self.problem_data()?.domain))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let data = self.problem_data()?;
        let names = [
            ("problem.load", &data.load),
            ("problem.dirichlet", &data.dirichlet),
            ("problem.neumann", &data.neumann),
        ];
        for (path, name) in names {
            if scalar(name).is_none() {
                return Err(CliError::config(path, format!("unknown expression `{name}`")));
            }
        }
        if let Some(exact) = &data.exact {
            if scalar(exact).is_none() {
                return Err(CliError::config("problem.exact", format!("unknown expression `{exact}`")));
            }
        }
        if tensor(&data.coefficient).is_none() {
            return Err(CliError::config(
                "problem.coefficient",
                format!("unknown coefficient `{}`", data.coefficient),
            ));
        }
        let sizes = self.sizes();
        if sizes.is_empty() {
            return Err(CliError::config("n", "at least one mesh size is needed"));
        }
        for (i, &n) in sizes.iter().enumerate() {
            if n == 0 {
                return Err(CliError::config(format!("n[{i}]"), "mesh size must be positive"));
            }
            if i > 0 && n <= sizes[i - 1] {
                return Err(CliError::config(format!("n[{i}]"), "sizes must be strictly increasing"));
            }
            if self.domain()? == Domain::Lshape && n % 2 != 0 {
                return Err(CliError::config(format!("n[{i}]"), "L-shape meshes need an even size"));
            }
        }
        if self.degree() > 2 {
            return Err(CliError::config("k", format!("degree {} is not supported (0, 1, 2)", self.degree())));
        }
        if self.weights.is_empty() {
            return Err(CliError::config("weights", "at least one weight is needed"));
        }
        if let Some(name) = &self.integrand {
            if !INTEGRAND_NAMES.contains(&name.as_str()) {
                return Err(CliError::config("integrand", format!("unknown integrand `{name}`")));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::config("tolerance", "must be positive"));
            }
        }
        Ok(())
    }
}
