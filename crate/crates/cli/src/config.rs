//! Run configuration: a JSON file, overridden field by field by flags.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use aplab_core::builders;
use aplab_core::classify::ClassifyConfig;
use aplab_core::dynamics::OmegaConfig;
use aplab_core::function::io::{load_expr_file, load_sampled_csv};
use aplab_core::{FunctionHandle, TimeDomain};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable that overrides the output directory.
pub const OUT_ENV: &str = "AP_LAB_OUT";

/// Where a function comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Subject {
    Builder(String),
    Expr(PathBuf),
    Csv { path: PathBuf, domain: TimeDomain },
}

impl Subject {
    pub fn load(&self) -> Result<FunctionHandle, CliError> {
        match self {
            Subject::Builder(name) => Ok(builders::by_name(name)?),
            Subject::Expr(path) => Ok(load_expr_file(path)?),
            Subject::Csv { path, domain } => Ok(load_sampled_csv(path, *domain)?),
        }
    }

    /// The builder name, when the subject is a canned builder.
    pub fn builder(&self) -> Option<&str> {
        match self {
            Subject::Builder(name) => Some(name.as_str()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub subject: Option<Subject>,
    /// Second function for `metric`.
    pub other: Option<Subject>,
    /// Epsilon ladder, schedule, resolutions, shift grids and `p`.
    pub classify: ClassifyConfig,
    pub omega: OmegaConfig,
    /// Shift of the `decay` profile.
    pub tau: f64,
    /// Window length of an `S^p` decay profile; uniform sup when absent.
    pub ell: Option<f64>,
    /// Anchor range of `norm`.
    pub t_max: f64,
    /// Samples per unit of the inner max in the compact-open distance.
    pub sup_resolution: usize,
    /// Truncation radii of `metric`.
    pub l_values: Vec<f64>,
    /// Step of the sampled primitive in the theorem check.
    pub primitive_step: f64,
    pub quad_tol: f64,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            subject: None,
            other: None,
            classify: ClassifyConfig::default(),
            omega: OmegaConfig::default(),
            tau: 2.0 * PI,
            ell: None,
            t_max: 100.0,
            sup_resolution: 50,
            l_values: (0..=12).map(|k| 0.25 * 2f64.powi(k)).collect(),
            primitive_step: 0.01,
            quad_tol: 1e-8,
            out_dir: PathBuf::from("ap-lab-out"),
            formats: vec![Format::Json, Format::Csv, Format::Svg],
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: line {}: {e}", path.display(), e.line())))
    }

    /// Checks every field before any computation starts.
    pub fn validate(&self) -> Result<(), CliError> {
        self.classify.validate()?;
        self.omega.validate()?;
        let positive = [("tau", self.tau), ("t_max", self.t_max), ("primitive_step", self.primitive_step), ("quad_tol", self.quad_tol)];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::Usage(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.ell.is_some_and(|l| !(l > 0.0)) {
            return Err(CliError::Usage("ell must be positive".into()));
        }
        if self.sup_resolution == 0 || self.l_values.is_empty() || self.l_values.iter().any(|&l| !(l > 0.0)) {
            return Err(CliError::Usage("sup_resolution and l_values must be positive".into()));
        }
        if self.formats.is_empty() {
            return Err(CliError::Usage("at least one output format is required".into()));
        }
        for s in [&self.subject, &self.other].into_iter().flatten() {
            if let Subject::Builder(name) = s {
                builders::by_name(name)?;
            }
        }
        Ok(())
    }

    pub fn subject(&self) -> Result<FunctionHandle, CliError> {
        self.subject.as_ref().ok_or_else(|| CliError::Usage("no subject: pass --builder, --expr or --csv".into()))?.load()
    }
}
