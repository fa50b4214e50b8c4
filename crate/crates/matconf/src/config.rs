//! Experiment configuration read from a flat TOML document.
//!
//! ```toml
//! graphons = ["f1", "f2", "f3"]
//! n_values = [50]
//! xi_targets = [0.1, 0.5, 0.9]
//! alpha = 0.1
//! replications = 200
//! method = "alg1"            # or "alg2"
//! missingness = "single"     # "single", "mnar" or "mcar"
//! m0_values = [5, 25]        # required unless missingness = "single"
//! grid_points = 401
//! refine_steps = 10
//! iter_max = 8
//! master_seed = 1
//! output = "records.csv"
//! summary_output = "summary.csv"   # optional
//! ```

use std::path::{Path, PathBuf};

use matconf_core::conformal::DEFAULT_ITER_MAX;
use matconf_core::simgen::Graphon;
use matconf_core::Grid;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid field `{field}`: {message}")]
    Field {
        field: &'static str,
        message: String,
    },
    #[error("cannot parse configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot read configuration: {0}")]
    Io(#[from] std::io::Error),
}

fn field_error(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Multi-guess union with the singular-value score.
    Alg1,
    /// Single guess with stability slack and the smoothing score.
    Alg2,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Alg1 => "alg1",
            Method::Alg2 => "alg2",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "alg1" => Some(Method::Alg1),
            "alg2" => Some(Method::Alg2),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Missingness {
    /// Only the target is unobserved.
    SingleTarget,
    /// The `m0` largest entries are hidden.
    MnarLargest,
    /// `m0` pairs hidden uniformly at random.
    Mcar,
}

impl Missingness {
    pub fn name(self) -> &'static str {
        match self {
            Missingness::SingleTarget => "single",
            Missingness::MnarLargest => "mnar",
            Missingness::Mcar => "mcar",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "single" => Some(Missingness::SingleTarget),
            "mnar" => Some(Missingness::MnarLargest),
            "mcar" => Some(Missingness::Mcar),
            _ => None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    graphons: Vec<String>,
    n_values: Vec<usize>,
    xi_targets: Vec<f64>,
    #[serde(default = "default_alpha")]
    alpha: f64,
    replications: usize,
    method: String,
    #[serde(default = "default_missingness")]
    missingness: String,
    #[serde(default)]
    m0_values: Vec<usize>,
    #[serde(default = "default_grid_points")]
    grid_points: usize,
    #[serde(default = "default_refine_steps")]
    refine_steps: u32,
    #[serde(default = "default_iter_max")]
    iter_max: usize,
    #[serde(default)]
    master_seed: u64,
    output: PathBuf,
    summary_output: Option<PathBuf>,
}

fn default_alpha() -> f64 {
    0.1
}

fn default_missingness() -> String {
    "single".to_owned()
}

fn default_grid_points() -> usize {
    Grid::DEFAULT_POINTS
}

fn default_refine_steps() -> u32 {
    Grid::DEFAULT_REFINE_STEPS
}

fn default_iter_max() -> usize {
    DEFAULT_ITER_MAX
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graphons: Vec<Graphon>,
    pub n_values: Vec<usize>,
    pub xi_targets: Vec<f64>,
    pub alpha: f64,
    pub replications: usize,
    pub method: Method,
    pub missingness: Missingness,
    /// Missing-pair counts; `[0]` for a single missing target.
    pub m0_values: Vec<usize>,
    pub grid_points: usize,
    pub refine_steps: u32,
    pub iter_max: usize,
    pub master_seed: u64,
    pub output: PathBuf,
    pub summary_output: PathBuf,
}

/// One combination of graphon, size, target latent and missing count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub graphon: Graphon,
    pub n: usize,
    pub xi_target: f64,
    pub m0: usize,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Self::from_raw(toml::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        if raw.graphons.is_empty() {
            return Err(field_error("graphons", "list is empty"));
        }
        let graphons = raw
            .graphons
            .iter()
            .map(|name| {
                Graphon::from_name(name).ok_or_else(|| {
                    field_error(
                        "graphons",
                        format!("unknown graphon {name:?}; expected f1, f2 or f3"),
                    )
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if raw.n_values.is_empty() {
            return Err(field_error("n_values", "list is empty"));
        }
        if let Some(n) = raw.n_values.iter().find(|&&n| n < 3) {
            return Err(field_error(
                "n_values",
                format!("n = {n} is below the minimum of 3"),
            ));
        }
        if raw.xi_targets.is_empty() {
            return Err(field_error("xi_targets", "list is empty"));
        }
        if let Some(xi) = raw.xi_targets.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            return Err(field_error("xi_targets", format!("{xi} is outside (0, 1)")));
        }
        if !(raw.alpha > 0.0 && raw.alpha < 1.0) {
            return Err(field_error(
                "alpha",
                format!("{} is outside (0, 1)", raw.alpha),
            ));
        }
        if raw.replications == 0 {
            return Err(field_error("replications", "must be at least 1"));
        }
        let method = Method::from_name(&raw.method).ok_or_else(|| {
            field_error(
                "method",
                format!("unknown method {:?}; expected alg1 or alg2", raw.method),
            )
        })?;
        let missingness = Missingness::from_name(&raw.missingness).ok_or_else(|| {
            field_error(
                "missingness",
                format!(
                    "unknown mechanism {:?}; expected single, mnar or mcar",
                    raw.missingness
                ),
            )
        })?;
        let m0_values = match missingness {
            Missingness::SingleTarget => {
                if raw.m0_values.iter().any(|&m| m != 0) {
                    return Err(field_error(
                        "m0_values",
                        "must be empty or zero for single-target missingness",
                    ));
                }
                vec![0]
            }
            _ => {
                if raw.m0_values.is_empty() {
                    return Err(field_error(
                        "m0_values",
                        "required for mnar and mcar missingness",
                    ));
                }
                let smallest = *raw.n_values.iter().min().expect("checked nonempty");
                let available = (smallest + 1) * smallest / 2 - 1;
                if let Some(m) = raw.m0_values.iter().find(|&&m| m > available) {
                    return Err(field_error(
                        "m0_values",
                        format!("{m} exceeds the {available} eligible pairs at n = {smallest}"),
                    ));
                }
                raw.m0_values
            }
        };
        if raw.grid_points < 2 {
            return Err(field_error("grid_points", "must be at least 2"));
        }
        if raw.refine_steps > Grid::MAX_REFINE_STEPS {
            return Err(field_error(
                "refine_steps",
                format!("must be at most {}", Grid::MAX_REFINE_STEPS),
            ));
        }
        if raw.iter_max == 0 {
            return Err(field_error("iter_max", "must be at least 1"));
        }
        let summary_output = raw
            .summary_output
            .unwrap_or_else(|| default_summary_path(&raw.output));
        Ok(Self {
            graphons,
            n_values: raw.n_values,
            xi_targets: raw.xi_targets,
            alpha: raw.alpha,
            replications: raw.replications,
            method,
            missingness,
            m0_values,
            grid_points: raw.grid_points,
            refine_steps: raw.refine_steps,
            iter_max: raw.iter_max,
            master_seed: raw.master_seed,
            output: raw.output,
            summary_output,
        })
    }

    /// Cells in the order graphon, n, ξ, m0.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &graphon in &self.graphons {
            for &n in &self.n_values {
                for &xi_target in &self.xi_targets {
                    for &m0 in &self.m0_values {
                        cells.push(Cell {
                            graphon,
                            n,
                            xi_target,
                            m0,
                        });
                    }
                }
            }
        }
        cells
    }
}

/// `records.csv` becomes `records_summary.csv`.
pub fn default_summary_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("records");
    output.with_file_name(format!("{stem}_summary.csv"))
}
