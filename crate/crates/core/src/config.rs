//! Experiment configuration.
//!
//! A config is a flat TOML document; every value is a scalar or a flat list:
//!
//! ```toml
//! dim = 64
//! hi_kind = "hopping"     # hopping | coherent-like | diagonal | random
//! kappa = 1.0             # hopping only; alpha / scale for the other kinds
//! seed = 7
//! potential = "delta"     # delta | polynomial
//! x_min = [10, 40]        # delta only
//! coefficients = [9, -6, 1]   # polynomial only
//! shift = 0.0
//! T = [5.0, 20.0]
//! dt = 0.05
//! stride = 10
//! ```

use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;
use thiserror::Error;

use crate::evolve::StepControl;
use crate::hamiltonian::{InitialKind, Params};
use crate::analysis::BOUND_SLACK;

/// One invalid field with the reason it was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldError {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`: {}", self.field, self.message)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Malformed(String),
    #[error("invalid config:\n{}", .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<FieldError>),
}

impl ConfigError {
    /// Names of every rejected field.
    pub fn fields(&self) -> Vec<&'static str> {
        match self {
            ConfigError::Malformed(_) => Vec::new(),
            ConfigError::Invalid(errs) => errs.iter().map(|e| e.field).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    Delta { x_mins: Vec<usize> },
    Polynomial { coefficients: Vec<f64> },
}

/// A validated experiment description.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub hi_kind: InitialKind,
    pub hi_params: Params,
    pub seed: u64,
    pub potential: PotentialSpec,
    pub shift: f64,
    pub total_times: Vec<f64>,
    pub step: StepControl,
    pub slack: f64,
    pub gap_samples: usize,
    pub workers: usize,
    pub output: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dim: Option<i64>,
    hi_kind: Option<String>,
    kappa: Option<f64>,
    alpha: Option<f64>,
    scale: Option<f64>,
    seed: Option<u64>,
    potential: Option<String>,
    x_min: Option<Vec<i64>>,
    coefficients: Option<Vec<f64>>,
    shift: Option<f64>,
    #[serde(rename = "T")]
    total_times: Option<Vec<f64>>,
    dt: Option<f64>,
    stride: Option<i64>,
    tolerance: Option<f64>,
    slack: Option<f64>,
    gap_samples: Option<i64>,
    workers: Option<i64>,
    output: Option<String>,
}

struct Collector(Vec<FieldError>);

impl Collector {
    fn push(&mut self, field: &'static str, message: impl Into<String>) {
        self.0.push(FieldError {
            field,
            message: message.into(),
        });
    }
}

/// Parses and validates a config document, reporting every invalid field.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Malformed(e.message().to_string()))?;
    let mut errs = Collector(Vec::new());

    let dim = match raw.dim {
        None => {
            errs.push("dim", "missing");
            None
        }
        Some(d) if d < 2 => {
            errs.push("dim", format!("must be at least 2, got {d}"));
            None
        }
        Some(d) => Some(d as usize),
    };

    let hi_kind = match raw.hi_kind.as_deref() {
        None => {
            errs.push("hi_kind", "missing");
            None
        }
        Some(s) => match s.parse::<InitialKind>() {
            Ok(k) => Some(k),
            Err(_) => {
                errs.push("hi_kind", format!("unknown kind `{s}`"));
                None
            }
        },
    };

    let mut hi_params = Params::new();
    for (name, value, owner) in [
        ("kappa", raw.kappa, InitialKind::Hopping),
        ("alpha", raw.alpha, InitialKind::CoherentLike),
        ("scale", raw.scale, InitialKind::Random),
    ] {
        let Some(v) = value else { continue };
        if hi_kind.is_some_and(|k| k != owner) {
            errs.push(name, format!("only applies to hi_kind = \"{owner}\""));
            continue;
        }
        if !v.is_finite() || (name != "alpha" && v <= 0.0) {
            errs.push(name, format!("invalid value {v}"));
            continue;
        }
        hi_params.insert(name.to_string(), v);
    }

    let potential = match raw.potential.as_deref().unwrap_or("delta") {
        "delta" => {
            if raw.coefficients.is_some() {
                errs.push("coefficients", "only applies to potential = \"polynomial\"");
            }
            match raw.x_min {
                None => {
                    errs.push("x_min", "missing (required for the delta potential)");
                    None
                }
                Some(ref xs) if xs.is_empty() => {
                    errs.push("x_min", "must list at least one site");
                    None
                }
                Some(xs) => {
                    let bad: Vec<i64> = xs
                        .iter()
                        .copied()
                        .filter(|&x| x < 0 || dim.is_some_and(|d| x as usize >= d))
                        .collect();
                    if bad.is_empty() {
                        Some(PotentialSpec::Delta {
                            x_mins: xs.into_iter().map(|x| x as usize).collect(),
                        })
                    } else {
                        errs.push("x_min", format!("sites {bad:?} are outside 0..dim"));
                        None
                    }
                }
            }
        }
        "polynomial" => {
            if raw.x_min.is_some() {
                errs.push("x_min", "only applies to potential = \"delta\"");
            }
            match raw.coefficients {
                Some(c) if !c.is_empty() && c.iter().all(|v| v.is_finite()) => {
                    Some(PotentialSpec::Polynomial { coefficients: c })
                }
                Some(_) => {
                    errs.push("coefficients", "need at least one finite coefficient");
                    None
                }
                None => {
                    errs.push("coefficients", "missing (required for the polynomial potential)");
                    None
                }
            }
        }
        other => {
            errs.push("potential", format!("unknown potential `{other}` (expected delta or polynomial)"));
            None
        }
    };

    let shift = raw.shift.unwrap_or(0.0);
    if !shift.is_finite() {
        errs.push("shift", "must be finite");
    }

    let total_times = match raw.total_times {
        None => {
            errs.push("T", "missing");
            None
        }
        Some(ts) if ts.is_empty() => {
            errs.push("T", "must list at least one total time");
            None
        }
        Some(ts) if ts.iter().any(|t| !(t.is_finite() && *t > 0.0)) => {
            errs.push("T", "every total time must be positive and finite");
            None
        }
        Some(ts) => Some(ts),
    };
    let min_t = total_times
        .as_ref()
        .map(|ts| ts.iter().cloned().fold(f64::INFINITY, f64::min));

    let dt = raw.dt.unwrap_or_else(|| min_t.map_or(0.05, |t| (t / 10.0).min(0.05)));
    if !(dt.is_finite() && dt > 0.0) {
        errs.push("dt", format!("must be positive, got {dt}"));
    } else if let Some(t) = min_t {
        if dt > t / 10.0 * (1.0 + 1e-12) {
            errs.push("dt", format!("{dt} exceeds min(T)/10 = {}", t / 10.0));
        }
    }

    let stride = raw.stride.unwrap_or(10);
    if stride < 1 {
        errs.push("stride", format!("must be at least 1, got {stride}"));
    }
    let tolerance = raw.tolerance.unwrap_or(1e-9);
    if !(tolerance.is_finite() && tolerance > 0.0) {
        errs.push("tolerance", format!("must be positive, got {tolerance}"));
    }
    let slack = raw.slack.unwrap_or(BOUND_SLACK);
    if !(slack.is_finite() && slack >= 0.0) {
        errs.push("slack", format!("must be nonnegative, got {slack}"));
    }
    let gap_samples = raw.gap_samples.unwrap_or(33);
    if gap_samples < 2 {
        errs.push("gap_samples", format!("must be at least 2, got {gap_samples}"));
    }
    let workers = raw.workers.unwrap_or(1);
    if workers < 1 {
        errs.push("workers", format!("must be at least 1, got {workers}"));
    }

    if !errs.0.is_empty() {
        return Err(ConfigError::Invalid(errs.0));
    }
    Ok(ExperimentConfig {
        dim: dim.expect("validated"),
        hi_kind: hi_kind.expect("validated"),
        hi_params,
        seed: raw.seed.unwrap_or(0),
        potential: potential.expect("validated"),
        shift,
        total_times: total_times.expect("validated"),
        step: StepControl {
            base_step: dt,
            sample_stride: stride as usize,
            tolerance,
        },
        slack,
        gap_samples: gap_samples as usize,
        workers: workers as usize,
        output: raw.output.map(PathBuf::from),
    })
}
