use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::cognition::CognitionParams;
use crate::error::{Error, Result};
use crate::game::UtilityTable;

pub const DEFAULT_ALPHA: f64 = 0.2;
pub const DEFAULT_LAMBDA: f64 = 10.0;
pub const DEFAULT_STEP: f64 = 0.02;
pub const MAX_STEP: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Pure,
    Mixed,
    Agnostic,
    Evolve,
    Validate,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Pure => "pure",
            Mode::Mixed => "mixed",
            Mode::Agnostic => "agnostic",
            Mode::Evolve => "evolve",
            Mode::Validate => "validate",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Ppm,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn ppm(self) -> bool {
        matches!(self, OutputFormat::Ppm | OutputFormat::Both)
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "ppm" => Ok(OutputFormat::Ppm),
            "both" => Ok(OutputFormat::Both),
            other => Err(Error::validation(
                "format",
                format!("expected csv, ppm or both, got {other:?}"),
            )),
        }
    }
}

/// Sweep settings.
///
/// File schema (TOML):
///
/// ```toml
/// mode = "pure"            # pure | mixed | agnostic | evolve | validate
/// output_dir = "out"
/// format = "csv"           # csv | ppm | both
///
/// [utilities]              # all sixteen required
/// a1s = 85.0
/// # b1s c1s d1s a1d b1d c1d d1d a2s b2s c2s d2s a2d b2d c2d d2d
///
/// [cognition]
/// alpha = 0.2
/// lambda = 10.0
///
/// [grid]
/// step = 0.02
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub utilities: UtilityTable<f64>,
    pub alpha: f64,
    pub lambda: f64,
    pub grid_step: f64,
    pub mode: Mode,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    utilities: UtilityTable<f64>,
    #[serde(default)]
    cognition: RawCognition,
    #[serde(default)]
    grid: RawGrid,
    mode: Option<Mode>,
    output_dir: Option<PathBuf>,
    format: Option<OutputFormat>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCognition {
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_lambda")]
    lambda: f64,
}

impl Default for RawCognition {
    fn default() -> Self {
        RawCognition {
            alpha: DEFAULT_ALPHA,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(default = "default_step")]
    step: f64,
}

impl Default for RawGrid {
    fn default() -> Self {
        RawGrid { step: DEFAULT_STEP }
    }
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_lambda() -> f64 {
    DEFAULT_LAMBDA
}

fn default_step() -> f64 {
    DEFAULT_STEP
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            utilities: UtilityTable::baseline(),
            alpha: DEFAULT_ALPHA,
            lambda: DEFAULT_LAMBDA,
            grid_step: DEFAULT_STEP,
            mode: Mode::Pure,
            output_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
        }
    }
}

impl SweepConfig {
    /// Parses without validating values; see [`SweepConfig::validate`].
    pub fn from_toml_str(src: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(src).map_err(|e| Error::Config(e.to_string()))?;
        Ok(SweepConfig {
            utilities: raw.utilities,
            alpha: raw.cognition.alpha,
            lambda: raw.cognition.lambda,
            grid_step: raw.grid.step,
            mode: raw.mode.unwrap_or(Mode::Pure),
            output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            format: raw.format.unwrap_or(OutputFormat::Csv),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&src)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), strip_prefix(e))))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.grid_step.is_finite() && self.grid_step > 0.0 && self.grid_step <= MAX_STEP) {
            return Err(Error::validation(
                "grid.step",
                format!("{} is outside (0, {MAX_STEP}]", self.grid_step),
            ));
        }
        self.params()?;
        self.utilities.validate().map_err(|e| match e {
            Error::Validation { field, reason } => Error::Validation {
                field: format!("utilities.{field}"),
                reason,
            },
            other => other,
        })
    }

    pub fn params(&self) -> Result<CognitionParams<f64>> {
        CognitionParams::new(self.alpha, self.lambda).map_err(|e| match e {
            Error::Validation { field, reason } => Error::Validation {
                field: format!("cognition.{field}"),
                reason,
            },
            other => other,
        })
    }

    /// Inclusive axis `0, step, …, 1`.
    pub fn axis(&self) -> Vec<f64> {
        axis(self.grid_step)
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}

/// Grid values on [0, 1] including both endpoints. When `1/step` is an
/// integer `n` the values are exactly `i/n`.
pub fn axis(step: f64) -> Vec<f64> {
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() <= 1e-9 {
        let n = n as usize;
        return (0..=n).map(|i| i as f64 / n as f64).collect();
    }
    let mut out: Vec<f64> = (0..)
        .map(|i| i as f64 * step)
        .take_while(|v| *v <= 1.0 + 1e-12)
        .map(|v: f64| v.min(1.0))
        .collect();
    if *out.last().expect("non-empty axis") < 1.0 - 1e-12 {
        out.push(1.0);
    }
    out
}
