//! Experiment configuration: a flat JSON document, validated up front so that
//! `run` only sees consistent settings.

use std::path::PathBuf;

use pnc_lab_core::{FitWindow, Scheme, SnrGrid, StoppingRule};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::figures;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Simulate,
    Bound,
    Diversity,
    ReproduceFigure,
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(rename = "M", default = "default_order")]
    pub order: usize,
    #[serde(rename = "N_A", default = "one")]
    pub n_a: usize,
    #[serde(rename = "N_R", default = "one")]
    pub n_r: usize,
    #[serde(rename = "N_B", default = "one")]
    pub n_b: usize,
    /// Single scheme; shorthand for a one-element `schemes`.
    #[serde(default)]
    pub scheme: Option<Scheme>,
    #[serde(default)]
    pub schemes: Option<Vec<Scheme>>,
    #[serde(default)]
    pub snr_db: Option<SnrGrid>,
    #[serde(default)]
    pub delta_ab_db: f64,
    #[serde(default)]
    pub min_errors: Option<u64>,
    #[serde(default)]
    pub max_trials: Option<u64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub ser_floor: Option<f64>,
    #[serde(default)]
    pub fit: FitWindow,
    #[serde(default)]
    pub figure: Option<String>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_order() -> usize {
    4
}

fn one() -> usize {
    1
}

fn default_seed() -> u64 {
    1
}

fn invalid(field: &'static str, message: impl Into<String>) -> CliError {
    CliError::Invalid {
        field,
        message: message.into(),
    }
}

/// Parses and validates a JSON config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        // serde_json appends its own " at line L column C".
        let message = full.rsplit_once(" at line ").map_or(full.as_str(), |(m, _)| m).to_string();
        CliError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    })?;
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    /// Schemes to simulate, defaulting to both selection rules.
    pub fn schemes(&self) -> Vec<Scheme> {
        match (&self.scheme, &self.schemes) {
            (Some(s), _) => vec![*s],
            (None, Some(list)) => list.clone(),
            (None, None) => vec![Scheme::As1, Scheme::As2],
        }
    }

    pub fn stopping(&self) -> StoppingRule {
        let d = StoppingRule::default();
        StoppingRule {
            min_errors: self.min_errors.unwrap_or(d.min_errors),
            max_trials: self.max_trials.unwrap_or(d.max_trials),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.order, 2 | 4 | 8 | 16) {
            return Err(invalid(
                "M",
                format!("unsupported modulation order {}: expected one of 2, 4, 8, 16", self.order),
            ));
        }
        for (field, n) in [("N_A", self.n_a), ("N_R", self.n_r), ("N_B", self.n_b)] {
            if n == 0 {
                return Err(invalid(field, "antenna count must be at least 1"));
            }
        }
        if self.scheme.is_some() && self.schemes.is_some() {
            return Err(invalid("scheme", "give either `scheme` or `schemes`, not both"));
        }
        if matches!(&self.schemes, Some(list) if list.is_empty()) {
            return Err(invalid("schemes", "at least one scheme is required"));
        }
        if !self.delta_ab_db.is_finite() || self.delta_ab_db < 0.0 {
            return Err(invalid("delta_ab_db", "must be a finite, nonnegative dB offset"));
        }
        if let Some(m) = self.min_errors {
            if m < StoppingRule::MIN_ERRORS_FLOOR {
                return Err(invalid(
                    "min_errors",
                    format!("must be at least {}, got {m}", StoppingRule::MIN_ERRORS_FLOOR),
                ));
            }
        }
        if self.max_trials == Some(0) {
            return Err(invalid("max_trials", "must be positive"));
        }
        if let Some(f) = self.ser_floor {
            if !(f > 0.0 && f < 1.0) {
                return Err(invalid("ser_floor", "must lie in (0, 1)"));
            }
        }
        if let Some(grid) = &self.snr_db {
            grid.points().map_err(|e| invalid("snr_db", e.to_string()))?;
        }
        match self.mode {
            Mode::Simulate | Mode::Bound | Mode::Diversity if self.snr_db.is_none() => {
                return Err(invalid("snr_db", "an SNR grid {start, stop, step} is required for this mode"));
            }
            Mode::Bound if self.order > 2 && self.n_r > 1 => {
                return Err(invalid(
                    "N_R",
                    format!(
                        "mode `bound` is unavailable for M = {} with N_R = {}: no closed-form SER bound exists \
                         for the cross-user confusion term unless N_R = 1 or M = 2",
                        self.order, self.n_r
                    ),
                ));
            }
            Mode::ReproduceFigure => match &self.figure {
                None => return Err(invalid("figure", "required for mode `reproduce-figure`")),
                Some(name) if figures::bundle(name).is_none() => {
                    return Err(invalid(
                        "figure",
                        format!("unknown figure {name:?}: expected one of {}", figures::NAMES.join(", ")),
                    ));
                }
                Some(_) => {}
            },
            _ => {}
        }
        Ok(())
    }
}
