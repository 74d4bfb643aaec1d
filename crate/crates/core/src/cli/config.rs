use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlations::{OptimizerSettings, Side};
use crate::error::{Error, Result};
pub use crate::experiments::AuditToggles;
use crate::experiments::{Pipeline, SweepOptions};
use crate::model::{linear_grid, Family, Partition, Scenario, SpectralDensity};

/// Largest ‖(α, β)‖ − 1 that is silently renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-6;

fn default_partitions() -> Vec<Partition> {
    Partition::ALL.to_vec()
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_grid() -> usize {
    64
}

fn default_refine() -> usize {
    4
}

/// A scenario plus everything needed to sweep and write it out.
///
/// α and β are kept as written; they are renormalized when the scenario is
/// built, so serializing a parsed config reproduces it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: Family,
    #[serde(default)]
    pub alpha_re: f64,
    #[serde(default)]
    pub alpha_im: f64,
    #[serde(default)]
    pub beta_re: f64,
    #[serde(default)]
    pub beta_im: f64,
    pub spectral: SpectralDensity,
    /// Dimensionless (γt or λt).
    #[serde(default)]
    pub time_start: f64,
    pub time_end: f64,
    pub time_steps: usize,
    #[serde(default = "default_partitions")]
    pub partitions: Vec<Partition>,
    #[serde(default)]
    pub pipeline: Pipeline,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_refine")]
    pub refine: usize,
    #[serde(default)]
    pub side: Side,
    /// Also write an SVG next to the CSV on `sweep`.
    #[serde(default)]
    pub svg: bool,
    #[serde(default)]
    pub audits: AuditToggles,
}

fn invalid(field: &str, constraint: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {constraint}"))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha_re", self.alpha_re),
            ("alpha_im", self.alpha_im),
            ("beta_re", self.beta_re),
            ("beta_im", self.beta_im),
            ("time_start", self.time_start),
            ("time_end", self.time_end),
        ] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        let norm = self.norm();
        if (norm - 1.0).abs() >= RENORMALIZE_TOL {
            return Err(invalid(
                "alpha/beta",
                format_args!("|alpha|^2 + |beta|^2 must be 1 (within {RENORMALIZE_TOL:e} in norm), norm is {norm}"),
            ));
        }
        self.spectral
            .validate()
            .map_err(|e| invalid("spectral", e))?;
        if self.time_start < 0.0 {
            return Err(invalid("time_start", format_args!("must be >= 0, got {}", self.time_start)));
        }
        if self.time_end <= self.time_start {
            return Err(invalid("time_end", "must exceed time_start"));
        }
        if self.time_steps < 2 {
            return Err(invalid("time_steps", format_args!("must be >= 2, got {}", self.time_steps)));
        }
        if self.partitions.is_empty() {
            return Err(invalid("partitions", "must not be empty"));
        }
        if self.pipeline == Pipeline::ClosedForm {
            if let Some(p) = self
                .partitions
                .iter()
                .find(|p| !crate::experiments::has_closed_form(**p))
            {
                return Err(invalid(
                    "partitions",
                    format_args!("closed pipeline covers only s1s2 and r1r2, got {p}"),
                ));
            }
        }
        if self.grid < 2 {
            return Err(invalid("grid", format_args!("must be >= 2, got {}", self.grid)));
        }
        Ok(())
    }

    fn norm(&self) -> f64 {
        (self.alpha_re.powi(2) + self.alpha_im.powi(2) + self.beta_re.powi(2) + self.beta_im.powi(2)).sqrt()
    }

    pub fn scenario(&self) -> Result<Scenario> {
        self.validate()?;
        let n = self.norm();
        let alpha = Complex64::new(self.alpha_re, self.alpha_im) / n;
        let beta = Complex64::new(self.beta_re, self.beta_im) / n;
        let times = linear_grid(self.time_start, self.time_end, self.time_steps);
        Scenario::new(self.family, alpha, beta, self.spectral, times)
    }

    pub fn sweep_options(&self) -> Result<SweepOptions> {
        Ok(SweepOptions {
            optimizer: OptimizerSettings::new(self.grid, self.refine)?,
            side: self.side,
        })
    }
}
