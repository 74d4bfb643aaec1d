//! Correlation measures for two-qubit states: quantum mutual information,
//! classical correlation C (optimized over projective measurements on one
//! side), quantum correlation Q = I − C, and Wootters concurrence.

mod closed;
mod concurrence;
mod optimizer;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{state_spectrum, ComplexMatrix};
use crate::model::Partition;

pub use closed::{
    classical_correlation_closed_two_exc, correlations_closed_reservoir_one_exc,
    correlations_closed_reservoir_two_exc, quantum_correlation_closed_one_exc,
    quantum_correlation_closed_two_exc,
};
pub use concurrence::{concurrence_closed, concurrence_margin, concurrence_wootters, wootters_lambdas};
pub use optimizer::{
    classical_correlation_bruteforce, conditional_entropy_deficit, discord, BlochForm, MeasurementAxis,
    OptimizerSettings,
};

/// Values in [−CLAMP_TOL, 0) coming out of optimizer slack are reported as 0.
pub const CLAMP_TOL: f64 = 1e-8;

/// Which subsystem of a pair is measured.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    First,
    #[default]
    Second,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::First => "first",
            Side::Second => "second",
        }
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Side::First),
            "second" => Ok(Side::Second),
            other => Err(Error::Domain(format!("unknown side '{other}' (first|second)"))),
        }
    }
}

/// How a record's correlation values were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "closed")]
    ClosedForm,
    #[serde(rename = "brute")]
    BruteForce,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed",
            Method::BruteForce => "brute",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Correlation content of one partition at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub time: f64,
    pub partition: Partition,
    pub method: Method,
    pub mutual_info: f64,
    pub classical: f64,
    pub quantum: f64,
    pub concurrence: f64,
    pub measured_side: Side,
}

pub(crate) fn clamp_slack(v: f64) -> f64 {
    if (-CLAMP_TOL..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

pub(crate) fn check_two_qubit(rho: &ComplexMatrix) -> Result<Vec<f64>> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "two-qubit state must be 4x4, got {0}x{0}",
            rho.dim()
        )));
    }
    state_spectrum(rho)
}

/// I(A:B) = S(ρ_A) + S(ρ_B) − S(ρ_AB), bits.
pub fn mutual_information(rho: &ComplexMatrix) -> Result<f64> {
    let spectrum = check_two_qubit(rho)?;
    let s_ab: f64 = spectrum.iter().filter(|&&l| l > 0.0).map(|l| -l * l.log2()).sum();
    let bloch = BlochForm::new(rho);
    Ok(clamp_slack(
        optimizer::qubit_entropy(&bloch.a) + optimizer::qubit_entropy(&bloch.b) - s_ab,
    ))
}

/// Mutual information, C and Q from one brute-force pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForce {
    pub mutual_info: f64,
    pub classical: f64,
    pub quantum: f64,
    pub axis: MeasurementAxis,
}

/// Brute-force analysis shared by `discord` and the sweep engine.
pub fn analyze(rho: &ComplexMatrix, side: Side, settings: OptimizerSettings) -> Result<BruteForce> {
    let mutual_info = mutual_information(rho)?;
    let (classical, axis) = optimizer::optimize(&BlochForm::new(rho), side, settings)?;
    Ok(BruteForce {
        mutual_info,
        classical,
        quantum: clamp_slack(mutual_info - classical),
        axis,
    })
}
