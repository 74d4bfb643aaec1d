//! Time sweeps over a scenario and the audits run on their output.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{
    analyze, classical_correlation_closed_two_exc, concurrence_closed, concurrence_wootters,
    correlations_closed_reservoir_one_exc, correlations_closed_reservoir_two_exc,
    quantum_correlation_closed_one_exc, CorrelationRecord, Method, OptimizerSettings, Side,
};
use crate::error::{Error, Result};
use crate::linalg::binary_entropy;
use crate::model::{amplitudes_flat, Amplitudes, Family, Partition, Scenario};

/// Closed-form and brute-force values must agree this closely.
pub const AGREEMENT_TOL: f64 = 1e-6;
/// Slack allowed above the initial value in the sum-of-squares audits.
pub const SQUARE_SUM_SLACK: f64 = 1e-9;
/// Largest allowed |Q(ρ_{r1r2}) − Q(ρ_{s1s2}(0))| once the transfer has completed.
pub const TRANSFER_TOL: f64 = 1e-3;
/// Earliest γt at which the transfer check is meaningful.
pub const TRANSFER_MIN_TIME: f64 = 15.0;

/// Which evaluation routes a sweep runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pipeline {
    #[serde(rename = "closed")]
    ClosedForm,
    #[serde(rename = "brute")]
    BruteForce,
    #[default]
    #[serde(rename = "both")]
    Both,
}

impl Pipeline {
    pub fn label(self) -> &'static str {
        match self {
            Pipeline::ClosedForm => "closed",
            Pipeline::BruteForce => "brute",
            Pipeline::Both => "both",
        }
    }

    fn closed(self) -> bool {
        matches!(self, Pipeline::ClosedForm | Pipeline::Both)
    }

    fn brute(self) -> bool {
        matches!(self, Pipeline::BruteForce | Pipeline::Both)
    }
}

impl FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Pipeline::ClosedForm),
            "brute" => Ok(Pipeline::BruteForce),
            "both" => Ok(Pipeline::Both),
            other => Err(Error::Domain(format!("unknown pipeline '{other}' (closed|brute|both)"))),
        }
    }
}

/// Partitions with closed forms.
pub fn has_closed_form(p: Partition) -> bool {
    matches!(p, Partition::S1S2 | Partition::R1R2)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SweepOptions {
    pub optimizer: OptimizerSettings,
    pub side: Side,
}

/// Named audit result with its worst-case margin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditOutcome {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the audited quantity (meaning depends on the audit).
    pub margin: f64,
    pub detail: String,
}

impl fmt::Display for AuditOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: margin {:.3e} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.margin,
            self.detail
        )
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub scenario: Scenario,
    /// Ordered by (time, partition, method).
    pub records: Vec<CorrelationRecord>,
    pub audits: Vec<AuditOutcome>,
}

impl SweepResult {
    pub fn records_for(&self, partition: Partition, method: Method) -> impl Iterator<Item = &CorrelationRecord> {
        self.records
            .iter()
            .filter(move |r| r.partition == partition && r.method == method)
    }

    pub fn audits_passed(&self) -> bool {
        self.audits.iter().all(|a| a.passed)
    }
}

/// Exchanging (s1, r1) with (s2, r2) maps the one-excitation state onto itself
/// with α and β swapped, and leaves the two-excitation state unchanged. A
/// first-side measurement is therefore a second-side one with swapped weights.
fn oriented_weights(family: Family, alpha: Complex64, beta: Complex64, side: Side) -> (Complex64, Complex64) {
    match (family, side) {
        (Family::OneExcitation, Side::First) => (beta, alpha),
        _ => (alpha, beta),
    }
}

fn closed_record(
    scenario: &Scenario,
    time: f64,
    amps: Amplitudes,
    partition: Partition,
    side: Side,
) -> Result<CorrelationRecord> {
    let (alpha, beta) = oriented_weights(scenario.family, scenario.alpha, scenario.beta, side);
    let (alpha2, beta2) = (alpha.norm_sqr(), beta.norm_sqr());
    let (xi2, chi2) = (amps.xi2(), amps.chi2());
    // the reservoir pair evolves like the spin pair with ξ and χ exchanged
    let swapped = Amplitudes {
        xi: amps.chi,
        chi: amps.xi,
    };
    let (classical, quantum, concurrence) = match (scenario.family, partition) {
        (Family::TwoExcitation, Partition::S1S2) => {
            let c = classical_correlation_closed_two_exc(beta2, xi2, chi2)?;
            (c, c, concurrence_closed(Family::TwoExcitation, alpha, beta, amps))
        }
        (Family::TwoExcitation, Partition::R1R2) => {
            let (c, q) = correlations_closed_reservoir_two_exc(beta2, xi2, chi2)?;
            (c, q, concurrence_closed(Family::TwoExcitation, alpha, beta, swapped))
        }
        (Family::OneExcitation, Partition::S1S2) => (
            classical_correlation_closed_two_exc(beta2, xi2, chi2)?,
            quantum_correlation_closed_one_exc(alpha2, xi2, chi2)?,
            concurrence_closed(Family::OneExcitation, alpha, beta, amps),
        ),
        (Family::OneExcitation, Partition::R1R2) => {
            let (c, q) = correlations_closed_reservoir_one_exc(alpha2, xi2, chi2)?;
            (c, q, concurrence_closed(Family::OneExcitation, alpha, beta, swapped))
        }
        (_, other) => return Err(Error::NoClosedForm(other.label().into())),
    };
    Ok(CorrelationRecord {
        time,
        partition,
        method: Method::ClosedForm,
        mutual_info: classical + quantum,
        classical,
        quantum,
        concurrence,
        measured_side: side,
    })
}

fn sweep_point(
    scenario: &Scenario,
    time: f64,
    partitions: &[Partition],
    pipeline: Pipeline,
    options: SweepOptions,
) -> Result<Vec<CorrelationRecord>> {
    let amps = scenario.amplitudes(time)?;
    let state = scenario.state_at(time)?;
    let mut out = Vec::with_capacity(partitions.len() * 2);
    for &partition in partitions {
        if pipeline.closed() && has_closed_form(partition) {
            out.push(closed_record(scenario, time, amps, partition, options.side)?);
        }
        if pipeline.brute() {
            let rho = state.reduced(partition);
            let bf = analyze(&rho, options.side, options.optimizer)?;
            out.push(CorrelationRecord {
                time,
                partition,
                method: Method::BruteForce,
                mutual_info: bf.mutual_info,
                classical: bf.classical,
                quantum: bf.quantum,
                concurrence: concurrence_wootters(&rho)?,
                measured_side: options.side,
            });
        }
    }
    Ok(out)
}

/// Evaluates every (time, partition) pair of the scenario.
///
/// Time points are processed in parallel and merged in grid order, so the
/// records do not depend on the number of worker threads.
pub fn run_sweep(
    scenario: &Scenario,
    partitions: &[Partition],
    pipeline: Pipeline,
    options: SweepOptions,
) -> Result<SweepResult> {
    let mut partitions = partitions.to_vec();
    partitions.sort_unstable();
    partitions.dedup();
    if partitions.is_empty() {
        return Err(Error::Domain("no partitions requested".into()));
    }
    if pipeline == Pipeline::ClosedForm {
        if let Some(p) = partitions.iter().find(|p| !has_closed_form(**p)) {
            return Err(Error::NoClosedForm(p.label().into()));
        }
    }
    let per_time: Vec<Vec<CorrelationRecord>> = scenario
        .time_grid
        .par_iter()
        .map(|&t| sweep_point(scenario, t, &partitions, pipeline, options))
        .collect::<Result<_>>()?;
    let records: Vec<CorrelationRecord> = per_time.into_iter().flatten().collect();

    let mut audits = Vec::new();
    if pipeline == Pipeline::Both && partitions.iter().any(|p| has_closed_form(*p)) {
        audits.push(agreement_audit(&records));
    }
    Ok(SweepResult {
        scenario: scenario.clone(),
        records,
        audits,
    })
}

/// Largest closed-form vs brute-force discrepancy over all covered records.
pub fn agreement_audit(records: &[CorrelationRecord]) -> AuditOutcome {
    let mut worst = 0.0_f64;
    let mut worst_at = String::from("-");
    let mut pairs = 0;
    for closed in records.iter().filter(|r| r.method == Method::ClosedForm) {
        let Some(brute) = records.iter().find(|r| {
            r.method == Method::BruteForce && r.partition == closed.partition && r.time == closed.time
        }) else {
            continue;
        };
        pairs += 1;
        for (name, a, b) in [
            ("mutual_info", closed.mutual_info, brute.mutual_info),
            ("classical", closed.classical, brute.classical),
            ("quantum", closed.quantum, brute.quantum),
            ("concurrence", closed.concurrence, brute.concurrence),
        ] {
            let d = (a - b).abs();
            if d > worst || d.is_nan() {
                worst = d;
                worst_at = format!("{name} {} t={}", closed.partition, closed.time);
            }
        }
    }
    AuditOutcome {
        name: "closed_vs_brute".into(),
        passed: worst <= AGREEMENT_TOL,
        margin: worst,
        detail: format!("{pairs} record pairs, worst at {worst_at}, tolerance {AGREEMENT_TOL:e}"),
    }
}

/// Quantity summed in the sum-of-squares audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Quantum,
    Classical,
    Concurrence,
}

impl Measure {
    pub fn label(self) -> &'static str {
        match self {
            Measure::Quantum => "Q",
            Measure::Classical => "C",
            Measure::Concurrence => "Con",
        }
    }

    fn of(self, r: &CorrelationRecord) -> f64 {
        match self {
            Measure::Quantum => r.quantum,
            Measure::Classical => r.classical,
            Measure::Concurrence => r.concurrence,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SumOfSquaresAudit {
    /// Passes iff every sample stays within `SQUARE_SUM_SLACK` of the initial value.
    pub outcome: AuditOutcome,
    /// (time, Σ measure²) over s1s2, s1r2, s2r1, r1r2.
    pub series: Vec<(f64, f64)>,
    /// Whether no consecutive sample rises by more than `SQUARE_SUM_SLACK`.
    pub non_increasing: bool,
    pub max_step_increase: f64,
}

/// Checks Σ_p measure(ρ_p(t))² ≤ Σ_p measure(ρ_p(0))² over the four
/// non-interacting pairs. Closed-form records are preferred when both exist.
pub fn sum_of_squares_audit(result: &SweepResult, measure: Measure) -> Result<SumOfSquaresAudit> {
    let mut by_time: BTreeMap<u64, (f64, BTreeMap<Partition, (Method, f64)>)> = BTreeMap::new();
    for r in &result.records {
        if !Partition::SQUARE_SUM.contains(&r.partition) {
            continue;
        }
        let entry = by_time.entry(r.time.to_bits()).or_insert((r.time, BTreeMap::new()));
        let value = measure.of(r);
        entry
            .1
            .entry(r.partition)
            .and_modify(|slot| {
                if r.method < slot.0 {
                    *slot = (r.method, value);
                }
            })
            .or_insert((r.method, value));
    }
    let mut series: Vec<(f64, f64)> = Vec::with_capacity(by_time.len());
    for (time, parts) in by_time.values() {
        if parts.len() != Partition::SQUARE_SUM.len() {
            let missing: Vec<&str> = Partition::SQUARE_SUM
                .iter()
                .filter(|p| !parts.contains_key(p))
                .map(|p| p.label())
                .collect();
            return Err(Error::Domain(format!(
                "sum-of-squares audit needs s1s2, s1r2, s2r1, r1r2; missing {missing:?} at t={time}"
            )));
        }
        series.push((*time, parts.values().map(|(_, v)| v * v).sum()));
    }
    series.sort_by(|a, b| a.0.total_cmp(&b.0));
    let Some(&(_, initial)) = series.first() else {
        return Err(Error::EmptyRecords);
    };
    let excess = series.iter().map(|&(_, v)| v - initial).fold(f64::NEG_INFINITY, f64::max);
    let max_step_increase = series
        .windows(2)
        .map(|w| w[1].1 - w[0].1)
        .fold(f64::NEG_INFINITY, f64::max);
    let name = format!("{}(t)^2 <= {}(0)^2", measure.label(), measure.label());
    Ok(SumOfSquaresAudit {
        outcome: AuditOutcome {
            passed: excess <= SQUARE_SUM_SLACK,
            margin: excess,
            detail: format!(
                "{} samples, initial {initial:.6e}, max step increase {max_step_increase:.3e}",
                series.len()
            ),
            name,
        },
        non_increasing: series.len() < 2 || max_step_increase <= SQUARE_SUM_SLACK,
        max_step_increase,
        series,
    })
}

/// Tail window and tolerance band for the asymptotic ratio audits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioBand {
    /// Samples before this dimensionless time are ignored.
    pub tail_start: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Default for RatioBand {
    fn default() -> Self {
        Self {
            tail_start: 8.0,
            lo: 0.9,
            hi: 1.1,
        }
    }
}

impl RatioBand {
    fn contains(&self, r: f64) -> bool {
        (self.lo..=self.hi).contains(&r)
    }
}

#[derive(Debug, Clone)]
pub struct AsymptoticAudit {
    pub outcome: AuditOutcome,
    /// (time, ratio) on the tail.
    pub samples: Vec<(f64, f64)>,
    pub in_band: bool,
}

/// exact/asymptotic, with 0/0 (up to round-off) read as 1
fn ratio(exact: f64, asymptotic: f64) -> f64 {
    if asymptotic == 0.0 && exact.abs() < 1e-12 {
        1.0
    } else {
        exact / asymptotic
    }
}

fn tail(times: &[f64], band: RatioBand) -> Result<Vec<f64>> {
    let mut t: Vec<f64> = times.iter().copied().filter(|&t| t >= band.tail_start).collect();
    t.sort_by(f64::total_cmp);
    if t.is_empty() {
        return Err(Error::Domain(format!(
            "no sample at or after the tail start {}",
            band.tail_start
        )));
    }
    Ok(t)
}

/// Late-time C of the spin pair (two-excitation family, flat spectrum) against
/// (|β|² − |β|⁴) γt e^{−2γt} / ln 2.
///
/// Passes iff |ratio − 1| does not grow along the sampled tail; whether every
/// ratio lies in `band` is reported in `in_band`.
pub fn check_asymptotic_flat_c(beta2: f64, gamma_times: &[f64], band: RatioBand) -> Result<AsymptoticAudit> {
    let mut samples = Vec::new();
    for t in tail(gamma_times, band)? {
        let a = amplitudes_flat(t)?;
        let exact = classical_correlation_closed_two_exc(beta2, a.xi2(), a.chi2())?;
        let asym = (beta2 - beta2 * beta2) * t * (-2.0 * t).exp() / std::f64::consts::LN_2;
        samples.push((t, ratio(exact, asym)));
    }
    Ok(ratio_audit(format!("C tail ratio (beta2={beta2:.4})"), samples, band, true))
}

fn ratio_audit(name: String, samples: Vec<(f64, f64)>, band: RatioBand, pass_on_trend: bool) -> AsymptoticAudit {
    let in_band = samples.iter().all(|&(_, r)| band.contains(r));
    let approaching = samples
        .windows(2)
        .all(|w| (w[1].1 - 1.0).abs() <= (w[0].1 - 1.0).abs());
    let worst = samples.iter().map(|&(_, r)| (r - 1.0).abs()).fold(0.0, f64::max);
    let finite = samples.iter().all(|&(_, r)| r.is_finite());
    let passed = finite && if pass_on_trend { approaching } else { in_band };
    AsymptoticAudit {
        outcome: AuditOutcome {
            name,
            passed,
            margin: worst,
            detail: format!(
                "{} tail samples, |ratio-1| {}, {} band [{}, {}]",
                samples.len(),
                if approaching { "non-increasing" } else { "grows" },
                if in_band { "inside" } else { "outside" },
                band.lo,
                band.hi
            ),
        },
        samples,
        in_band,
    }
}

/// Late-time transfer checks for a flat spectrum.
///
/// two_exc: |Q(ρ_{r1r2}(t)) − Q(ρ_{s1s2}(0))| < 1e-3 at every γt ≥ 15 given.
/// one_exc: Q(ρ_{s1s2}(t)) / [H(|α|²) e^{−γt}] inside `band` on the tail.
pub fn check_asymptotic_reservoir(
    family: Family,
    alpha2: f64,
    gamma_times: &[f64],
    band: RatioBand,
) -> Result<AsymptoticAudit> {
    if !(0.0..=1.0).contains(&alpha2) {
        return Err(Error::Domain(format!("alpha2 = {alpha2} outside [0, 1]")));
    }
    let beta2 = 1.0 - alpha2;
    match family {
        Family::TwoExcitation => {
            if let Some(t) = gamma_times.iter().find(|&&t| t < TRANSFER_MIN_TIME) {
                return Err(Error::Domain(format!(
                    "transfer check needs γt >= {TRANSFER_MIN_TIME}, got {t}"
                )));
            }
            if gamma_times.is_empty() {
                return Err(Error::Domain("no sample times".into()));
            }
            let initial = classical_correlation_closed_two_exc(beta2, 1.0, 0.0)?;
            let mut samples = Vec::new();
            let mut worst = 0.0_f64;
            for &t in gamma_times {
                let a = amplitudes_flat(t)?;
                let (_, q) = correlations_closed_reservoir_two_exc(beta2, a.xi2(), a.chi2())?;
                worst = worst.max((q - initial).abs());
                samples.push((t, ratio(q, initial)));
            }
            Ok(AsymptoticAudit {
                outcome: AuditOutcome {
                    name: format!("reservoir transfer (beta2={beta2:.4})"),
                    passed: worst < TRANSFER_TOL,
                    margin: worst,
                    detail: format!("Q(0) = {initial:.6}, tolerance {TRANSFER_TOL:e}"),
                },
                in_band: samples.iter().all(|&(_, r)| band.contains(r)),
                samples,
            })
        }
        Family::OneExcitation => {
            let q0 = binary_entropy(alpha2);
            let mut samples = Vec::new();
            for t in tail(gamma_times, band)? {
                let a = amplitudes_flat(t)?;
                let q = quantum_correlation_closed_one_exc(alpha2, a.xi2(), a.chi2())?;
                samples.push((t, ratio(q, q0 * (-t).exp())));
            }
            Ok(ratio_audit(format!("Q tail ratio (alpha2={alpha2:.4})"), samples, band, false))
        }
    }
}

/// max |Q − C| over the given partitions and method.
pub fn equality_gap(result: &SweepResult, partitions: &[Partition], method: Method) -> f64 {
    result
        .records
        .iter()
        .filter(|r| r.method == method && partitions.contains(&r.partition))
        .map(|r| (r.quantum - r.classical).abs())
        .fold(0.0, f64::max)
}

/// Number of strict sign changes, ignoring exact zeros.
pub fn sign_changes(values: &[f64]) -> usize {
    let signs: Vec<bool> = values.iter().filter(|v| **v != 0.0).map(|v| *v > 0.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Interior strict local maxima.
pub fn local_maxima(values: &[f64]) -> usize {
    values
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] > w[2])
        .count()
}

/// Root of `f` on [lo, hi] by bisection; `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect(mut f: impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::Domain(format!("no sign change on [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn yes() -> bool {
    true
}

/// Audit groups run by [`run_audits`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditToggles {
    /// Closed form vs brute force, Q = C (two_exc), closed vs Wootters concurrence.
    #[serde(default = "yes")]
    pub agreement: bool,
    #[serde(default = "yes")]
    pub sum_of_squares: bool,
    /// Late-time checks; flat spectrum only.
    #[serde(default = "yes")]
    pub asymptotic: bool,
}

impl Default for AuditToggles {
    fn default() -> Self {
        Self {
            agreement: true,
            sum_of_squares: true,
            asymptotic: true,
        }
    }
}

/// Every enabled audit applicable to a scenario, swept over its own time grid
/// on the four sum-of-squares partitions.
pub fn run_audits(scenario: &Scenario, options: SweepOptions, toggles: AuditToggles) -> Result<Vec<AuditOutcome>> {
    let mut audits = Vec::new();
    if toggles.agreement || toggles.sum_of_squares {
        let pipeline = if toggles.agreement { Pipeline::Both } else { Pipeline::BruteForce };
        let sweep = run_sweep(scenario, &Partition::SQUARE_SUM, pipeline, options)?;
        if toggles.agreement {
            audits.extend(sweep.audits.iter().cloned());
            if scenario.family == Family::TwoExcitation {
                let gap = equality_gap(&sweep, &[Partition::S1S2, Partition::R1R2], Method::BruteForce);
                audits.push(AuditOutcome {
                    name: "Q = C (two_exc)".into(),
                    passed: gap < AGREEMENT_TOL,
                    margin: gap,
                    detail: "s1s2 and r1r2, brute force".into(),
                });
            }
            let mut worst = 0.0_f64;
            for closed in sweep.records_for(Partition::S1S2, Method::ClosedForm) {
                if let Some(brute) = sweep
                    .records_for(Partition::S1S2, Method::BruteForce)
                    .find(|b| b.time == closed.time)
                {
                    worst = worst.max((closed.concurrence - brute.concurrence).abs());
                }
            }
            audits.push(AuditOutcome {
                name: "concurrence closed vs Wootters".into(),
                passed: worst < 1e-9,
                margin: worst,
                detail: "s1s2, tolerance 1e-9".into(),
            });
        }
        if toggles.sum_of_squares {
            for m in [Measure::Quantum, Measure::Classical, Measure::Concurrence] {
                audits.push(sum_of_squares_audit(&sweep, m)?.outcome);
            }
        }
    }
    if toggles.asymptotic && scenario.spectral.is_flat() {
        let band = RatioBand::default();
        let tail_times: Vec<f64> = (0..=8).map(|k| band.tail_start + 0.5 * k as f64).collect();
        if scenario.family == Family::TwoExcitation {
            audits.push(check_asymptotic_flat_c(scenario.beta2(), &tail_times, band)?.outcome);
            audits.push(check_asymptotic_reservoir(scenario.family, scenario.alpha2(), &[20.0], band)?.outcome);
        } else {
            audits.push(check_asymptotic_reservoir(scenario.family, scenario.alpha2(), &tail_times, band)?.outcome);
        }
    }
    Ok(audits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{linear_grid, SpectralDensity};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell_flat(times: Vec<f64>) -> Scenario {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Scenario::new(Family::TwoExcitation, c(r), c(r), SpectralDensity::flat(1.0).unwrap(), times).unwrap()
    }

    fn fast() -> SweepOptions {
        SweepOptions {
            optimizer: OptimizerSettings::new(32, 3).unwrap(),
            side: Side::Second,
        }
    }

    #[test]
    fn bell_flat_spin_decays_reservoir_grows() {
        let times: Vec<f64> = (0..=10).map(|k| 0.5 * k as f64).collect();
        let res = run_sweep(
            &bell_flat(times),
            &[Partition::S1S2, Partition::R1R2],
            Pipeline::ClosedForm,
            SweepOptions::default(),
        )
        .unwrap();
        let spin: Vec<f64> = res.records_for(Partition::S1S2, Method::ClosedForm).map(|r| r.quantum).collect();
        let bath: Vec<f64> = res.records_for(Partition::R1R2, Method::ClosedForm).map(|r| r.quantum).collect();
        assert!((spin[0] - 1.0).abs() < 1e-15 && bath[0] == 0.0);
        assert!(spin.windows(2).all(|w| w[1] < w[0]));
        assert!(bath.windows(2).all(|w| w[1] > w[0]));
        assert!(bath.iter().all(|&q| q < 1.0));
        for r in &res.records {
            assert_eq!(r.quantum, r.classical);
        }
    }

    #[test]
    fn one_exc_initial_quantum_correlation() {
        let s = Scenario::new(
            Family::OneExcitation,
            c(0.1f64.sqrt()),
            c(0.9f64.sqrt()),
            SpectralDensity::flat(1.0).unwrap(),
            vec![0.0, 1.0, 2.0],
        )
        .unwrap();
        let res = run_sweep(&s, &[Partition::S1S2], Pipeline::ClosedForm, SweepOptions::default()).unwrap();
        let q: Vec<f64> = res.records.iter().map(|r| r.quantum).collect();
        assert!((q[0] - 0.468995593589281).abs() < 1e-12);
        assert!(q[1] < q[0] && q[2] < q[1]);
    }

    #[test]
    fn first_row_reservoir_pairs_are_uncorrelated() {
        let res = run_sweep(&bell_flat(vec![0.0, 1.0]), &Partition::ALL, Pipeline::Both, fast()).unwrap();
        for r in res.records.iter().filter(|r| r.time == 0.0 && r.partition != Partition::S1S2) {
            assert!(r.classical.abs() < 1e-12 && r.quantum.abs() < 1e-12 && r.concurrence < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn closed_pipeline_rejects_uncovered_partition() {
        let err = run_sweep(&bell_flat(vec![0.0]), &[Partition::S1R1], Pipeline::ClosedForm, fast());
        assert!(matches!(err, Err(Error::NoClosedForm(_))));
    }

    #[test]
    fn records_are_ordered_and_complete() {
        let res = run_sweep(&bell_flat(vec![0.0, 0.5, 1.0]), &Partition::ALL, Pipeline::Both, fast()).unwrap();
        assert_eq!(res.records.len(), 3 * (6 + 2));
        let keys: Vec<(u64, Partition, Method)> = res
            .records
            .iter()
            .map(|r| (r.time.to_bits(), r.partition, r.method))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(res.audits_passed(), "{:?}", res.audits);
    }

    #[test]
    fn first_side_closed_forms_match_brute_force() {
        let s = Scenario::new(
            Family::OneExcitation,
            c(0.1f64.sqrt()),
            c(0.9f64.sqrt()),
            SpectralDensity::flat(1.0).unwrap(),
            vec![0.3, 1.1],
        )
        .unwrap();
        let opts = SweepOptions {
            side: Side::First,
            ..SweepOptions::default()
        };
        let res = run_sweep(&s, &[Partition::S1S2, Partition::R1R2], Pipeline::Both, opts).unwrap();
        assert!(res.audits_passed(), "{:?}", res.audits);
    }

    #[test]
    fn sum_of_squares_on_initial_row() {
        let res = run_sweep(&bell_flat(vec![0.0]), &Partition::SQUARE_SUM, Pipeline::Both, fast()).unwrap();
        let audit = sum_of_squares_audit(&res, Measure::Quantum).unwrap();
        assert!(audit.outcome.passed);
        assert!((audit.series[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sum_of_squares_requires_four_partitions() {
        let res = run_sweep(&bell_flat(vec![0.0]), &[Partition::S1S2], Pipeline::ClosedForm, fast()).unwrap();
        assert!(sum_of_squares_audit(&res, Measure::Classical).is_err());
    }

    #[test]
    fn asymptotic_flat_examples() {
        let band = RatioBand::default();
        let half = check_asymptotic_flat_c(0.5, &[10.0], band).unwrap();
        assert!(half.in_band && half.outcome.passed);
        let zero = check_asymptotic_flat_c(0.0, &[8.0, 10.0, 12.0], band).unwrap();
        assert!(zero.outcome.passed && zero.samples.iter().all(|s| s.1 == 1.0));
        let ninety = check_asymptotic_flat_c(0.9, &[8.0, 10.0, 12.0], band).unwrap();
        assert!(ninety.outcome.passed);
        let devs: Vec<f64> = ninety.samples.iter().map(|s| (s.1 - 1.0).abs()).collect();
        assert!(devs[1] < devs[0] && devs[2] < devs[1]);
        assert!(check_asymptotic_flat_c(0.5, &[1.0, 2.0], band).is_err());
    }

    #[test]
    fn asymptotic_reservoir_examples() {
        let band = RatioBand::default();
        let bell = check_asymptotic_reservoir(Family::TwoExcitation, 0.5, &[20.0], band).unwrap();
        assert!(bell.outcome.passed && bell.outcome.margin < 1e-3);
        let one = check_asymptotic_reservoir(Family::OneExcitation, 0.1, &[10.0], band).unwrap();
        assert!(one.outcome.passed && (one.samples[0].1 - 1.0).abs() < 1e-3);
        let none = check_asymptotic_reservoir(Family::OneExcitation, 0.0, &[8.0, 10.0], band).unwrap();
        assert!(none.outcome.passed);
        assert!(check_asymptotic_reservoir(Family::TwoExcitation, 0.5, &[10.0], band).is_err());
    }

    #[test]
    fn helpers() {
        assert_eq!(sign_changes(&[1.0, 0.5, 0.0, -0.2, 0.3, 0.0, 0.1]), 2);
        assert_eq!(local_maxima(&[0.0, 1.0, 0.0, 2.0, 2.0, 1.0, 3.0, 0.0]), 2);
        let root = bisect(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-12).unwrap();
        assert!((root - 2f64.sqrt()).abs() < 1e-12);
        assert!(bisect(|x| Ok(x * x + 1.0), 0.0, 2.0, 1e-12).is_err());
        let g = linear_grid(0.0, 1.0, 3);
        assert_eq!(g, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn pipeline_parsing() {
        assert_eq!("brute".parse::<Pipeline>().unwrap(), Pipeline::BruteForce);
        assert!("fast".parse::<Pipeline>().is_err());
    }
}
