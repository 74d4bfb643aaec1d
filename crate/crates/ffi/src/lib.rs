//! C ABI over `spinboson-core`.
//!
//! Every fallible call returns an [`SbStatus`]; on failure a message is kept
//! per thread and can be read with [`sb_last_error_message`]. Scenarios and
//! sweeps are opaque heap handles released with their `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use num_complex::Complex64;
use spinboson_core::cli::config::RunConfig;
use spinboson_core::cli::csv::emit_csv;
use spinboson_core::correlations::{
    analyze, classical_correlation_closed_two_exc, concurrence_wootters, CorrelationRecord, Method,
    OptimizerSettings, Side,
};
use spinboson_core::experiments::{run_sweep, Pipeline, SweepOptions, SweepResult};
use spinboson_core::linalg::ComplexMatrix;
use spinboson_core::model::{linear_grid, Family, Partition, Scenario, SpectralDensity};
use spinboson_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NoClosedForm = 3,
    Config = 4,
    Io = 5,
    Numerical = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbFamily {
    TwoExcitation = 0,
    OneExcitation = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbSpectrum {
    /// `param1` = γ, `param2` unused.
    Flat = 0,
    /// `param1` = W, `param2` = λ.
    Lorentz = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbPartition {
    S1S2 = 0,
    R1R2 = 1,
    S1R1 = 2,
    S1R2 = 3,
    S2R1 = 4,
    S2R2 = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbPipeline {
    Closed = 0,
    Brute = 1,
    Both = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbSide {
    First = 0,
    Second = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbMethod {
    Closed = 0,
    Brute = 1,
}

/// One sweep record.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbRecord {
    pub time: f64,
    pub partition: SbPartition,
    pub method: SbMethod,
    pub mutual_info: f64,
    pub classical: f64,
    pub quantum: f64,
    pub concurrence: f64,
    pub measured_side: SbSide,
}

/// Mutual information, classical correlation and discord of a two-qubit state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SbCorrelations {
    pub mutual_info: f64,
    pub classical: f64,
    pub quantum: f64,
}

/// Opaque scenario handle.
pub struct SbScenario(Scenario);

/// Opaque sweep handle.
pub struct SbSweep(SweepResult);

/// `partition_mask` value selecting all six partitions in [`sb_sweep_run`].
pub const SB_PARTITION_ALL: u32 = 0x3f;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> SbStatus {
    match e {
        Error::NoClosedForm(_) => SbStatus::NoClosedForm,
        Error::Config(_) => SbStatus::Config,
        Error::Io(_) => SbStatus::Io,
        Error::NotHermitian(_) | Error::NotAState(_) => SbStatus::Numerical,
        _ => SbStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (SbStatus, String)>) -> SbStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SbStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SbStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (SbStatus, String)>;
}

impl<T> IntoFfi<T> for spinboson_core::Result<T> {
    fn ffi(self) -> Result<T, (SbStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (SbStatus, String) {
    (SbStatus::NullPointer, format!("{what} is null"))
}

fn partition_from(p: Partition) -> SbPartition {
    match p {
        Partition::S1S2 => SbPartition::S1S2,
        Partition::R1R2 => SbPartition::R1R2,
        Partition::S1R1 => SbPartition::S1R1,
        Partition::S1R2 => SbPartition::S1R2,
        Partition::S2R1 => SbPartition::S2R1,
        Partition::S2R2 => SbPartition::S2R2,
    }
}

fn side_into(s: SbSide) -> Side {
    match s {
        SbSide::First => Side::First,
        SbSide::Second => Side::Second,
    }
}

fn record_from(r: &CorrelationRecord) -> SbRecord {
    SbRecord {
        time: r.time,
        partition: partition_from(r.partition),
        method: match r.method {
            Method::ClosedForm => SbMethod::Closed,
            Method::BruteForce => SbMethod::Brute,
        },
        mutual_info: r.mutual_info,
        classical: r.classical,
        quantum: r.quantum,
        concurrence: r.concurrence,
        measured_side: match r.measured_side {
            Side::First => SbSide::First,
            Side::Second => SbSide::Second,
        },
    }
}

unsafe fn read_rho(re: *const f64, im: *const f64) -> Result<ComplexMatrix, (SbStatus, String)> {
    if re.is_null() || im.is_null() {
        return Err(null("density matrix"));
    }
    let (re, im) = (std::slice::from_raw_parts(re, 16), std::slice::from_raw_parts(im, 16));
    ComplexMatrix::from_fn(4, |i, j| Complex64::new(re[4 * i + j], im[4 * i + j])).ffi()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn sb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static nul-terminated string.
#[no_mangle]
pub extern "C" fn sb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a scenario on a uniform grid of `time_steps` points from
/// `time_start` to `time_end` (dimensionless γt or λt).
#[no_mangle]
pub unsafe extern "C" fn sb_scenario_new(
    family: SbFamily,
    alpha_re: f64,
    alpha_im: f64,
    beta_re: f64,
    beta_im: f64,
    spectrum: SbSpectrum,
    param1: f64,
    param2: f64,
    time_start: f64,
    time_end: f64,
    time_steps: usize,
    out: *mut *mut SbScenario,
) -> SbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spectral = match spectrum {
            SbSpectrum::Flat => SpectralDensity::flat(param1),
            SbSpectrum::Lorentz => SpectralDensity::lorentz(param1, param2),
        }
        .ffi()?;
        if time_steps < 1 || !(time_end >= time_start) {
            return Err((SbStatus::InvalidArgument, "need time_steps >= 1 and time_end >= time_start".into()));
        }
        let times = if time_steps == 1 {
            vec![time_start]
        } else {
            linear_grid(time_start, time_end, time_steps)
        };
        let family = match family {
            SbFamily::TwoExcitation => Family::TwoExcitation,
            SbFamily::OneExcitation => Family::OneExcitation,
        };
        let s = Scenario::new(
            family,
            Complex64::new(alpha_re, alpha_im),
            Complex64::new(beta_re, beta_im),
            spectral,
            times,
        )
        .ffi()?;
        *out = Box::into_raw(Box::new(SbScenario(s)));
        Ok(())
    })
}

/// Builds a scenario from a JSON run configuration.
#[no_mangle]
pub unsafe extern "C" fn sb_scenario_from_json(json: *const c_char, out: *mut *mut SbScenario) -> SbStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| (SbStatus::InvalidArgument, "json is not UTF-8".to_string()))?;
        let s = RunConfig::parse(text).and_then(|c| c.scenario()).ffi()?;
        *out = Box::into_raw(Box::new(SbScenario(s)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn sb_scenario_free(scenario: *mut SbScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

#[no_mangle]
pub unsafe extern "C" fn sb_scenario_time_count(scenario: *const SbScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.0.time_grid.len())
}

/// Sweeps `scenario` over the partitions whose bits (1 << SbPartition) are
/// set in `partition_mask`. `grid` and `refine` configure the measurement search.
#[no_mangle]
pub unsafe extern "C" fn sb_sweep_run(
    scenario: *const SbScenario,
    partition_mask: u32,
    pipeline: SbPipeline,
    side: SbSide,
    grid: usize,
    refine: usize,
    out: *mut *mut SbSweep,
) -> SbStatus {
    guard(|| {
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if partition_mask & !SB_PARTITION_ALL != 0 {
            return Err((SbStatus::InvalidArgument, format!("unknown partition bits in {partition_mask:#x}")));
        }
        let partitions: Vec<Partition> = Partition::ALL
            .into_iter()
            .filter(|p| partition_mask & (1 << partition_from(*p) as u32) != 0)
            .collect();
        let pipeline = match pipeline {
            SbPipeline::Closed => Pipeline::ClosedForm,
            SbPipeline::Brute => Pipeline::BruteForce,
            SbPipeline::Both => Pipeline::Both,
        };
        let options = SweepOptions {
            optimizer: OptimizerSettings::new(grid, refine).ffi()?,
            side: side_into(side),
        };
        let res = run_sweep(&s.0, &partitions, pipeline, options).ffi()?;
        *out = Box::into_raw(Box::new(SbSweep(res)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn sb_sweep_free(sweep: *mut SbSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

#[no_mangle]
pub unsafe extern "C" fn sb_sweep_len(sweep: *const SbSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.0.records.len())
}

#[no_mangle]
pub unsafe extern "C" fn sb_sweep_record(sweep: *const SbSweep, index: usize, out: *mut SbRecord) -> SbStatus {
    guard(|| {
        let s = sweep.as_ref().ok_or_else(|| null("sweep"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = s.0.records.get(index).ok_or_else(|| {
            (SbStatus::InvalidArgument, format!("index {index} out of range ({})", s.0.records.len()))
        })?;
        *out = record_from(r);
        Ok(())
    })
}

/// 1 when every audit attached to the sweep passed, 0 otherwise or on null.
#[no_mangle]
pub unsafe extern "C" fn sb_sweep_audits_passed(sweep: *const SbSweep) -> i32 {
    sweep.as_ref().map_or(0, |s| i32::from(s.0.audits_passed()))
}

#[no_mangle]
pub unsafe extern "C" fn sb_sweep_write_csv(sweep: *const SbSweep, path: *const c_char) -> SbStatus {
    guard(|| {
        let s = sweep.as_ref().ok_or_else(|| null("sweep"))?;
        if path.is_null() {
            return Err(null("path"));
        }
        let p = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| (SbStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
        emit_csv(&s.0, Path::new(p)).ffi()
    })
}

/// ξ and χ at dimensionless time `t` (γt or λt); `w_over_lambda` is ignored for a flat spectrum.
#[no_mangle]
pub unsafe extern "C" fn sb_amplitudes(
    spectrum: SbSpectrum,
    w_over_lambda: f64,
    t: f64,
    xi: *mut f64,
    chi: *mut f64,
) -> SbStatus {
    guard(|| {
        if xi.is_null() || chi.is_null() {
            return Err(null("xi/chi"));
        }
        let spectral = match spectrum {
            SbSpectrum::Flat => SpectralDensity::flat(1.0),
            SbSpectrum::Lorentz => SpectralDensity::lorentz(w_over_lambda, 1.0),
        }
        .ffi()?;
        let a = spectral.amplitudes(t).ffi()?;
        *xi = a.xi;
        *chi = a.chi;
        Ok(())
    })
}

/// Brute-force correlations of a 4×4 density matrix given as row-major real
/// and imaginary parts (16 entries each).
#[no_mangle]
pub unsafe extern "C" fn sb_correlations(
    rho_re: *const f64,
    rho_im: *const f64,
    side: SbSide,
    grid: usize,
    refine: usize,
    out: *mut SbCorrelations,
) -> SbStatus {
    guard(|| {
        let rho = read_rho(rho_re, rho_im)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let settings = OptimizerSettings::new(grid, refine).ffi()?;
        let bf = analyze(&rho, side_into(side), settings).ffi()?;
        *out = SbCorrelations {
            mutual_info: bf.mutual_info,
            classical: bf.classical,
            quantum: bf.quantum,
        };
        Ok(())
    })
}

/// Wootters concurrence of a 4×4 density matrix (row-major real/imaginary parts).
#[no_mangle]
pub unsafe extern "C" fn sb_concurrence(rho_re: *const f64, rho_im: *const f64, out: *mut f64) -> SbStatus {
    guard(|| {
        let rho = read_rho(rho_re, rho_im)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = concurrence_wootters(&rho).ffi()?;
        Ok(())
    })
}

/// Closed-form classical correlation (= discord) of the spin pair for the
/// two-excitation family.
#[no_mangle]
pub unsafe extern "C" fn sb_closed_spin_two_exc(beta2: f64, xi2: f64, chi2: f64, out: *mut f64) -> SbStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = classical_correlation_closed_two_exc(beta2, xi2, chi2).ffi()?;
        Ok(())
    })
}
