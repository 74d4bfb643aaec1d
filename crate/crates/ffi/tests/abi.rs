use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use spinboson_ffi::*;

const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn last_error() -> String {
    let p = sb_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn bell_flat(steps: usize) -> *mut SbScenario {
    let mut s = ptr::null_mut();
    let st = unsafe {
        sb_scenario_new(SbFamily::TwoExcitation, R, 0.0, R, 0.0, SbSpectrum::Flat, 1.0, 0.0, 0.0, 2.0, steps, &mut s)
    };
    assert_eq!(st, SbStatus::Ok);
    s
}

#[test]
fn sweep_round_trip() {
    let s = bell_flat(5);
    assert_eq!(unsafe { sb_scenario_time_count(s) }, 5);
    let mut sw = ptr::null_mut();
    let mask = (1 << SbPartition::S1S2 as u32) | (1 << SbPartition::S1R2 as u32);
    let st = unsafe { sb_sweep_run(s, mask, SbPipeline::Both, SbSide::Second, 32, 3, &mut sw) };
    assert_eq!(st, SbStatus::Ok);
    // s1s2 closed + brute, s1r2 brute, at each of 5 times
    assert_eq!(unsafe { sb_sweep_len(sw) }, 15);
    assert_eq!(unsafe { sb_sweep_audits_passed(sw) }, 1);

    let mut rec = unsafe { std::mem::zeroed::<SbRecord>() };
    assert_eq!(unsafe { sb_sweep_record(sw, 0, &mut rec) }, SbStatus::Ok);
    assert_eq!((rec.partition, rec.method, rec.measured_side), (SbPartition::S1S2, SbMethod::Closed, SbSide::Second));
    assert!((rec.quantum - 1.0).abs() < 1e-12 && (rec.concurrence - 1.0).abs() < 1e-12);
    assert_eq!(unsafe { sb_sweep_record(sw, 15, &mut rec) }, SbStatus::InvalidArgument);
    assert!(last_error().contains("out of range"));

    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("s.csv").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { sb_sweep_write_csv(sw, path.as_ptr()) }, SbStatus::Ok);
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(text.lines().count(), 16);

    unsafe {
        sb_sweep_free(sw);
        sb_scenario_free(s);
    }
}

#[test]
fn error_codes() {
    let s = bell_flat(2);
    let mut sw = ptr::null_mut();
    let mask = 1 << SbPartition::S1R1 as u32;
    let st = unsafe { sb_sweep_run(s, mask, SbPipeline::Closed, SbSide::Second, 16, 1, &mut sw) };
    assert_eq!(st, SbStatus::NoClosedForm);
    assert!(sw.is_null());
    assert!(last_error().contains("s1r1"));

    let st = unsafe { sb_sweep_run(ptr::null(), 1, SbPipeline::Brute, SbSide::Second, 16, 1, &mut sw) };
    assert_eq!(st, SbStatus::NullPointer);
    let st = unsafe { sb_sweep_run(s, 1 << 6, SbPipeline::Brute, SbSide::Second, 16, 1, &mut sw) };
    assert_eq!(st, SbStatus::InvalidArgument);

    let mut bad = ptr::null_mut();
    let st = unsafe {
        sb_scenario_new(SbFamily::OneExcitation, 1.0, 0.0, 1.0, 0.0, SbSpectrum::Flat, 1.0, 0.0, 0.0, 1.0, 3, &mut bad)
    };
    assert_eq!(st, SbStatus::InvalidArgument);
    assert!(bad.is_null());

    let json = CString::new(r#"{"family":"two_exc","alpha_re":1.0,"spectral":{"kind":"flat","gamma":1.0},"time_end":1.0,"time_steps":1}"#).unwrap();
    assert_eq!(unsafe { sb_scenario_from_json(json.as_ptr(), &mut bad) }, SbStatus::Config);
    assert!(last_error().contains("time_steps"));

    // a successful call clears the message
    let mut xi = 0.0;
    let mut chi = 0.0;
    assert_eq!(unsafe { sb_amplitudes(SbSpectrum::Flat, 0.0, 2.0f64.ln(), &mut xi, &mut chi) }, SbStatus::Ok);
    assert!(sb_last_error_message().is_null());
    assert!((xi * xi - 0.5).abs() < 1e-15 && (chi * chi - 0.5).abs() < 1e-15);

    unsafe {
        sb_scenario_free(s);
        sb_scenario_free(ptr::null_mut());
        sb_sweep_free(ptr::null_mut());
    }
}

#[test]
fn json_scenario() {
    let json = CString::new(
        r#"{"family":"one_exc","alpha_re":0.316227766,"beta_re":0.948683298,
            "spectral":{"kind":"lorentz","W":14.142135623730951,"lambda":1.0},"time_end":2.0,"time_steps":7}"#,
    )
    .unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { sb_scenario_from_json(json.as_ptr(), &mut s) }, SbStatus::Ok);
    assert_eq!(unsafe { sb_scenario_time_count(s) }, 7);
    unsafe { sb_scenario_free(s) };
}

#[test]
fn scalar_functions() {
    // Bell state |Φ+⟩⟨Φ+|
    let mut re = [0.0; 16];
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        re[4 * i + j] = 0.5;
    }
    let im = [0.0; 16];
    let mut con = 0.0;
    assert_eq!(unsafe { sb_concurrence(re.as_ptr(), im.as_ptr(), &mut con) }, SbStatus::Ok);
    assert!((con - 1.0).abs() < 1e-14);
    let mut c = SbCorrelations::default();
    assert_eq!(
        unsafe { sb_correlations(re.as_ptr(), im.as_ptr(), SbSide::Second, 32, 3, &mut c) },
        SbStatus::Ok
    );
    assert!((c.mutual_info - 2.0).abs() < 1e-12 && (c.classical - 1.0).abs() < 1e-12 && (c.quantum - 1.0).abs() < 1e-12);

    let mut v = 0.0;
    assert_eq!(unsafe { sb_closed_spin_two_exc(0.5, 0.5, 0.5, &mut v) }, SbStatus::Ok);
    assert!((v - 0.210402087766276763).abs() < 1e-14);

    let mut not_state = re;
    not_state[0] = 5.0;
    assert_eq!(
        unsafe { sb_concurrence(not_state.as_ptr(), im.as_ptr(), &mut con) },
        SbStatus::Numerical
    );
    assert_eq!(unsafe { sb_concurrence(ptr::null(), im.as_ptr(), &mut con) }, SbStatus::NullPointer);

    let version = unsafe { CStr::from_ptr(sb_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_abi_and_compiles() {
    let header_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/spinboson.h");
    let header = std::fs::read_to_string(&header_path).unwrap();
    for name in [
        "sb_scenario_new",
        "sb_scenario_from_json",
        "sb_scenario_free",
        "sb_sweep_run",
        "sb_sweep_record",
        "sb_sweep_free",
        "sb_last_error_message",
        "sb_correlations",
        "sb_concurrence",
        "typedef struct SbScenario SbScenario;",
        "SB_STATUS_NO_CLOSED_FORM = 3",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"spinboson.h\"\nint main(void) { SbRecord r; (void)r; return sb_version() == 0; }\n",
    )
    .unwrap();
    let compiler = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out = Command::new(&compiler)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header_path.parent().unwrap())
        .arg(&src)
        .output()
        .unwrap_or_else(|e| panic!("cannot run C compiler '{compiler}': {e}"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
