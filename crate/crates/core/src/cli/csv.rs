use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::correlations::CorrelationRecord;
use crate::error::{Error, Result};
use crate::experiments::SweepResult;

pub const HEADER: &str = "time,partition,pipeline,mutual_info,classical,quantum,concurrence,measured_side";

const SIG_DIGITS: usize = 12;

/// C-style `%.12g`: 12 significant digits, trailing zeros dropped,
/// exponent form outside [1e-4, 1e12). Negative zero prints as `0`.
pub fn format_g(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG_DIGITS as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// The CSV document for a set of records, rows in (time, partition, pipeline) order.
pub fn csv_string(records: &[CorrelationRecord]) -> String {
    let mut rows: Vec<&CorrelationRecord> = records.iter().collect();
    rows.sort_by(|a, b| {
        a.time
            .total_cmp(&b.time)
            .then(a.partition.cmp(&b.partition))
            .then(a.method.cmp(&b.method))
    });
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_g(r.time),
            r.partition.label(),
            r.method.label(),
            format_g(r.mutual_info),
            format_g(r.classical),
            format_g(r.quantum),
            format_g(r.concurrence),
            r.measured_side.label()
        );
    }
    out
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidInput, "path has no file name")))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    if result.records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    write_atomic(path, csv_string(&result.records).as_bytes())
}
