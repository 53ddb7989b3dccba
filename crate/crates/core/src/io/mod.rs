//! File formats: measurement traces, antenna patterns, estimate and curve
//! outputs, and the key=value run configuration.
//!
//! Every writer emits numbers in one canonical form (fixed decimal, nine
//! significant digits) and replaces its target atomically, so a file loaded
//! and re-emitted comes back byte-identical.

pub mod config;
mod outputs;
mod pattern;
mod trace;

use std::fs;
use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::Result;

pub use outputs::{estimated_pattern_csv, offline_curve_csv, offline_trace_csv, online_curve_csv, online_trace_csv};
pub use pattern::{load_pattern, parse_pattern, pattern_csv};
pub use trace::{load_trace, parse_trace, MeasurementTrace, TRACE_HEADER};

const SIG_DIGITS: i32 = 9;

/// Fixed-decimal rendering with nine significant digits, e.g. `-78.6960000`,
/// `0.0854109567`, `35.7270000`. Zero is `0`; non-finite values are `NaN`,
/// `inf` and `-inf`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let decimals = |v: f64| (SIG_DIGITS - 1 - v.abs().log10().floor() as i32).max(0) as usize;
    let d = decimals(x);
    let s = format!("{x:.d$}");
    // rounding may carry into the next decade (9.9999999996 -> 10.0000000)
    let rounded: f64 = s.parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    let d2 = decimals(rounded);
    if d2 == d {
        s
    } else {
        format!("{rounded:.d2$}")
    }
}

/// Writes `contents` to a temporary file next to `path`, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let named = |e: std::io::Error| std::io::Error::new(e.kind(), format!("{}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(named)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| named(e.error))?;
    Ok(())
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}
