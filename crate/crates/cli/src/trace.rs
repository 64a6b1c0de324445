//! CSV traces and atomic file output.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use safecov_core::simulation::StepRecord;

pub const CSV_HEADER: &str =
    "t, agent, px, py, ux_nom, uy_nom, ux, uy, h, hbar, theta_hat_norm, dhat_max_norm, neighbor, min_dist, H_cost";

/// Formats `x` with 9 significant digits, like C's `%.9g`.
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..9).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (8 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(sig9).unwrap_or_default()
}

/// Renders the records as CSV text: one row per agent per step, with the
/// step's minimum distance and cost repeated on every row.
pub fn render_csv(records: &[StepRecord]) -> String {
    let agents = records.first().map_or(0, |r| r.agents.len());
    let mut out = String::with_capacity(64 + records.len() * agents * 160);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let min_dist = if r.min_distance.is_nan() {
            String::new()
        } else {
            sig9(r.min_distance)
        };
        let cost = sig9(r.cost);
        let t = sig9(r.t);
        for (i, a) in r.agents.iter().enumerate() {
            let _ = writeln!(
                out,
                "{t}, {i}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {min_dist}, {cost}",
                sig9(a.position.x),
                sig9(a.position.y),
                sig9(a.u_nom.x),
                sig9(a.u_nom.y),
                sig9(a.u.x),
                sig9(a.u.y),
                opt(a.h),
                opt(a.hbar),
                sig9(a.theta_hat.abs()),
                sig9(a.d_hat_max_norm),
                a.neighbor.map(|j| j.to_string()).unwrap_or_default(),
            );
        }
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("no records to write")]
    Empty,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

pub fn emit_trace(records: &[StepRecord], path: &Path) -> Result<(), TraceError> {
    if records.is_empty() {
        return Err(TraceError::Empty);
    }
    write_atomic(path, render_csv(records).as_bytes()).map_err(|source| TraceError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(0.005), "0.005");
        assert_eq!(sig9(29.995), "29.995");
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(-2.0 / 3.0), "-0.666666667");
        assert_eq!(sig9(123456789.4), "123456789");
        assert_eq!(sig9(1234567890.0), "1.23456789e+09");
        assert_eq!(sig9(1.5e-7), "1.5e-07");
        assert_eq!(sig9(0.0001), "0.0001");
        assert_eq!(sig9(f64::NAN), "nan");
    }
}
