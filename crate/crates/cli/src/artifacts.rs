//! CSV and summary emission. All floats are printed with 17 significant
//! digits so artifacts round-trip exactly and identical configs produce
//! byte-identical files.

use crate::CliError;
use rfrk::integrators::{Control, StepRecord};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// 17-significant-digit decimal form used for every float in every artifact.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Config(format!("cannot create {}: {e}", parent.display())))?;
    }
    let file = File::create(path)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn control_field(c: &Control) -> String {
    match c {
        Control::None => String::new(),
        Control::Gamma(g) => fmt_float(*g),
        Control::Epsilon(e) => fmt_float(*e),
    }
}

/// `t,energy,control` time series, starting with the initial row (blank
/// control column).
pub fn write_timeseries(
    path: &Path,
    t0: f64,
    e0: f64,
    records: &[StepRecord],
) -> Result<(), CliError> {
    let mut w = create(path)?;
    let io = |e: std::io::Error| CliError::Config(format!("write {}: {e}", path.display()));
    writeln!(w, "t,energy,control").map_err(io)?;
    writeln!(w, "{},{},", fmt_float(t0), fmt_float(e0)).map_err(io)?;
    for r in records {
        writeln!(
            w,
            "{},{},{}",
            fmt_float(r.t),
            fmt_float(r.energy),
            control_field(&r.control)
        )
        .map_err(io)?;
    }
    Ok(())
}

/// Per-mode amplitudes and relative amplification; the relative column is
/// blank for modes whose initial amplitude sits below the division floor.
pub fn write_amplification(
    path: &Path,
    initial: &[f64],
    fin: &[f64],
    relative: &[Option<f64>],
) -> Result<(), CliError> {
    let mut w = create(path)?;
    let io = |e: std::io::Error| CliError::Config(format!("write {}: {e}", path.display()));
    writeln!(
        w,
        "k,initial_amplitude,final_amplitude,relative_amplification"
    )
    .map_err(io)?;
    for (k, ((a, b), r)) in initial.iter().zip(fin).zip(relative).enumerate() {
        let rel = r.map(fmt_float).unwrap_or_default();
        writeln!(w, "{k},{},{},{rel}", fmt_float(*a), fmt_float(*b)).map_err(io)?;
    }
    Ok(())
}

/// `x,initial,final` solution profiles.
pub fn write_profile(path: &Path, x: &[f64], initial: &[f64], fin: &[f64]) -> Result<(), CliError> {
    let mut w = create(path)?;
    let io = |e: std::io::Error| CliError::Config(format!("write {}: {e}", path.display()));
    writeln!(w, "x,initial,final").map_err(io)?;
    for ((xi, ui), vi) in x.iter().zip(initial).zip(fin) {
        writeln!(
            w,
            "{},{},{}",
            fmt_float(*xi),
            fmt_float(*ui),
            fmt_float(*vi)
        )
        .map_err(io)?;
    }
    Ok(())
}

/// Generic CSV writer: a header plus preformatted rows.
pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<(), CliError> {
    let mut w = create(path)?;
    let io = |e: std::io::Error| CliError::Config(format!("write {}: {e}", path.display()));
    writeln!(w, "{header}").map_err(io)?;
    for row in rows {
        writeln!(w, "{row}").map_err(io)?;
    }
    Ok(())
}

/// Flat key=value summary, diff-friendly.
pub fn write_kv(path: &Path, pairs: &[(String, String)]) -> Result<(), CliError> {
    let mut w = create(path)?;
    let io = |e: std::io::Error| CliError::Config(format!("write {}: {e}", path.display()));
    for (k, v) in pairs {
        writeln!(w, "{k}={v}").map_err(io)?;
    }
    Ok(())
}
