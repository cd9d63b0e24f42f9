//! `stability` and `list-schemes` subcommand logic.

use crate::artifacts::create;
use crate::runner::resolve_k;
use crate::CliError;
use num_complex::Complex64;
use rfrk::integrators::Method;
use rfrk::stability::{
    eval_poly, imaginary_axis_limit, region_scan, rf_polynomial, stability_polynomial,
    StabilityPolynomial,
};
use rfrk::tableau::{builtin_k_vector, builtin_tableau, BUILTIN_SCHEMES};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

pub const DEFAULT_RESOLUTION: (usize, usize) = (800, 800);
const REGION_RE: (f64, f64) = (-5.0, 1.0);
const REGION_IM: (f64, f64) = (-5.0, 5.0);
const EPS_FAMILY: [f64; 5] = [-0.05, -0.025, 0.0, 0.025, 0.05];

fn real_axis_crossing(p: &StabilityPolynomial) -> f64 {
    let above = |x: f64| eval_poly(p, Complex64::new(x, 0.0)).norm() > 1.0 + 1e-12;
    let mut x = 0.0;
    while !above(x) && x > -100.0 {
        x -= 0.01;
    }
    let (mut lo, mut hi) = (x, x + 0.01);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if above(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Writes region grids for a scheme (base polynomial plus the perturbed
/// family when a k vector is available) and returns a printable summary.
pub fn stability_report(
    scheme: &str,
    k_override: &Option<Vec<f64>>,
    out: &Path,
    resolution: (usize, usize),
) -> Result<String, CliError> {
    let tableau = builtin_tableau(scheme).map_err(|e| CliError::Config(e.to_string()))?;
    let base = stability_polynomial(&tableau);
    let mut text = String::new();
    writeln!(
        text,
        "scheme {} (s = {}, p = {})",
        tableau.name(),
        tableau.stages(),
        tableau.order()
    )
    .unwrap();
    writeln!(
        text,
        "coefficients: {}",
        base.coeffs()
            .iter()
            .map(|d| format!("{d:.12}"))
            .collect::<Vec<_>>()
            .join(", ")
    )
    .unwrap();
    match imaginary_axis_limit(&base, 1e-9) {
        Ok(limit) => writeln!(text, "imaginary-axis limit: {limit:.6}").unwrap(),
        Err(e) => writeln!(text, "imaginary-axis limit: none ({e})").unwrap(),
    }
    writeln!(text, "real-axis limit: {:.6}", real_axis_crossing(&base)).unwrap();

    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;
    let write_grid = |poly: &StabilityPolynomial, path: &Path| -> Result<(), CliError> {
        let grid = region_scan(poly, REGION_RE, REGION_IM, resolution);
        let mut w = create(path)?;
        grid.write_csv(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| CliError::Config(format!("write {}: {e}", path.display())))
    };
    let base_path = out.join(format!("region_{}.csv", tableau.name()));
    write_grid(&base, &base_path)?;
    writeln!(text, "wrote {}", base_path.display()).unwrap();

    // perturbed family when a k vector applies
    let k = match k_override {
        Some(_) => resolve_k(&tableau, Method::RelaxationFree, k_override)?,
        None => builtin_k_vector(&tableau),
    };
    if let Some(k) = k {
        for eps in EPS_FAMILY {
            if eps == 0.0 {
                continue;
            }
            let poly = rf_polynomial(&tableau, &k, eps);
            let path = out.join(format!("region_{}_eps{eps}.csv", tableau.name()));
            write_grid(&poly, &path)?;
            writeln!(text, "wrote {}", path.display()).unwrap();
        }
    }
    Ok(text)
}

/// One line per registered scheme with its stability summary and builtin k.
pub fn list_schemes() -> String {
    let mut text = String::from("name     s  p  imag-axis-limit  builtin-k\n");
    for name in BUILTIN_SCHEMES {
        let t = builtin_tableau(name).unwrap();
        let p = stability_polynomial(&t);
        let limit = match imaginary_axis_limit(&p, 1e-9) {
            Ok(l) => format!("{l:.4}"),
            Err(_) => "none".to_string(),
        };
        let k = builtin_k_vector(&t)
            .map(|k| {
                k.entries()
                    .iter()
                    .map(|v| format!("{v}"))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .unwrap_or_default();
        text.push_str(&format!(
            "{:<8} {}  {}  {:<15}  [{k}]\n",
            t.name(),
            t.stages(),
            t.order(),
            limit
        ));
    }
    text
}
