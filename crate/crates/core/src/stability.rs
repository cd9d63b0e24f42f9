//! Linear stability analysis: stability polynomials of explicit schemes, the
//! perturbed polynomial of the relaxation-free update, imaginary-axis limits,
//! and rectangular region scans.

use crate::tableau::{ButcherTableau, KVector};
use num_complex::Complex64;
use std::io::{self, Write};
use thiserror::Error;

/// Slack when classifying `|R| <= 1` on the stability boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

const COARSE_SCAN_STEP: f64 = 0.01;
const VERIFY_GRID_STEP: f64 = 1e-3;
const SCAN_CEILING: f64 = 1000.0;

#[derive(Debug, Error)]
pub enum StabilityError {
    #[error("no stable interval on the imaginary axis")]
    NoStableInterval,
    #[error("|R(iy)| never exceeded 1 below y = {0}")]
    NoCrossingFound(f64),
}

/// Amplification polynomial `R(z) = sum_j d_j z^j` of one step on `u' = l u`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityPolynomial {
    coeffs: Vec<f64>,
}

impl StabilityPolynomial {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty());
        StabilityPolynomial { coeffs }
    }

    /// `d_0 ..= d_s`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        eval_poly(self, z)
    }
}

/// Coefficients `d_0 = 1`, `d_j = b^T A^(j-1) e`, exact for explicit schemes
/// because `A` is nilpotent.
pub fn stability_polynomial(t: &ButcherTableau) -> StabilityPolynomial {
    let s = t.stages();
    let mut coeffs = Vec::with_capacity(s + 1);
    coeffs.push(1.0);
    let mut v = vec![1.0; s];
    for _ in 1..=s {
        coeffs.push(t.b().iter().zip(&v).map(|(bi, vi)| bi * vi).sum());
        v = apply_a(t, &v);
    }
    StabilityPolynomial { coeffs }
}

/// Polynomial of the relaxation-free step with weights `b + eps k`:
/// adds `eps * k^T A^(j-1) e` to each `d_j`. The degree-1 term is untouched
/// because `sum k_i = 0`.
pub fn rf_polynomial(t: &ButcherTableau, k: &KVector, eps: f64) -> StabilityPolynomial {
    let base = stability_polynomial(t);
    let s = t.stages();
    let mut coeffs = base.coeffs;
    let mut v = vec![1.0; s];
    for cj in coeffs.iter_mut().skip(1) {
        let kt: f64 = k.entries().iter().zip(&v).map(|(ki, vi)| ki * vi).sum();
        *cj += eps * kt;
        v = apply_a(t, &v);
    }
    StabilityPolynomial { coeffs }
}

fn apply_a(t: &ButcherTableau, v: &[f64]) -> Vec<f64> {
    let s = t.stages();
    (0..s)
        .map(|i| (0..s).map(|j| t.a(i, j) * v[j]).sum())
        .collect()
}

/// Horner evaluation.
pub fn eval_poly(p: &StabilityPolynomial, z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for d in p.coeffs.iter().rev() {
        acc = acc * z + d;
    }
    acc
}

/// Largest `y` such that `|R(iy)| <= 1 + BOUNDARY_TOL` on the connected
/// interval from 0, bisected to `tol`.
///
/// Scans upward in steps of 0.01 for the first crossing; a crossing at the
/// very first probe means there is no stable interval. The returned limit is
/// re-verified on a 1e-3 grid so an excursion between coarse probes moves the
/// bracket instead of being skipped.
pub fn imaginary_axis_limit(p: &StabilityPolynomial, tol: f64) -> Result<f64, StabilityError> {
    let above = |y: f64| eval_poly(p, Complex64::new(0.0, y)).norm() > 1.0 + BOUNDARY_TOL;

    let mut y = COARSE_SCAN_STEP;
    while !above(y) {
        y += COARSE_SCAN_STEP;
        if y > SCAN_CEILING {
            return Err(StabilityError::NoCrossingFound(SCAN_CEILING));
        }
    }
    if y <= COARSE_SCAN_STEP {
        return Err(StabilityError::NoStableInterval);
    }
    let mut bracket = (y - COARSE_SCAN_STEP, y);

    loop {
        let limit = bisect(&above, bracket.0, bracket.1, tol);
        // confirm the whole interval [0, limit] is stable at the fine grid
        let mut yv = VERIFY_GRID_STEP;
        let mut excursion = None;
        while yv < limit {
            if above(yv) {
                excursion = Some(yv);
                break;
            }
            yv += VERIFY_GRID_STEP;
        }
        match excursion {
            None => return Ok(limit),
            Some(bad) => {
                if bad <= VERIFY_GRID_STEP {
                    return Err(StabilityError::NoStableInterval);
                }
                bracket = (bad - VERIFY_GRID_STEP, bad);
            }
        }
    }
}

fn bisect(above: &dyn Fn(f64) -> bool, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `|R|` sampled on a rectangular grid, row-major with `re` varying fastest.
#[derive(Debug, Clone)]
pub struct RegionGrid {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub abs_r: Vec<f64>,
}

impl RegionGrid {
    pub fn value(&self, i_im: usize, i_re: usize) -> f64 {
        self.abs_r[i_im * self.re.len() + i_re]
    }

    /// CSV with header `re,im,absR`, one sample per line, floats at 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "re,im,absR")?;
        for (i_im, im) in self.im.iter().enumerate() {
            for (i_re, re) in self.re.iter().enumerate() {
                writeln!(w, "{:.16e},{:.16e},{:.16e}", re, im, self.value(i_im, i_re))?;
            }
        }
        Ok(())
    }
}

/// Samples `|R|` over `re_range x im_range` at `resolution` points per axis.
/// The default scan used for region artifacts is 800 x 800 over
/// `[-5, 1] x [-5, 5]`.
pub fn region_scan(
    p: &StabilityPolynomial,
    re_range: (f64, f64),
    im_range: (f64, f64),
    resolution: (usize, usize),
) -> RegionGrid {
    let (n_re, n_im) = resolution;
    assert!(n_re >= 2 && n_im >= 2, "need at least 2 samples per axis");
    let lin = |a: f64, b: f64, n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    };
    let re = lin(re_range.0, re_range.1, n_re);
    let im = lin(im_range.0, im_range.1, n_im);
    let mut abs_r = Vec::with_capacity(n_re * n_im);
    for y in &im {
        for x in &re {
            abs_r.push(eval_poly(p, Complex64::new(*x, *y)).norm());
        }
    }
    RegionGrid { re, im, abs_r }
}
