//! Per-step quadratic for the relaxation-free multiplier epsilon.
//!
//! The coefficients are assembled from the stage Gram matrix elsewhere; this
//! module only solves `A* e^2 + B* e + C* = 0` for the root of smaller
//! magnitude, in the cancellation-free form, with degenerate branches for a
//! vanishing leading coefficient.

use thiserror::Error;

/// Coefficients of the epsilon quadratic together with its discriminant.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticCoeffs {
    pub a_star: f64,
    pub b_star: f64,
    pub c_star: f64,
    pub discriminant: f64,
}

impl QuadraticCoeffs {
    pub fn new(a_star: f64, b_star: f64, c_star: f64) -> Self {
        QuadraticCoeffs {
            a_star,
            b_star,
            c_star,
            discriminant: b_star * b_star - 4.0 * a_star * c_star,
        }
    }

    /// Residual of a candidate root, evaluated term by term.
    pub fn residual(&self, x: f64) -> f64 {
        self.a_star * x * x + self.b_star * x + self.c_star
    }
}

/// The quadratic has no real solution; energy cannot be balanced at this step
/// size.
#[derive(Debug, Clone, Copy, Error)]
#[error("no real root (discriminant {discriminant:e})")]
pub struct NoRealRoot {
    pub discriminant: f64,
}

/// Solves for the smaller-magnitude real root.
///
/// `tol` is the absolute degeneracy threshold for the coefficients (callers
/// scale it by the Gram-matrix and k-vector magnitudes). Branches:
/// `|A*| <= tol` and `|B*| <= tol` yields 0 when `|C*| <= tol` and no-real-root
/// otherwise; `|A*| <= tol` alone falls back to the linear root `-C*/B*`;
/// otherwise the sign of the discriminant decides.
pub fn solve_epsilon(q: &QuadraticCoeffs, tol: f64) -> Result<f64, NoRealRoot> {
    if q.a_star.abs() <= tol {
        if q.b_star.abs() <= tol {
            return if q.c_star.abs() <= tol {
                Ok(0.0)
            } else {
                Err(NoRealRoot {
                    discriminant: q.discriminant,
                })
            };
        }
        return Ok(-q.c_star / q.b_star);
    }
    if q.discriminant < 0.0 {
        return Err(NoRealRoot {
            discriminant: q.discriminant,
        });
    }
    // larger-magnitude intermediate first, then the small root via the product
    let sign_b = if q.b_star >= 0.0 { 1.0 } else { -1.0 };
    let big = -0.5 * (q.b_star + sign_b * q.discriminant.sqrt());
    if big == 0.0 {
        // B* = 0 with discriminant exactly 0 forces C* = 0: double root at 0
        return Ok(0.0);
    }
    Ok(q.c_star / big)
}
