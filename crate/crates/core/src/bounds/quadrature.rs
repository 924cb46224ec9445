//! Adaptive Simpson quadrature.
//!
//! [`integrate`] handles finite intervals with a bounded integrand.
//! [`integrate_unit_left_singular`] handles `(0, 1]` when the integrand may
//! blow up integrably at 0 (`log x` and friends): it integrates the panels
//! `[2^-(j+1), 2^-j]` one after another, never evaluating at 0, and stops
//! once the remaining sliver is below tolerance.

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MAX_EVALUATIONS: usize = 20_000_000;

const MAX_DEPTH: u32 = 50;
const INITIAL_PANELS: usize = 16;
const MAX_SINGULAR_PANELS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

struct Simpson<'a, F> {
    f: &'a F,
    evaluations: usize,
    max_evaluations: usize,
    failed: bool,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    fn eval(&mut self, x: f64) -> f64 {
        self.evaluations += 1;
        (self.f)(x)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(&mut self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> (f64, f64) {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (self.eval(lm), self.eval(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || !delta.is_finite() {
            return (left + right + delta / 15.0, delta.abs() / 15.0);
        }
        if depth == 0 || self.evaluations >= self.max_evaluations {
            self.failed = true;
            return (left + right + delta / 15.0, delta.abs() / 15.0);
        }
        let (lv, le) = self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
        let (rv, re) = self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        (lv + rv, le + re)
    }

    fn panel(&mut self, a: f64, b: f64, tol: f64) -> (f64, f64) {
        let (fa, fb) = (self.eval(a), self.eval(b));
        let fm = self.eval(0.5 * (a + b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        self.refine(a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
    }
}

fn finish<F>(s: &Simpson<'_, F>, value: f64, err: f64, tol: f64) -> Result<QuadratureResult> {
    if s.failed || !value.is_finite() || err > tol {
        return Err(Error::Quadrature {
            tolerance: tol,
            evaluations: s.evaluations,
        });
    }
    Ok(QuadratureResult {
        value,
        abs_error_estimate: err,
        evaluations: s.evaluations,
    })
}

/// Integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    integrate_with_budget(f, a, b, tol, DEFAULT_MAX_EVALUATIONS)
}

pub fn integrate_with_budget<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_evaluations: usize,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) || !(a <= b) {
        return Err(Error::InvalidArgument(format!(
            "bad interval [{a}, {b}] or tolerance {tol}"
        )));
    }
    let mut s = Simpson {
        f: &f,
        evaluations: 0,
        max_evaluations,
        failed: false,
    };
    let width = (b - a) / INITIAL_PANELS as f64;
    let panel_tol = tol / INITIAL_PANELS as f64;
    let (mut value, mut err) = (0.0, 0.0);
    for i in 0..INITIAL_PANELS {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == INITIAL_PANELS { b } else { lo + width };
        let (v, e) = s.panel(lo, hi, panel_tol);
        value += v;
        err += e;
    }
    finish(&s, value, err, tol)
}

/// Integral of `f` over `(0, 1]` where `f` may have an integrable
/// singularity at 0.
pub fn integrate_unit_left_singular<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("bad tolerance {tol}")));
    }
    let mut s = Simpson {
        f: &f,
        evaluations: 0,
        max_evaluations: DEFAULT_MAX_EVALUATIONS,
        failed: false,
    };
    let (mut value, mut err) = (0.0, 0.0);
    let mut hi = 1.0f64;
    for j in 0..MAX_SINGULAR_PANELS {
        let lo = 0.5 * hi;
        let (v, e) = s.panel(lo, hi, tol / 2f64.powi(j as i32 + 2));
        value += v;
        err += e;
        hi = lo;
        // What is left is the integral over (0, hi]; bound it by the
        // integrand's size near hi, doubled for the log growth below it.
        let tail = 2.0 * hi * s.eval(hi).abs().max(s.eval(0.5 * hi).abs());
        if j >= 4 && tail < 0.25 * tol {
            return finish(&s, value, err + tail, tol);
        }
        if s.failed {
            break;
        }
    }
    Err(Error::Quadrature {
        tolerance: tol,
        evaluations: s.evaluations,
    })
}
