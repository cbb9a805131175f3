//! Bracketed scalar root finding: a subdivision scan to locate sign changes,
//! then bisection safeguarded secant steps.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Accept when `|f(x)| < residual_tol`.
    pub residual_tol: f64,
    /// Subintervals used to look for sign changes before refining.
    pub scan_points: usize,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { residual_tol: 1e-10, scan_points: 32, max_iter: 200 }
    }
}

#[derive(Debug, Clone)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Number of sign changes seen by the scan.
    pub sign_changes: usize,
}

/// Find a root of `f` in `[lo, hi]`. When the scan sees several sign changes
/// the lowest bracketed root is returned and `sign_changes > 1` reports it.
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, opts: RootOptions) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter { name: "bracket", reason: format!("need lo < hi, got [{lo}, {hi}]") });
    }
    let steps = opts.scan_points.max(1);
    let mut xs = Vec::with_capacity(steps + 1);
    let mut fs = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let x = lo + (hi - lo) * i as f64 / steps as f64;
        xs.push(x);
        fs.push(f(x)?);
    }
    let mut brackets = Vec::new();
    for i in 0..steps {
        if fs[i] == 0.0 || fs[i].signum() != fs[i + 1].signum() {
            brackets.push(i);
        }
    }
    let Some(&first) = brackets.first() else {
        return Err(Error::NoSignChange { lo, hi, f_lo: fs[0], f_hi: fs[steps] });
    };
    let (a, b, fa, fb) = (xs[first], xs[first + 1], fs[first], fs[first + 1]);
    let mut root = refine(&mut f, a, b, fa, fb, opts)?;
    root.sign_changes = brackets.len();
    Ok(root)
}

fn refine<F>(f: &mut F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, opts: RootOptions) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa.abs() < opts.residual_tol {
        return Ok(Root { x: a, residual: fa, iterations: 0, sign_changes: 1 });
    }
    if fb.abs() < opts.residual_tol {
        return Ok(Root { x: b, residual: fb, iterations: 0, sign_changes: 1 });
    }
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for it in 1..=opts.max_iter {
        let width = b - a;
        let secant = b - fb * (b - a) / (fb - fa);
        // fall back to bisection when the secant point leaves the middle of the bracket
        let x = if secant.is_finite() && secant > a + 0.05 * width && secant < b - 0.05 * width {
            secant
        } else {
            0.5 * (a + b)
        };
        let fx = f(x)?;
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx.abs() < opts.residual_tol {
            return Ok(Root { x, residual: fx, iterations: it, sign_changes: 1 });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if b - a <= f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
    }
    Err(Error::NoConvergence { residual: best.1.abs(), iterations: opts.max_iter })
}
