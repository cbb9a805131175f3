//! Exact solution of the constant-field two-level block
//!
//! ```text
//! i d/dt (a, b) = alpha [[0, e^{2i theta t}], [e^{-2i theta t}, 0]] (a, b)
//! ```
//!
//! and the orthogonal matrix `Gamma` diagonalizing
//! `A = [[0, alpha], [alpha, -2 theta]]`.

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use crate::algebra::{C64, I};
use crate::error::{Error, Result};

pub type Mat2 = Matrix2<f64>;
pub type CMat2 = Matrix2<C64>;

/// Eigenvalues `lambda_+- = -theta +- sqrt(theta^2 + alpha^2)` of
/// `[[0, alpha], [alpha, -2 theta]]`.
///
/// `lambda_+` is evaluated in the cancellation-free form
/// `alpha^2 / (theta + sqrt(theta^2 + alpha^2))` when `theta > 0`.
pub fn lambda_pm(alpha: f64, theta: f64) -> (f64, f64) {
    let root = alpha.hypot(theta);
    let plus = if theta > 0.0 { alpha * alpha / (theta + root) } else { root - theta };
    let minus = if theta < 0.0 { -alpha * alpha / (root - theta) } else { -theta - root };
    (plus, minus)
}

/// `Gamma` with columns `(alpha, lambda_+)/norm` and `(alpha, lambda_-)/norm`.
///
/// At `alpha = 0` the printed columns are `0/0`; the limit `alpha -> 0+` is
/// used instead: `diag(1, -1)` for `theta > 0`, `sigma_1` for `theta < 0`,
/// and the Walsh-Hadamard matrix for `theta = 0`.
pub fn gamma_matrix(alpha: f64, theta: f64) -> Mat2 {
    let (lp, lm) = lambda_pm(alpha, theta);
    if alpha == 0.0 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        return match theta.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => Mat2::new(1.0, 0.0, 0.0, -1.0),
            Some(std::cmp::Ordering::Less) => Mat2::new(0.0, 1.0, 1.0, 0.0),
            _ => Mat2::new(s, s, s, -s),
        };
    }
    let col = |l: f64| Vector2::new(alpha, l).normalize();
    Mat2::from_columns(&[col(lp), col(lm)])
}

/// `Gamma diag(lambda_+, lambda_-) Gamma^{-1}`, which must reproduce `A`.
pub fn reconstruct(alpha: f64, theta: f64) -> Mat2 {
    let g = gamma_matrix(alpha, theta);
    let (lp, lm) = lambda_pm(alpha, theta);
    g * Mat2::new(lp, 0.0, 0.0, lm) * g.transpose()
}

/// `exp(-i t A)` through the eigendecomposition.
pub fn exp_block(t: f64, alpha: f64, theta: f64) -> CMat2 {
    let g = gamma_matrix(alpha, theta).map(C64::from);
    let (lp, lm) = lambda_pm(alpha, theta);
    let d = CMat2::new((-I * t * lp).exp(), C64::from(0.0), C64::from(0.0), (-I * t * lm).exp());
    g * d * g.transpose()
}

/// `U(t) = diag(1, e^{-2i theta t}) exp(-i t [[0, alpha], [alpha, -2 theta]])`.
pub fn appendix_u(t: f64, alpha: f64, theta: f64) -> CMat2 {
    let phase = CMat2::new(C64::from(1.0), C64::from(0.0), C64::from(0.0), (-I * 2.0 * theta * t).exp());
    phase * exp_block(t, alpha, theta)
}

/// The generator `alpha [[0, e^{2i theta t}], [e^{-2i theta t}, 0]]` solved by
/// [`appendix_u`].
pub fn two_level_generator(t: f64, alpha: f64, theta: f64) -> CMat2 {
    let e = (I * 2.0 * theta * t).exp();
    CMat2::new(C64::from(0.0), e * alpha, e.conj() * alpha, C64::from(0.0))
}

/// Both sides of `Gamma diag(1, 0) Gamma^{-1} = [[lambda_-, -alpha], [-alpha, -lambda_+]] / (lambda_- - lambda_+)`.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectorCheck {
    pub lhs: [[f64; 2]; 2],
    pub rhs: [[f64; 2]; 2],
    pub residual: f64,
}

pub fn projector_formula_check(alpha: f64, theta: f64) -> Result<ProjectorCheck> {
    let (lp, lm) = lambda_pm(alpha, theta);
    if lp == lm {
        return Err(Error::Degenerate);
    }
    let g = gamma_matrix(alpha, theta);
    let lhs = g * Mat2::new(1.0, 0.0, 0.0, 0.0) * g.transpose();
    let rhs = Mat2::new(lm, -alpha, -alpha, -lp) / (lm - lp);
    let to_array = |m: &Mat2| [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]];
    Ok(ProjectorCheck { lhs: to_array(&lhs), rhs: to_array(&rhs), residual: (lhs - rhs).norm() })
}
