//! Truncated matrix realizations of the Heisenberg, su(1,1) and su(2) ladder
//! algebras, Pauli matrices, Kronecker products and matrix exponentials.
//!
//! Every ladder algebra is realized on the basis `||n>>`, `n = 0..dim`, with
//!
//! | kind | `L+ ||n>>`                   | `L3 ||n>>`  |
//! |------|------------------------------|-------------|
//! | N    | `sqrt(n+1) ||n+1>>`          | `n`         |
//! | K    | `sqrt((n+1)(2K+n)) ||n+1>>`  | `K + n`     |
//! | J    | `sqrt((n+1)(2J-n)) ||n+1>>`  | `-J + n`    |
//!
//! and `L- = L+^dagger`. The N and K realizations are truncations of
//! infinite-dimensional representations, so their commutation relations only
//! hold on the interior block (the last row/column is cut off).

use std::{fmt, str::FromStr};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
/// Dense complex operator.
pub type CMat = DMatrix<C64>;
/// Dense complex state vector.
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Fraction of the top of a truncated basis used for the tail-leakage metric.
pub const TAIL_FRACTION: f64 = 0.1;
/// Results built on truncated exponentials are trusted below this leakage.
pub const LEAKAGE_TOL: f64 = 1e-8;

/// Which representation realizes `{L+, L-, L3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AlgebraKind {
    /// Harmonic oscillator `{a^dagger, a, N}`.
    Oscillator,
    /// su(1,1) positive discrete series with Bargmann index `k > 0`.
    Su11 { k: f64 },
    /// su(2) spin `J = two_j / 2`.
    Su2 { two_j: u32 },
}

impl AlgebraKind {
    pub fn su11(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter {
                name: "bargmann",
                reason: format!("Bargmann index must be > 0, got {k}"),
            });
        }
        Ok(Self::Su11 { k })
    }

    /// Spin `j`; `2j` must be a non-negative integer.
    pub fn su2(j: f64) -> Result<Self> {
        let two_j = 2.0 * j;
        if !(two_j.is_finite() && two_j >= 0.0 && (two_j - two_j.round()).abs() < 1e-12) {
            return Err(Error::InvalidParameter {
                name: "spin",
                reason: format!("2J must be a non-negative integer, got J = {j}"),
            });
        }
        Ok(Self::Su2 { two_j: two_j.round() as u32 })
    }

    /// Natural dimension of the representation, if finite.
    pub fn natural_dim(&self) -> Option<usize> {
        match self {
            Self::Su2 { two_j } => Some(*two_j as usize + 1),
            _ => None,
        }
    }

    /// Eigenvalue of `L3` on `||n>>`.
    pub fn weight(&self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Self::Oscillator => n,
            Self::Su11 { k } => k + n,
            Self::Su2 { two_j } => n - *two_j as f64 / 2.0,
        }
    }

    /// `<<n+1| L+ ||n>>`.
    pub fn raising_element(&self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Self::Oscillator => (n + 1.0).sqrt(),
            Self::Su11 { k } => ((n + 1.0) * (2.0 * k + n)).sqrt(),
            Self::Su2 { two_j } => ((n + 1.0) * (*two_j as f64 - n)).max(0.0).sqrt(),
        }
    }

    pub fn is_truncated(&self) -> bool {
        !matches!(self, Self::Su2 { .. })
    }

    pub fn label(&self) -> char {
        match self {
            Self::Oscillator => 'N',
            Self::Su11 { .. } => 'K',
            Self::Su2 { .. } => 'J',
        }
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Oscillator => write!(f, "N"),
            Self::Su11 { k } => write!(f, "K(k={k})"),
            Self::Su2 { two_j } => write!(f, "J(j={})", *two_j as f64 / 2.0),
        }
    }
}

/// Selector for [`pauli`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
    Plus,
    Minus,
    Identity,
    /// Walsh-Hadamard matrix `W = (sigma_1 + sigma_3) / sqrt(2)`.
    Walsh,
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "1" | "x" | "X" => Self::X,
            "2" | "y" | "Y" => Self::Y,
            "3" | "z" | "Z" => Self::Z,
            "plus" | "+" => Self::Plus,
            "minus" | "-" => Self::Minus,
            "identity" | "id" | "0" => Self::Identity,
            "walsh" | "hadamard" | "W" => Self::Walsh,
            other => return Err(Error::UnknownSelector(other.to_owned())),
        })
    }
}

/// 2x2 Pauli-type matrix. `sigma_+- = (sigma_1 +- i sigma_2) / 2`.
pub fn pauli(which: Pauli) -> CMat {
    let r = |a: f64, b: f64, c: f64, d: f64| {
        CMat::from_row_slice(2, 2, &[C64::from(a), C64::from(b), C64::from(c), C64::from(d)])
    };
    match which {
        Pauli::X => r(0.0, 1.0, 1.0, 0.0),
        Pauli::Y => CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        Pauli::Z => r(1.0, 0.0, 0.0, -1.0),
        Pauli::Plus => r(0.0, 1.0, 0.0, 0.0),
        Pauli::Minus => r(0.0, 0.0, 1.0, 0.0),
        Pauli::Identity => r(1.0, 0.0, 0.0, 1.0),
        Pauli::Walsh => r(1.0, 1.0, 1.0, -1.0) * C64::from(std::f64::consts::FRAC_1_SQRT_2),
    }
}

/// Eigenvector `|lambda> = (1, lambda)/sqrt(2)` of `sigma_1`, `lambda = +-1`.
pub fn sigma1_eigenvector(lambda: i8) -> [f64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [s, lambda.signum() as f64 * s]
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

/// Kronecker product `a (x) b`; the index of `b` runs fastest.
pub fn tensor(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn dagger(a: &CMat) -> CMat {
    a.adjoint()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Frobenius norm of the leading `size x size` block of `a`.
pub fn block_norm(a: &CMat, size: usize) -> f64 {
    a.view((0, 0), (size, size)).norm()
}

/// `||U^dagger U - 1||_F`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    (u.adjoint() * u - identity(u.nrows())).norm()
}

pub fn hermiticity_defect(h: &CMat) -> f64 {
    (h - h.adjoint()).norm()
}

/// Index where the top [`TAIL_FRACTION`] of a `dim`-state basis starts.
pub fn tail_start(dim: usize) -> usize {
    let width = ((dim as f64 * TAIL_FRACTION).round() as usize).max(1);
    dim.saturating_sub(width)
}

/// Norm of the amplitude of `v` in the top of the mode basis. `v` may be a
/// product-space vector (`atom (x) mode`, mode index fastest) whose length is
/// a multiple of `mode_dim`.
pub fn tail_leakage(v: &CVec, mode_dim: usize) -> f64 {
    let start = tail_start(mode_dim);
    v.iter()
        .enumerate()
        .filter(|(i, _)| i % mode_dim >= start)
        .map(|(_, z)| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Truncated matrix realization of a ladder algebra.
#[derive(Debug, Clone)]
pub struct LadderAlgebra {
    pub kind: AlgebraKind,
    pub dim: usize,
    pub raising: CMat,
    pub lowering: CMat,
    pub l3: CMat,
}

/// Build `{L+, L-, L3}` for `kind` truncated to `dim` states.
pub fn build_ladder(kind: AlgebraKind, dim: usize) -> Result<LadderAlgebra> {
    if let AlgebraKind::Su11 { k } = kind {
        AlgebraKind::su11(k)?;
    }
    if let Some(natural) = kind.natural_dim() {
        if natural != dim {
            return Err(Error::DimensionMismatch { expected: natural, got: dim });
        }
    } else if dim < 2 {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: format!("truncation dimension must be >= 2, got {dim}"),
        });
    }
    let mut raising = CMat::zeros(dim, dim);
    let mut l3 = CMat::zeros(dim, dim);
    for n in 0..dim {
        l3[(n, n)] = C64::from(kind.weight(n));
        if n + 1 < dim {
            raising[(n + 1, n)] = C64::from(kind.raising_element(n));
        }
    }
    let lowering = raising.adjoint();
    Ok(LadderAlgebra { kind, dim, raising, lowering, l3 })
}

impl LadderAlgebra {
    /// The anti-Hermitian generator `L+ - L-` (real antisymmetric).
    pub fn antihermitian_generator(&self) -> CMat {
        &self.raising - &self.lowering
    }

    /// `L+ + L-`.
    pub fn quadrature(&self) -> CMat {
        &self.raising + &self.lowering
    }

    pub fn identity(&self) -> CMat {
        identity(self.dim)
    }

    /// Size of the block on which the truncated commutators are exact.
    pub fn interior(&self) -> usize {
        if self.kind.is_truncated() {
            self.dim - 1
        } else {
            self.dim
        }
    }

    /// Residuals of `[L3, L+] = L+`, `[L3, L-] = -L-` and the kind-specific
    /// `[L+, L-]` relation on the interior block.
    pub fn commutator_residuals(&self) -> [f64; 3] {
        let size = self.interior();
        let r1 = commutator(&self.l3, &self.raising) - &self.raising;
        let r2 = commutator(&self.l3, &self.lowering) + &self.lowering;
        let pm = commutator(&self.raising, &self.lowering);
        let expected = match self.kind {
            AlgebraKind::Oscillator => -self.identity(),
            AlgebraKind::Su11 { .. } => &self.l3 * C64::from(-2.0),
            AlgebraKind::Su2 { .. } => &self.l3 * C64::from(2.0),
        };
        [block_norm(&r1, size), block_norm(&r2, size), block_norm(&(pm - expected), size)]
    }
}

/// Eigendecomposition `H = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMat,
}

impl HermitianEigen {
    pub fn new(h: &CMat) -> Result<Self> {
        if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        // symmetrize against round-off before handing to the solver
        let sym = (h + h.adjoint()) * C64::from(0.5);
        let eig = SymmetricEigen::new(sym);
        Ok(Self { values: eig.eigenvalues, vectors: eig.eigenvectors })
    }

    /// `V diag(f(values)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> CMat {
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let fj = f(v);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `exp(z H)`.
    pub fn exp_scaled(&self, z: C64) -> CMat {
        self.map(|v| (z * v).exp())
    }

    /// `exp(-i t H)` applied to `psi` without forming the propagator.
    pub fn evolve(&self, t: f64, psi: &CVec) -> CVec {
        let mut coeffs = self.vectors.ad_mul(psi);
        for (c, &v) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= C64::new(0.0, -t * v).exp();
        }
        &self.vectors * coeffs
    }
}

fn defect_scale(a: &CMat) -> f64 {
    1e-13 * a.norm().max(1.0)
}

/// Matrix exponential. Hermitian and anti-Hermitian inputs go through an
/// eigendecomposition; everything else through scaling and squaring with a
/// diagonal Pade approximant.
pub fn expm(a: &CMat) -> Result<CMat> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let scale = defect_scale(a);
    if hermiticity_defect(a) <= scale {
        return Ok(HermitianEigen::new(a)?.map(|v| C64::from(v.exp())));
    }
    if (a + a.adjoint()).norm() <= scale {
        // a = i h with h Hermitian
        let h = a * (-I);
        return Ok(HermitianEigen::new(&h)?.map(|v| (I * v).exp()));
    }
    expm_pade(a)
}

/// Scaling and squaring with the [6/6] Pade approximant.
pub fn expm_pade(a: &CMat) -> Result<CMat> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    const Q: usize = 6;
    let n = a.nrows();
    let norm = a.norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a * C64::from(0.5f64.powi(squarings as i32));

    // c_j = (2q - j)! q! / ((2q)! j! (q - j)!)
    let mut c = 1.0;
    let mut num = identity(n);
    let mut den = identity(n);
    let mut power = identity(n);
    for j in 1..=Q {
        c *= (Q + 1 - j) as f64 / (j * (2 * Q + 1 - j)) as f64;
        power = &power * &scaled;
        num += &power * C64::from(c);
        den += &power * C64::from(if j % 2 == 0 { c } else { -c });
    }
    let mut result = den
        .lu()
        .solve(&num)
        .ok_or(Error::NonFinite)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

/// `exp(x (L+ - L-))` on the truncated space. The truncated generator is
/// exactly antisymmetric, so the result is exactly orthogonal.
pub fn exp_antihermitian(x: f64, alg: &LadderAlgebra) -> Result<CMat> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    if x == 0.0 {
        return Ok(alg.identity());
    }
    expm(&(alg.antihermitian_generator() * C64::from(x)))
}

/// Real-valued view of a matrix that is known to be real up to round-off.
pub fn real_part(a: &CMat) -> DMatrix<f64> {
    a.map(|z| z.re)
}
