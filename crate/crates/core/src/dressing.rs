//! Exact diagonalization of the atom-mode part of the Hamiltonian,
//!
//! ```text
//! H0(t) = omega 1 (x) L3 + sigma_1 (x) { g1 (L+ + L-) + g2 cos(omega_E t) 1 },
//! ```
//!
//! by the Walsh-Hadamard rotation plus a mode displacement. Its eigenvectors
//! are `|{lambda, n}> = |lambda> (x) e^{-lambda x/2 (L+ - L-)} ||n>>` with
//! energies `E_n + lambda g2 cos(omega_E t)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::{
    exp_antihermitian, identity, pauli, real_part, sigma1_eigenvector, tail_leakage, tensor,
    AlgebraKind, CMat, CVec, LadderAlgebra, Pauli, C64, LEAKAGE_TOL,
};
use crate::error::{Error, Result};
use crate::hamiltonians::ModelParams;

/// Eigen-relation tolerance for a trusted dressed state.
pub const EIGEN_TOL: f64 = 1e-7;
/// Orthonormality tolerance for a trusted dressed state.
pub const ORTHO_TOL: f64 = 1e-8;

/// Dressed frequency `Omega` and dressing parameter `x`:
///
/// * N: `Omega = omega`, `x = 2 g1 / omega`
/// * K: `Omega = omega sqrt(1 - (2 g1/omega)^2)`, `x = atanh(2 g1 / omega)`
/// * J: `Omega = omega sqrt(1 + (2 g1/omega)^2)`, `x = atan(2 g1 / omega)`
pub fn omega_x(kind: AlgebraKind, omega: f64, g1: f64) -> Result<(f64, f64)> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter { name: "omega", reason: format!("must be > 0, got {omega}") });
    }
    if !(g1.is_finite() && g1 >= 0.0) {
        return Err(Error::InvalidParameter { name: "g1", reason: format!("must be >= 0, got {g1}") });
    }
    let s = 2.0 * g1 / omega;
    Ok(match kind {
        AlgebraKind::Oscillator => (omega, s),
        AlgebraKind::Su11 { .. } => {
            if s >= 1.0 {
                return Err(Error::CouplingDomain { ratio: s });
            }
            (omega * (1.0 - s * s).sqrt(), s.atanh())
        }
        AlgebraKind::Su2 { .. } => (omega * (1.0 + s * s).sqrt(), s.atan()),
    })
}

/// Time-independent part of the dressed energy of level `n`.
pub fn energy_formula(kind: AlgebraKind, n: usize, big_omega: f64, omega: f64, g1: f64) -> f64 {
    let offset = match kind {
        AlgebraKind::Oscillator => -(g1 * g1) / (omega * omega),
        _ => kind.weight(0),
    };
    big_omega * (offset + n as f64)
}

/// Laguerre polynomial `L_n(y)` by upward three-term recurrence.
pub fn laguerre(n: usize, y: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 - y);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - y) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Tail weight of a mode or product vector; an untruncated su(2) mode has none.
fn mode_leakage(alg: &LadderAlgebra, v: &CVec) -> f64 {
    if alg.kind.is_truncated() {
        tail_leakage(v, alg.dim)
    } else {
        0.0
    }
}

/// Per-level diagnostics gathered while building a frame.
#[derive(Debug, Clone, Serialize)]
pub struct LevelCheck {
    pub n: usize,
    pub eigen_residual: f64,
    pub leakage: f64,
}

/// The dressed basis of `H0` for one set of model parameters.
#[derive(Debug, Clone)]
pub struct DressedFrame {
    pub params: ModelParams,
    /// Dressed frequency `Omega`.
    pub big_omega: f64,
    pub x: f64,
    pub alg: LadderAlgebra,
    /// `e^{-x/2 (L+ - L-)}`; the `lambda = -1` displacement is its transpose.
    displacement: DMatrix<f64>,
    /// Time-independent energies `E_n`, for every `n < dim`.
    pub energies: Vec<f64>,
    /// Highest quantum number whose dressed states pass every check.
    pub n_max: usize,
    pub checks: Vec<LevelCheck>,
    pub orthonormality_defect: f64,
}

/// Diagonalize `H0` for `p` and determine the trusted range `n <= n_max`.
pub fn build_frame(p: &ModelParams) -> Result<DressedFrame> {
    p.validate()?;
    let (big_omega, x) = omega_x(p.kind, p.omega, p.g1)?;
    let alg = p.ladder()?;
    let displacement = real_part(&exp_antihermitian(-x / 2.0, &alg)?);
    let energies = (0..p.dim)
        .map(|n| energy_formula(p.kind, n, big_omega, p.omega, p.g1))
        .collect();
    let mut frame = DressedFrame {
        params: *p,
        big_omega,
        x,
        alg,
        displacement,
        energies,
        n_max: 0,
        checks: Vec::new(),
        orthonormality_defect: 0.0,
    };
    frame.assess()?;
    Ok(frame)
}

impl DressedFrame {
    pub fn dim(&self) -> usize {
        self.params.dim
    }

    /// Mode part `e^{-lambda x/2 (L+ - L-)} ||n>>` of a dressed state.
    pub fn mode_vector(&self, lambda: i8, n: usize) -> Vec<f64> {
        if lambda > 0 {
            self.displacement.column(n).iter().copied().collect()
        } else {
            self.displacement.row(n).iter().copied().collect()
        }
    }

    /// `|{lambda, n}>` in the product basis, for any `n < dim`.
    pub fn state_unchecked(&self, lambda: i8, n: usize) -> CVec {
        let dim = self.dim();
        let atom = sigma1_eigenvector(lambda);
        let mode = self.mode_vector(lambda, n);
        CVec::from_iterator(
            2 * dim,
            atom.iter().flat_map(|a| mode.iter().map(move |m| C64::from(a * m))),
        )
    }

    /// `|{lambda, n}>`, restricted to the trusted range.
    pub fn state(&self, lambda: i8, n: usize) -> Result<CVec> {
        self.check_level(n)?;
        Ok(self.state_unchecked(lambda, n))
    }

    pub fn check_level(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::QuantumNumberOutOfRange { n, n_max: self.n_max });
        }
        Ok(())
    }

    /// Time-independent dressed energy `E_n`.
    pub fn energy(&self, n: usize) -> Result<f64> {
        self.check_level(n)?;
        Ok(self.energies[n])
    }

    /// Full eigenvalue `E_n + lambda g2 cos(omega_E t)`.
    pub fn energy_at(&self, lambda: i8, n: usize, t: f64) -> f64 {
        self.energies[n] + lambda as f64 * self.params.drive().at(t)
    }

    /// Matrix whose columns are every dressed state, ordered
    /// `(+1, 0), (+1, 1), ..., (-1, 0), (-1, 1), ...`.
    pub fn basis_matrix(&self) -> CMat {
        let dim = self.dim();
        let mut m = CMat::zeros(2 * dim, 2 * dim);
        for (block, lambda) in [1i8, -1].into_iter().enumerate() {
            for n in 0..dim {
                m.set_column(block * dim + n, &self.state_unchecked(lambda, n));
            }
        }
        m
    }

    /// The atom-mode Hamiltonian `H0(t)` (no `Delta` term).
    pub fn h0(&self, t: f64) -> CMat {
        let p = &self.params;
        let one = self.alg.identity();
        tensor(&identity(2), &self.alg.l3) * C64::from(p.omega)
            + tensor(&pauli(Pauli::X), &self.alg.quadrature()) * C64::from(p.g1)
            + tensor(&pauli(Pauli::X), &one) * C64::from(p.drive().at(t))
    }

    fn assess(&mut self) -> Result<()> {
        let dim = self.dim();
        let basis = self.basis_matrix();
        let gram = basis.adjoint() * &basis - identity(2 * dim);

        // two sample times so a periodic drive is seen at different strengths
        let times = [0.0, 0.37];
        let applied: Vec<CMat> = times.iter().map(|&t| self.h0(t) * &basis).collect();

        let mut checks = Vec::with_capacity(dim);
        for n in 0..dim {
            let mut residual: f64 = 0.0;
            let mut leakage: f64 = 0.0;
            for (block, lambda) in [1i8, -1].into_iter().enumerate() {
                let col = block * dim + n;
                let v = basis.column(col);
                for (&t, hv) in times.iter().zip(&applied) {
                    let e = self.energy_at(lambda, n, t);
                    residual = residual.max((hv.column(col) - v * C64::from(e)).norm());
                }
                leakage = leakage.max(mode_leakage(&self.alg, &v.into_owned()));
            }
            checks.push(LevelCheck { n, eigen_residual: residual, leakage });
        }

        let mut n_max = None;
        let mut ortho = 0.0;
        for n in 0..dim {
            let c = &checks[n];
            // Gram entries among levels <= n, both branches
            let mut worst: f64 = 0.0;
            for (bi, bj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                for k in 0..=n {
                    worst = worst
                        .max(gram[(bi * dim + n, bj * dim + k)].norm())
                        .max(gram[(bi * dim + k, bj * dim + n)].norm());
                }
            }
            if c.eigen_residual < EIGEN_TOL && c.leakage < LEAKAGE_TOL && worst < ORTHO_TOL {
                n_max = Some(n);
                ortho = f64::max(ortho, worst);
            } else {
                break;
            }
        }
        self.checks = checks;
        match n_max {
            Some(n) => {
                self.n_max = n;
                self.orthonormality_defect = ortho;
                Ok(())
            }
            None => Err(Error::TruncationLeakage { leakage: self.checks[0].leakage, tol: LEAKAGE_TOL }),
        }
    }
}

/// Transition matrix elements `T_mn = <<m| e^{x (L+ - L-)} ||n>>` and
/// `E_{n,Delta} = (Delta/2) T_nn`.
#[derive(Debug, Clone)]
pub struct TransitionTable {
    /// The full truncated matrix; trusted for indices `<= n_max`.
    pub t: DMatrix<f64>,
    pub e_delta: Vec<f64>,
    pub n_max: usize,
    /// Largest imaginary part discarded when taking the real matrix.
    pub imag_defect: f64,
    pub leakage: Vec<f64>,
}

impl TransitionTable {
    /// `T_mn`.
    pub fn t(&self, m: usize, n: usize) -> f64 {
        self.t[(m, n)]
    }

    /// `T~_mn = <<m| e^{-x (L+ - L-)} ||n>> = T_nm`.
    pub fn t_tilde(&self, m: usize, n: usize) -> f64 {
        self.t[(n, m)]
    }

    pub fn e_delta(&self, n: usize) -> Result<f64> {
        self.e_delta
            .get(n)
            .copied()
            .ok_or(Error::QuantumNumberOutOfRange { n, n_max: self.n_max })
    }
}

/// Evaluate `T_mn` numerically on the frame's truncated space. The trusted
/// range is cut where a column of `e^{x (L+ - L-)}` leaks into the top of
/// the basis, and never exceeds the frame's `n_max`.
pub fn transition_table(frame: &DressedFrame) -> Result<TransitionTable> {
    table_for(&frame.alg, frame.x, frame.params.delta, frame.n_max)
}

pub(crate) fn table_for(alg: &LadderAlgebra, x: f64, delta: f64, limit: usize) -> Result<TransitionTable> {
    let dim = alg.dim;
    let full = exp_antihermitian(x, alg)?;
    let imag_defect = full.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let t = real_part(&full);
    let leakage: Vec<f64> = (0..=limit.min(dim - 1))
        .map(|n| mode_leakage(alg, &full.column(n).into_owned()))
        .collect();
    let trusted = leakage.iter().take_while(|l| **l < LEAKAGE_TOL).count();
    if trusted == 0 {
        return Err(Error::TruncationLeakage { leakage: leakage[0], tol: LEAKAGE_TOL });
    }
    let n_max = trusted - 1;
    let e_delta = (0..=n_max).map(|n| delta / 2.0 * t[(n, n)]).collect();
    Ok(TransitionTable { t, e_delta, n_max, imag_defect, leakage })
}
