//! Analytic dynamics on top of the dressed frame: the exact propagator `U0`
//! of the atom-mode part, the two-level block solver, resonance conditions
//! and the rotating-wave block propagators built from them.

pub mod resonance;
pub mod roots;
pub mod twolevel;

use serde::Serialize;

use crate::algebra::{CMat, CVec, C64, I, ZERO};
use crate::dressing::DressedFrame;
use crate::error::{Error, Result};
use crate::hamiltonians::Hamiltonian;

pub use resonance::{
    find_resonance, gamma_coupling, resonance_residual, rwa_validity, FreeParam, ResonanceCase,
    ResonanceSolution, TwoLevelBlock, RESONANCE_TOL, RWA_THRESHOLD,
};
pub use roots::{find_root, Root, RootOptions};
pub use twolevel::{two_level_generator, appendix_u, gamma_matrix, lambda_pm, projector_formula_check};

/// Integrated field envelope `Theta(t) = int_0^t g2 cos(omega_E s) ds`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaDrive {
    pub g2: f64,
    pub omega_e: f64,
}

impl ThetaDrive {
    pub fn new(g2: f64, omega_e: f64) -> Self {
        Self { g2, omega_e }
    }

    pub fn value(&self, t: f64) -> f64 {
        if self.omega_e > 0.0 {
            self.g2 * (self.omega_e * t).sin() / self.omega_e
        } else {
            self.g2 * t
        }
    }
}

impl From<&DressedFrame> for ThetaDrive {
    fn from(frame: &DressedFrame) -> Self {
        Self::new(frame.params.g2, frame.params.omega_e)
    }
}

/// Dressed-basis phases `e^{-i (t E_n + lambda Theta(t))}` in the column
/// order of [`DressedFrame::basis_matrix`].
fn u0_phases(t: f64, frame: &DressedFrame, drive: ThetaDrive) -> Vec<C64> {
    let theta = drive.value(t);
    [1.0, -1.0]
        .into_iter()
        .flat_map(|lambda| frame.energies.iter().map(move |e| (-I * (t * e + lambda * theta)).exp()))
        .collect()
}

/// `U0(t) = sum e^{-i (t E_n + lambda Theta(t))} |{lambda,n}><{lambda,n}|`.
pub fn u0(t: f64, frame: &DressedFrame, drive: ThetaDrive) -> CMat {
    let basis = frame.basis_matrix();
    let phases = u0_phases(t, frame, drive);
    let mut scaled = basis.clone();
    for (j, p) in phases.iter().enumerate() {
        for z in scaled.column_mut(j).iter_mut() {
            *z *= p;
        }
    }
    scaled * basis.adjoint()
}

/// `U0(t) psi` without forming the full matrix.
pub fn u0_apply(t: f64, frame: &DressedFrame, drive: ThetaDrive, psi: &CVec) -> CVec {
    let basis = frame.basis_matrix();
    let mut coeffs = basis.adjoint() * psi;
    for (c, p) in coeffs.iter_mut().zip(u0_phases(t, frame, drive)) {
        *c *= p;
    }
    basis * coeffs
}

/// Index pair coupled by each case within `(a_{m,+}, a_{m,-}, a_{n,+}, a_{n,-})`
/// after rotating each level into its `Gamma` basis.
pub fn coupled_components(case: ResonanceCase) -> (usize, usize) {
    match case {
        ResonanceCase::I => (0, 2),
        ResonanceCase::II => (1, 3),
        ResonanceCase::III => (0, 3),
        ResonanceCase::IV => (1, 2),
    }
}

/// `diag(Gamma_m, Gamma_n)` as a complex 4x4 matrix.
fn block_rotation(sol: &ResonanceSolution) -> CMat {
    let mut g = CMat::zeros(4, 4);
    for (b, block) in sol.blocks.iter().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                g[(2 * b + i, 2 * b + j)] = C64::from(block.gamma[(i, j)]);
            }
        }
    }
    g
}

/// Rotating-wave propagator for the slow amplitudes of levels `m` and `n`,
/// `diag(Gamma_m, Gamma_n) exp(-i t (Delta gamma / 2) P) diag(Gamma_m, Gamma_n)^T`
/// where `P` swaps the two components coupled by the case.
pub fn analytic_block_propagator(case: ResonanceCase, sol: &ResonanceSolution, t: f64) -> CMat {
    let (i, j) = coupled_components(case);
    let phi = sol.rabi_frequency * t / 2.0;
    let mut inner = CMat::identity(4, 4);
    inner[(i, i)] = C64::from(phi.cos());
    inner[(j, j)] = C64::from(phi.cos());
    inner[(i, j)] = -I * phi.sin();
    inner[(j, i)] = -I * phi.sin();
    let g = block_rotation(sol);
    &g * inner * g.transpose()
}

/// Slow amplitudes that put all weight in the `Gamma`-rotated component of
/// level `m` coupled by the case.
pub fn resonant_initial_amplitudes(sol: &ResonanceSolution) -> [C64; 4] {
    let (i, _) = coupled_components(sol.case);
    let col = sol.blocks[0].gamma.column(i);
    [C64::from(col[0]), C64::from(col[1]), ZERO, ZERO]
}

/// Population moved to level `n` under the rotating-wave propagator when
/// starting from [`resonant_initial_amplitudes`].
pub fn transfer_probability(sol: &ResonanceSolution, t: f64) -> f64 {
    (sol.rabi_frequency * t / 2.0).sin().powi(2)
}

/// Full state `U0(t) sum_k U_k(t) b_k(t)` for the two-level ansatz, where
/// `b(t)` is the rotating-wave evolution of `initial` and `U_k` the exact
/// diagonal-block solution of level `k`.
pub fn assemble_full_state(t: f64, frame: &DressedFrame, sol: &ResonanceSolution, initial: &[C64; 4]) -> Result<CVec> {
    let norm: f64 = initial.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    frame.check_level(sol.n)?;
    if frame.params.g2 != sol.params.g2 || frame.params.delta != sol.params.delta {
        return Err(Error::InvalidParameter {
            name: "frame",
            reason: "frame and resonance solution were built for different parameters".into(),
        });
    }
    let b = analytic_block_propagator(sol.case, sol, t) * CVec::from_column_slice(initial);
    let g2 = sol.params.g2;
    let drive = ThetaDrive::from(frame);
    let mut psi = CVec::zeros(2 * frame.dim());
    for (slot, block) in sol.blocks.iter().enumerate() {
        let u = appendix_u(t, block.e_delta, g2);
        let a = u * nalgebra::Vector2::new(b[2 * slot], b[2 * slot + 1]);
        for (idx, lambda) in [1i8, -1].into_iter().enumerate() {
            let phase = (-I * (t * frame.energies[block.k] + lambda as f64 * drive.value(t))).exp();
            psi += frame.state_unchecked(lambda, block.k) * (a[idx] * phase);
        }
    }
    Ok(psi)
}

/// Interaction-picture coupling between levels `m` and `n` with every fast
/// term kept:
///
/// ```text
/// i d/dt (b_m, b_n) = (Delta/2) [[0, C(t)], [C(t)^dagger, 0]] (b_m, b_n)
/// C(t) = e^{i t Omega (m-n)} e^{i t A_m} [[0, T_mn], [T_nm, 0]] e^{-i t A_n}
/// ```
///
/// with `A_k = [[0, E_{k,Delta}], [E_{k,Delta}, -2 g2]]`. Integrating this
/// measures the rotating-wave error directly.
#[derive(Debug, Clone)]
pub struct ReducedHamiltonian {
    delta: f64,
    detuning: f64,
    coupling: CMat,
    levels: [(nalgebra::Matrix2<f64>, f64, f64); 2],
}

impl ReducedHamiltonian {
    pub fn new(sol: &ResonanceSolution) -> Self {
        let coupling = CMat::from_row_slice(2, 2, &[ZERO, C64::from(sol.t_mn), C64::from(sol.t_nm), ZERO]);
        let levels = [0, 1].map(|b| {
            let blk = &sol.blocks[b];
            (blk.gamma, blk.lambda_plus, blk.lambda_minus)
        });
        Self {
            delta: sol.params.delta,
            detuning: sol.big_omega * (sol.m as f64 - sol.n as f64),
            coupling,
            levels,
        }
    }

    /// `e^{i t A_k}` through the level's eigendecomposition.
    fn rotate(&self, slot: usize, t: f64) -> CMat {
        let (g, lp, lm) = self.levels[slot];
        let gc = CMat::from_fn(2, 2, |i, j| C64::from(g[(i, j)]));
        let d = CMat::from_diagonal(&CVec::from_vec(vec![(I * t * lp).exp(), (I * t * lm).exp()]));
        &gc * d * gc.transpose()
    }
}

impl Hamiltonian for ReducedHamiltonian {
    fn dim(&self) -> usize {
        4
    }

    fn at(&self, t: f64) -> CMat {
        let scale = (I * t * self.detuning).exp() * (self.delta / 2.0);
        let c = self.rotate(0, t) * &self.coupling * self.rotate(1, t).adjoint() * scale;
        let mut h = CMat::zeros(4, 4);
        h.view_mut((0, 2), (2, 2)).copy_from(&c);
        h.view_mut((2, 0), (2, 2)).copy_from(&c.adjoint());
        h
    }
}

#[cfg(test)]
mod tests;
