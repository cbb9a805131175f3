//! Hamiltonian builders: the driven two-level atom, the full atom-mode-field
//! model for any ladder algebra, and the trapped-ion Hamiltonian together with
//! the unitary `T(eta)` that maps it onto the unified form.
//!
//! Basis ordering is `|atom> (x) ||n>>` with the atom index slow and
//! `sigma_3 e_0 = +e_0`.

use serde::{Deserialize, Serialize};

use crate::algebra::{
    self, build_ladder, expm, identity, pauli, tensor, tail_leakage, AlgebraKind, CMat, CVec,
    LadderAlgebra, Pauli, C64, I, LEAKAGE_TOL,
};
use crate::error::{Error, Result};

/// Physical parameters of the full model, in angular-frequency units with
/// `hbar = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Mode frequency `omega`.
    pub omega: f64,
    /// Level splitting `Delta`.
    pub delta: f64,
    /// Atom-mode coupling.
    pub g1: f64,
    /// Atom-field coupling.
    pub g2: f64,
    /// Drive frequency; zero means a constant field.
    pub omega_e: f64,
    pub kind: AlgebraKind,
    /// Truncation dimension of the mode.
    pub dim: usize,
}

impl ModelParams {
    /// Oscillator-mode parameters with constant field.
    pub fn oscillator(omega: f64, delta: f64, g1: f64, g2: f64, dim: usize) -> Self {
        Self { omega, delta, g1, g2, omega_e: 0.0, kind: AlgebraKind::Oscillator, dim }
    }

    pub fn with_kind(mut self, kind: AlgebraKind) -> Self {
        self.kind = kind;
        if let Some(d) = kind.natural_dim() {
            self.dim = d;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: f64, strict: bool| {
            let ok = v.is_finite() && if strict { v > 0.0 } else { v >= 0.0 };
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be {} 0, got {v}", if strict { ">" } else { ">=" }),
                })
            }
        };
        check("omega", self.omega, true)?;
        check("delta", self.delta, false)?;
        check("g1", self.g1, false)?;
        check("g2", self.g2, false)?;
        check("omega_e", self.omega_e, false)?;
        if let AlgebraKind::Su11 { k } = self.kind {
            AlgebraKind::su11(k)?;
            let ratio = 2.0 * self.g1 / self.omega;
            if ratio >= 1.0 {
                return Err(Error::CouplingDomain { ratio });
            }
        }
        if let Some(d) = self.kind.natural_dim() {
            if d != self.dim {
                return Err(Error::DimensionMismatch { expected: d, got: self.dim });
            }
        }
        Ok(())
    }

    pub fn ladder(&self) -> Result<LadderAlgebra> {
        build_ladder(self.kind, self.dim)
    }

    pub fn drive(&self) -> Drive {
        if self.omega_e == 0.0 {
            Drive::Constant(self.g2)
        } else {
            Drive::Cosine { amplitude: self.g2, frequency: self.omega_e }
        }
    }
}

/// Scalar time envelope multiplying a drive operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    Constant(f64),
    /// `amplitude * cos(frequency * t)`
    Cosine { amplitude: f64, frequency: f64 },
    /// `amplitude * sin(frequency * t)`
    Sine { amplitude: f64, frequency: f64 },
}

impl Drive {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            Self::Constant(a) => a,
            Self::Cosine { amplitude, frequency } => amplitude * (frequency * t).cos(),
            Self::Sine { amplitude, frequency } => amplitude * (frequency * t).sin(),
        }
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            Self::Constant(_) => true,
            Self::Cosine { amplitude, frequency } | Self::Sine { amplitude, frequency } => {
                amplitude == 0.0 || frequency == 0.0
            }
        }
    }
}

/// Anything that yields a Hermitian matrix as a function of time.
pub trait Hamiltonian: Sync {
    fn dim(&self) -> usize;
    fn at(&self, t: f64) -> CMat;
    fn is_time_independent(&self) -> bool {
        false
    }
}

/// `H(t) = static_part + sum_k envelope_k(t) drive_k`.
#[derive(Debug, Clone)]
pub struct TimeDepHamiltonian {
    pub static_part: CMat,
    pub drives: Vec<(Drive, CMat)>,
}

impl TimeDepHamiltonian {
    pub fn constant(static_part: CMat) -> Self {
        Self { static_part, drives: Vec::new() }
    }

    pub fn with_drive(mut self, drive: Drive, op: CMat) -> Self {
        self.drives.push((drive, op));
        self
    }

    /// The drive operator of a single-drive Hamiltonian.
    pub fn drive_part(&self) -> Option<&CMat> {
        self.drives.first().map(|(_, op)| op)
    }
}

impl Hamiltonian for TimeDepHamiltonian {
    fn dim(&self) -> usize {
        self.static_part.nrows()
    }

    fn at(&self, t: f64) -> CMat {
        let mut h = self.static_part.clone();
        for (drive, op) in &self.drives {
            let s = drive.at(t);
            if s != 0.0 {
                h += op * C64::from(s);
            }
        }
        h
    }

    fn is_time_independent(&self) -> bool {
        self.drives.iter().all(|(d, _)| d.is_constant())
    }
}

/// `H = (Delta/2) sigma_3 + g cos(omega_E t) sigma_1`.
pub fn two_level_driven(delta: f64, g: f64, omega_e: f64) -> TimeDepHamiltonian {
    let drive = if omega_e == 0.0 {
        Drive::Constant(g)
    } else {
        Drive::Cosine { amplitude: g, frequency: omega_e }
    };
    TimeDepHamiltonian::constant(pauli(Pauli::Z) * C64::from(delta / 2.0))
        .with_drive(drive, pauli(Pauli::X))
}

/// `omega 1 (x) L3 + g1 sigma_1 (x) (L+ + L-) + (Delta/2) sigma_3 (x) 1
///  + g2 cos(omega_E t) sigma_1 (x) 1`.
pub fn full_hamiltonian(p: &ModelParams) -> Result<TimeDepHamiltonian> {
    p.validate()?;
    let alg = p.ladder()?;
    Ok(full_hamiltonian_from(p, &alg))
}

pub(crate) fn full_hamiltonian_from(p: &ModelParams, alg: &LadderAlgebra) -> TimeDepHamiltonian {
    let one = alg.identity();
    let static_part = tensor(&identity(2), &alg.l3) * C64::from(p.omega)
        + tensor(&pauli(Pauli::X), &alg.quadrature()) * C64::from(p.g1)
        + tensor(&pauli(Pauli::Z), &one) * C64::from(p.delta / 2.0);
    TimeDepHamiltonian::constant(static_part).with_drive(p.drive(), tensor(&pauli(Pauli::X), &one))
}

/// `e^{i eta (a^dagger + a)}` on the truncated oscillator space.
fn lamb_dicke_exp(eta: f64, alg: &LadderAlgebra) -> Result<CMat> {
    expm(&(alg.quadrature() * (I * eta)))
}

/// Trapped-ion Hamiltonian
/// `omega0 1 (x) N + g (sigma_+ (x) e^{i eta (a^dagger+a)} + h.c.) + (Delta/2) sigma_3 (x) 1`.
pub fn nist_hamiltonian(omega0: f64, g: f64, eta: f64, delta: f64, dim: usize) -> Result<CMat> {
    let alg = build_ladder(AlgebraKind::Oscillator, dim)?;
    let e_plus = lamb_dicke_exp(eta, &alg)?;
    let e_minus = e_plus.adjoint();
    Ok(tensor(&identity(2), &alg.l3) * C64::from(omega0)
        + (tensor(&pauli(Pauli::Plus), &e_plus) + tensor(&pauli(Pauli::Minus), &e_minus))
            * C64::from(g)
        + tensor(&pauli(Pauli::Z), &alg.identity()) * C64::from(delta / 2.0))
}

/// `T(eta) = (sigma_+ (x) e^A + sigma_- (x) e^{-A}) (W (x) e^{-i (pi/2) N})`
/// with `2A = i eta (a^dagger + a)`.
pub fn t_eta(eta: f64, dim: usize) -> Result<CMat> {
    let alg = build_ladder(AlgebraKind::Oscillator, dim)?;
    let e_a = lamb_dicke_exp(eta / 2.0, &alg)?;
    let flip = tensor(&pauli(Pauli::Plus), &e_a) + tensor(&pauli(Pauli::Minus), &e_a.adjoint());
    let quarter_turn = CMat::from_diagonal(&CVec::from_iterator(
        dim,
        (0..dim).map(|n| (-I * std::f64::consts::FRAC_PI_2 * n as f64).exp()),
    ));
    Ok(flip * tensor(&pauli(Pauli::Walsh), &quarter_turn))
}

/// Outcome of [`verify_nist_equivalence`].
#[derive(Debug, Clone, Serialize)]
pub struct NistEquivalence {
    /// Frobenius norm of `T^dagger H T - RHS` on the interior block.
    pub residual: f64,
    /// Largest tail leakage of `e^{+-2A} ||n>>` over interior `n`.
    pub leakage: f64,
    /// Number of mode states in the interior block.
    pub interior: usize,
    pub unitarity_defect: f64,
}

impl NistEquivalence {
    pub const TOL: f64 = 1e-6;

    pub fn passes(&self) -> bool {
        self.residual < Self::TOL && self.leakage < LEAKAGE_TOL
    }
}

/// Size of the interior block used by truncation-sensitive identities.
pub fn interior_size(dim: usize) -> usize {
    ((dim as f64 * 0.6).floor() as usize).max(1)
}

/// Check
///
/// ```text
/// T^dagger H T = (omega0 eta^2/4) 1 + omega0 1 (x) N
///     + (omega0 eta/2) sigma_1 (x) (a^dagger + a) + g sigma_3 (x) 1 - (Delta/2) sigma_1 (x) 1
/// ```
///
/// on the lowest 60% of Fock states (for both atom blocks).
///
/// Returns [`Error::TruncationLeakage`] when the truncation is too small for
/// the residual to mean anything.
pub fn verify_nist_equivalence(
    omega0: f64,
    g: f64,
    eta: f64,
    delta: f64,
    dim: usize,
) -> Result<NistEquivalence> {
    let alg = build_ladder(AlgebraKind::Oscillator, dim)?;
    let interior = interior_size(dim);

    let e2a = lamb_dicke_exp(eta, &alg)?;
    let leakage = (0..interior)
        .flat_map(|n| {
            let col = e2a.column(n).into_owned();
            let conj = e2a.adjoint().column(n).into_owned();
            [tail_leakage(&col, dim), tail_leakage(&conj, dim)]
        })
        .fold(0.0, f64::max);
    if leakage >= LEAKAGE_TOL {
        return Err(Error::TruncationLeakage { leakage, tol: LEAKAGE_TOL });
    }

    let h = nist_hamiltonian(omega0, g, eta, delta, dim)?;
    let t = t_eta(eta, dim)?;
    let lhs = t.adjoint() * h * &t;
    let one = alg.identity();
    let rhs = identity(2 * dim) * C64::from(omega0 * eta * eta / 4.0)
        + tensor(&identity(2), &alg.l3) * C64::from(omega0)
        + tensor(&pauli(Pauli::X), &alg.quadrature()) * C64::from(omega0 * eta / 2.0)
        + tensor(&pauli(Pauli::Z), &one) * C64::from(g)
        - tensor(&pauli(Pauli::X), &one) * C64::from(delta / 2.0);
    let diff = lhs - rhs;
    let mut sq = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let block = diff.view((a * dim, b * dim), (interior, interior));
            sq += block.norm_squared();
        }
    }
    Ok(NistEquivalence {
        residual: sq.sqrt(),
        leakage,
        interior,
        unitarity_defect: algebra::unitarity_defect(&t),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::HermitianEigen;

    fn eigenvalues(h: &CMat) -> Vec<f64> {
        let mut v: Vec<f64> = HermitianEigen::new(h).unwrap().values.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn two_level_examples() {
        let h = two_level_driven(2.0, 0.0, 1.0);
        assert_eq!(eigenvalues(&h.at(0.3)), vec![-1.0, 1.0]);
        let h = two_level_driven(0.0, 1.0, 0.0);
        assert!(h.is_time_independent());
        assert!((h.at(5.0) - pauli(Pauli::X)).norm() < 1e-15);
        let h = two_level_driven(1.0, 0.3, 2.0);
        let ev = eigenvalues(&h.at(0.0));
        let expected = (0.25f64 + 0.09).sqrt();
        assert!((ev[1] - expected).abs() < 1e-12 && (ev[0] + expected).abs() < 1e-12);
        assert!((expected - 0.5831).abs() < 1e-4);
    }

    #[test]
    fn decoupled_spectrum() {
        let p = ModelParams { omega: 0.7, delta: 0.4, g1: 0.0, g2: 0.0, omega_e: 0.0, kind: AlgebraKind::Oscillator, dim: 6 };
        let h = full_hamiltonian(&p).unwrap();
        let mut expected: Vec<f64> = (0..6)
            .flat_map(|n| [0.7 * n as f64 + 0.2, 0.7 * n as f64 - 0.2])
            .collect();
        expected.sort_by(f64::total_cmp);
        let ev = eigenvalues(&h.at(1.0));
        for (a, b) in ev.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_half_static_entries() {
        let p = ModelParams { omega: 1.3, delta: 0.0, g1: 0.4, g2: 0.0, omega_e: 0.0, kind: AlgebraKind::Su2 { two_j: 1 }, dim: 2 };
        let h = full_hamiltonian(&p).unwrap().at(0.0);
        // basis (e0 x m=-1/2, e0 x m=+1/2, e1 x m=-1/2, e1 x m=+1/2)
        #[rustfmt::skip]
        let expected = [
            -0.65, 0.0, 0.0, 0.4,
            0.0, 0.65, 0.4, 0.0,
            0.0, 0.4, -0.65, 0.0,
            0.4, 0.0, 0.0, 0.65,
        ];
        for (i, e) in expected.iter().enumerate() {
            let z = h[(i / 4, i % 4)];
            assert!((z.re - e).abs() < 1e-15 && z.im == 0.0, "entry {i}: {z}");
        }
    }

    #[test]
    fn drive_vanishes_at_cosine_node() {
        let p = ModelParams { omega: 1.0, delta: 0.3, g1: 0.2, g2: 0.8, omega_e: 2.0, kind: AlgebraKind::Oscillator, dim: 8 };
        let h = full_hamiltonian(&p).unwrap();
        let t = std::f64::consts::FRAC_PI_2 / 2.0;
        assert!((h.at(t) - &h.static_part).norm() < 1e-15);
        assert!(!h.is_time_independent());
    }

    #[test]
    fn built_hamiltonians_are_hermitian() {
        let kinds = [AlgebraKind::Oscillator, AlgebraKind::Su11 { k: 0.5 }, AlgebraKind::Su2 { two_j: 3 }];
        for kind in kinds {
            let p = ModelParams { omega: 1.0, delta: 0.3, g1: 0.2, g2: 0.8, omega_e: 1.7, kind, dim: 10 }.with_kind(kind);
            let h = full_hamiltonian(&p).unwrap();
            for t in [0.0, 0.37, 1.9, 12.0] {
                assert!(algebra::hermiticity_defect(&h.at(t)) < 1e-12);
            }
        }
        let h = nist_hamiltonian(1.0, 0.1, 0.2, 0.3, 24).unwrap();
        assert!(algebra::hermiticity_defect(&h) < 1e-12);
    }

    #[test]
    fn param_validation() {
        let mut p = ModelParams::oscillator(1.0, 0.1, 0.2, 0.0, 8);
        assert!(p.validate().is_ok());
        p.omega = 0.0;
        assert!(p.validate().is_err());
        let p = ModelParams::oscillator(1.0, 0.1, 0.5, 0.0, 8).with_kind(AlgebraKind::Su11 { k: 1.0 });
        assert!(matches!(p.validate(), Err(Error::CouplingDomain { .. })));
        let mut p = ModelParams::oscillator(1.0, 0.1, 0.2, 0.0, 8).with_kind(AlgebraKind::Su2 { two_j: 2 });
        p.dim = 5;
        assert!(matches!(p.validate(), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn nist_eta_zero_collapses() {
        let dim = 10;
        let alg = build_ladder(AlgebraKind::Oscillator, dim).unwrap();
        let h = nist_hamiltonian(1.1, 0.3, 0.0, 0.5, dim).unwrap();
        let expected = tensor(&identity(2), &alg.l3) * C64::from(1.1)
            + tensor(&pauli(Pauli::X), &alg.identity()) * C64::from(0.3)
            + tensor(&pauli(Pauli::Z), &alg.identity()) * C64::from(0.25);
        assert!((h - expected).norm() < 1e-14);
        let h = nist_hamiltonian(1.1, 0.0, 0.4, 0.5, dim).unwrap();
        let off_diag: f64 = h.iter().enumerate().filter(|(i, _)| i % (2 * dim + 1) != 0).map(|(_, z)| z.norm()).sum();
        assert!(off_diag < 1e-14);
    }

    #[test]
    fn lamb_dicke_block_unitary() {
        let alg = build_ladder(AlgebraKind::Oscillator, 64).unwrap();
        let e = lamb_dicke_exp(0.1, &alg).unwrap();
        assert!(algebra::unitarity_defect(&e) < 1e-10);
    }

    #[test]
    fn t_eta_unitary() {
        for eta in [0.0, 0.2, 0.7] {
            assert!(algebra::unitarity_defect(&t_eta(eta, 32).unwrap()) < 1e-10);
        }
        // at eta = 0 the flip is sigma_1 and T = (sigma_1 W) (x) e^{-i pi N / 2}
        let t = t_eta(0.0, 6).unwrap();
        let quarter = CMat::from_diagonal(&CVec::from_iterator(6, (0..6).map(|n| (-I * std::f64::consts::FRAC_PI_2 * n as f64).exp())));
        let expected = tensor(&(pauli(Pauli::X) * pauli(Pauli::Walsh)), &quarter);
        assert!((t - expected).norm() < 1e-14);
    }

    #[test]
    fn phase_rotation_identity() {
        let dim = 64;
        let alg = build_ladder(AlgebraKind::Oscillator, dim).unwrap();
        let theta = std::f64::consts::FRAC_PI_2;
        let rot = |s: f64| CMat::from_diagonal(&CVec::from_iterator(dim, (0..dim).map(|n| (I * s * theta * n as f64).exp())));
        let lhs = rot(1.0) * &alg.lowering * rot(-1.0);
        let rhs = &alg.lowering * (-I * theta).exp();
        assert!(algebra::block_norm(&(lhs - rhs), dim - 1) < 1e-10);
    }

    #[test]
    fn nist_equivalence_eta_zero_exact() {
        let report = verify_nist_equivalence(1.0, 0.05, 0.0, 0.2, 16).unwrap();
        assert!(report.residual < 1e-10, "{report:?}");
    }

    #[test]
    fn nist_equivalence_small_truncation_flags_leakage() {
        let err = verify_nist_equivalence(1.0, 0.05, 0.3, 0.2, 32).unwrap_err();
        assert!(matches!(err, Error::TruncationLeakage { .. }), "{err:?}");
    }
}
