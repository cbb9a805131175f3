//! Invariant suite behind `rabidress validate`. Each function returns one
//! [`Check`] against a fixed tolerance.

use std::f64::consts::TAU;

use rabidress_core::algebra::{build_ladder, AlgebraKind, CMat, CVec, C64};
use rabidress_core::dressing::{build_frame, laguerre, transition_table, EIGEN_TOL};
use rabidress_core::dynamics::twolevel::{two_level_generator, appendix_u, gamma_matrix, CMat2, lambda_pm, projector_formula_check, reconstruct, Mat2};
use rabidress_core::dynamics::{u0_apply, ThetaDrive};
use rabidress_core::hamiltonians::{full_hamiltonian, verify_nist_equivalence, Hamiltonian, NistEquivalence};
use rabidress_core::oracle::{drive_phase, integrate, jacobi_anger, uniform_grid, StepControl};
use rabidress_core::{ModelParams, Result as CoreResult};

use crate::report::Check;

fn from_core(name: &str, tol: f64, r: CoreResult<Check>) -> Check {
    r.unwrap_or_else(|e| Check::failed(name, tol, e.to_string()))
}

/// Largest interior commutator residual over every kind, dimensions up to 64.
pub fn algebra_commutators() -> Check {
    const TOL: f64 = 1e-10;
    let name = "ladder commutators (interior block)";
    from_core(name, TOL, (|| {
        let mut worst: f64 = 0.0;
        for dim in 2..=64 {
            for kind in [AlgebraKind::Oscillator, AlgebraKind::Su11 { k: 0.5 }, AlgebraKind::Su11 { k: 1.5 }] {
                worst = build_ladder(kind, dim)?.commutator_residuals().into_iter().fold(worst, f64::max);
            }
            let spin = AlgebraKind::Su2 { two_j: dim as u32 - 1 };
            worst = build_ladder(spin, dim)?.commutator_residuals().into_iter().fold(worst, f64::max);
        }
        Ok(Check::below(name, worst, TOL))
    })())
}

/// Dressed-state eigen relation for every trusted level of N, K and J modes.
pub fn dressing_eigen_relation() -> Check {
    let name = "dressed eigen relation (n <= n_max)";
    from_core(name, EIGEN_TOL, (|| {
        let mut worst: f64 = 0.0;
        let mut detail = Vec::new();
        for g1 in [0.1, 0.3] {
            let kinds = [
                AlgebraKind::Oscillator,
                AlgebraKind::Su11 { k: 0.5 },
                AlgebraKind::Su11 { k: 1.0 },
                AlgebraKind::Su2 { two_j: 1 },
                AlgebraKind::Su2 { two_j: 4 },
                AlgebraKind::Su2 { two_j: 9 },
            ];
            for kind in kinds {
                let p = ModelParams::oscillator(1.0, 0.2, g1, 0.5, 96).with_kind(kind);
                let frame = build_frame(&p)?;
                let r = frame.checks[..=frame.n_max].iter().map(|c| c.eigen_residual).fold(0.0, f64::max);
                worst = worst.max(r);
                detail.push(format!("{kind} g1={g1}: n_max={}", frame.n_max));
            }
        }
        Ok(Check::below(name, worst, EIGEN_TOL).with_detail(detail.join("; ")))
    })())
}

/// Oscillator diagonal `T_nn` against `e^{-x^2/2} L_n(x^2)` for `n <= 20`, `x <= 2`.
pub fn laguerre_diagonal() -> Check {
    const TOL: f64 = 1e-8;
    let name = "oscillator T_nn vs Laguerre closed form";
    from_core(name, TOL, (|| {
        let mut worst: f64 = 0.0;
        for x in [0.25, 0.5, 1.0, 1.5, 2.0] {
            let p = ModelParams::oscillator(1.0, 2.0, x / 2.0, 0.0, 96);
            let table = transition_table(&build_frame(&p)?)?;
            for n in 0..=20 {
                let closed = (-x * x / 2.0).exp() * laguerre(n, x * x);
                worst = worst.max((table.t(n, n) - closed).abs());
                // Delta = 2 makes E_{n,Delta} = T_nn
                worst = worst.max((table.e_delta(n)? - closed).abs());
            }
        }
        Ok(Check::below(name, worst, TOL))
    })())
}

pub fn nist_equivalence() -> Check {
    let name = "trapped-ion conjugation identity (interior block)";
    from_core(name, NistEquivalence::TOL, (|| {
        let r = verify_nist_equivalence(1.0, 0.05, 0.1, 0.2, 96)?;
        Ok(Check::below(name, r.residual, NistEquivalence::TOL)
            .with_detail(format!("interior={} leakage={:e}", r.interior, r.leakage)))
    })())
}

struct RotatingTwoLevel {
    alpha: f64,
    theta: f64,
}

impl Hamiltonian for RotatingTwoLevel {
    fn dim(&self) -> usize {
        2
    }

    fn at(&self, t: f64) -> CMat {
        let g = two_level_generator(t, self.alpha, self.theta);
        CMat::from_fn(2, 2, |i, j| g[(i, j)])
    }
}

/// The closed-form 2x2 propagator against brute-force integration on `[0, 10]`.
pub fn closed_form_vs_integrator() -> Check {
    const TOL: f64 = 1e-8;
    let name = "two-level closed form vs integrator";
    from_core(name, TOL, (|| {
        let grid = uniform_grid(10.0, 41)?;
        let control = StepControl::default().with_tol(1e-10);
        let mut worst: f64 = 0.0;
        for (alpha, theta) in [(1.0, 0.0), (3.0, 4.0), (0.2, 5.0)] {
            let eq = RotatingTwoLevel { alpha, theta };
            for start in [[C64::from(1.0), C64::from(0.0)], [C64::from(0.0), C64::from(1.0)]] {
                let psi0 = CVec::from_column_slice(&start);
                let traj = integrate(&eq, &psi0, &grid, control)?;
                for (t, s) in grid.iter().zip(&traj.states) {
                    let u = appendix_u(*t, alpha, theta);
                    let expected = apply2(&u, &start);
                    worst = worst.max(((s[0] - expected[0]).norm_sqr() + (s[1] - expected[1]).norm_sqr()).sqrt());
                }
            }
        }
        Ok(Check::below(name, worst, TOL))
    })())
}

fn apply2(u: &CMat2, v: &[C64; 2]) -> [C64; 2] {
    [u[(0, 0)] * v[0] + u[(0, 1)] * v[1], u[(1, 0)] * v[0] + u[(1, 1)] * v[1]]
}

/// With no level splitting the full evolution must equal `U0(t) psi0`.
pub fn exact_sector() -> Check {
    const TOL: f64 = 1e-7;
    let name = "zero-splitting evolution vs U0";
    from_core(name, TOL, (|| {
        let mut worst: f64 = 0.0;
        let cases = [
            ModelParams::oscillator(1.0, 0.0, 0.3, 0.5, 40),
            ModelParams { omega_e: 0.5, ..ModelParams::oscillator(1.0, 0.0, 0.3, 0.3, 16) },
            ModelParams::oscillator(1.0, 0.0, 0.2, 0.7, 40).with_kind(AlgebraKind::Su11 { k: 0.75 }),
            ModelParams::oscillator(1.0, 0.0, 0.8, 0.4, 0).with_kind(AlgebraKind::Su2 { two_j: 5 }),
        ];
        for p in cases {
            let frame = build_frame(&p)?;
            let ham = full_hamiltonian(&p)?;
            let drive = ThetaDrive::from(&frame);
            let n = 2.min(frame.n_max);
            // superposition of two dressed states on opposite branches
            let psi0 = (frame.state(1, 0)? + frame.state(-1, n)? * C64::new(0.0, 1.0)) * C64::from(std::f64::consts::FRAC_1_SQRT_2);
            let grid = uniform_grid(3.0 * TAU / frame.big_omega, 61)?;
            let traj = integrate(&ham, &psi0, &grid, StepControl::default().with_tol(1e-8))?;
            for (t, s) in grid.iter().zip(&traj.states) {
                worst = worst.max((s - u0_apply(*t, &frame, drive, &psi0)).norm());
            }
        }
        Ok(Check::below(name, worst, TOL))
    })())
}

/// Twenty-term symmetric Bessel sums against `e^{2i Theta(t)}` for `theta/omega <= 1`.
pub fn jacobi_anger_partial_sums() -> Check {
    const TOL: f64 = 1e-12;
    let name = "Jacobi-Anger partial sums (20 terms)";
    from_core(name, TOL, (|| {
        let mut worst: f64 = 0.0;
        for omega in [0.5, 1.0, 3.0] {
            for ratio in [0.0, 0.1, 0.25, 0.5, 0.75, 1.0] {
                let theta = ratio * omega;
                for k in 0..=200 {
                    let t = TAU / omega * k as f64 / 200.0;
                    let s = jacobi_anger(theta, omega, 20, t)?;
                    worst = worst.max((s - drive_phase(theta, omega, t)).norm());
                }
            }
        }
        Ok(Check::below(name, worst, TOL))
    })())
}

/// Vieta relations, orthogonality and the projector formula on a grid.
pub fn two_level_identities() -> Check {
    const TOL: f64 = 1e-12;
    let mut worst: f64 = 0.0;
    let values = [-3.0, -0.5, 0.0, 0.2, 1.0, 4.0];
    for &e in &values {
        for &g2 in &values {
            let (p, m) = lambda_pm(e, g2);
            worst = worst.max((p * m + e * e).abs()).max((p + m + 2.0 * g2).abs());
            let g = gamma_matrix(e, g2);
            worst = worst.max((g.transpose() * g - Mat2::identity()).norm());
            worst = worst.max((reconstruct(e, g2) - Mat2::new(0.0, e, e, -2.0 * g2)).norm());
            if let Ok(c) = projector_formula_check(e, g2) {
                worst = worst.max(c.residual);
            }
        }
    }
    Check::below("two-level block identities", worst, TOL)
}

/// Every check above, in a fixed order.
pub fn suite() -> Vec<Check> {
    vec![
        algebra_commutators(),
        dressing_eigen_relation(),
        laguerre_diagonal(),
        nist_equivalence(),
        closed_form_vs_integrator(),
        exact_sector(),
        jacobi_anger_partial_sums(),
        two_level_identities(),
    ]
}
