use super::*;
use crate::algebra::{identity, unitarity_defect, AlgebraKind};
use crate::dressing::{build_frame, transition_table};
use crate::hamiltonians::ModelParams;
use crate::oracle::{integrate, uniform_grid, StepControl};

fn n_frame(g2: f64, omega_e: f64) -> DressedFrame {
    let mut p = ModelParams::oscillator(1.0, 0.0, 0.2, g2, 48);
    p.omega_e = omega_e;
    build_frame(&p).unwrap()
}

/// Basis columns of the trusted levels.
fn trusted_columns(frame: &DressedFrame) -> CMat {
    let dim = frame.dim();
    let basis = frame.basis_matrix();
    let cols: Vec<usize> = (0..=frame.n_max).chain(dim..=dim + frame.n_max).collect();
    basis.select_columns(&cols)
}

#[test]
fn theta_drive_values() {
    let d = ThetaDrive::new(0.7, 2.0);
    assert_eq!(d.value(0.0), 0.0);
    assert!((d.value(1.1) - 0.7 * (2.2f64).sin() / 2.0).abs() < 1e-15);
    let c = ThetaDrive::new(0.7, 0.0);
    assert_eq!(c.value(3.0), 0.7 * 3.0);
    let slow = ThetaDrive::new(0.7, 1e-7);
    assert!((slow.value(3.0) - c.value(3.0)).abs() < 1e-9);
}

#[test]
fn u0_at_zero_is_identity() {
    let frame = n_frame(0.4, 0.0);
    let u = u0(0.0, &frame, ThetaDrive::from(&frame));
    assert!((u - identity(2 * frame.dim())).norm() < 1e-10);
}

#[test]
fn u0_is_unitary() {
    let frame = n_frame(0.4, 1.5);
    let u = u0(2.3, &frame, ThetaDrive::from(&frame));
    assert!(unitarity_defect(&u) < 1e-10);
}

#[test]
fn u0_without_field_is_diagonal_in_dressed_basis() {
    let frame = n_frame(0.0, 0.0);
    let t = 1.7;
    let u = u0(t, &frame, ThetaDrive::from(&frame));
    let basis = frame.basis_matrix();
    let d = basis.adjoint() * u * &basis;
    let dim = frame.dim();
    for i in 0..2 * dim {
        for j in 0..2 * dim {
            let expected = if i == j { (-I * t * frame.energies[i % dim]).exp() } else { ZERO };
            assert!((d[(i, j)] - expected).norm() < 1e-10);
        }
    }
}

#[test]
fn u0_solves_its_equation() {
    // central finite difference of U0 on the trusted subspace against H0(t) U0
    for omega_e in [0.0, 1.3] {
        let frame = n_frame(0.4, omega_e);
        let drive = ThetaDrive::from(&frame);
        let cols = trusted_columns(&frame);
        let (t, h) = (0.7, 1e-6);
        let forward = u0(t + h, &frame, drive) * &cols;
        let backward = u0(t - h, &frame, drive) * &cols;
        let deriv = (forward - backward) * (I / (2.0 * h));
        let rhs = frame.h0(t) * u0(t, &frame, drive) * &cols;
        let residual = (deriv - rhs).norm();
        assert!(residual < 1e-6, "omega_e = {omega_e}: {residual}");
    }
}

#[test]
fn u0_apply_matches_matrix() {
    let frame = n_frame(0.4, 0.9);
    let drive = ThetaDrive::from(&frame);
    let psi = frame.state_unchecked(-1, 2);
    let a = u0(1.1, &frame, drive) * &psi;
    let b = u0_apply(1.1, &frame, drive, &psi);
    assert!((a - b).norm() < 1e-12);
}

/// An N-case case-I resonance in the weak-dressing regime, reached by tuning
/// omega with g1/omega held at 0.3.
fn case_i_solution(g2: f64) -> ResonanceSolution {
    let base = ModelParams::oscillator(1.0, 0.4, 0.3, g2, 48);
    find_resonance(ResonanceCase::I, 0, 1, &base, FreeParam::OmegaScaled, (1e-6, 0.05)).unwrap()
}

/// Case III between the two states of a spin-1/2 mode, tuned through g2.
fn spin_half_solution(delta: f64) -> ResonanceSolution {
    let base = ModelParams::oscillator(1.0, delta, 1.0, 0.0, 2).with_kind(AlgebraKind::Su2 { two_j: 1 });
    find_resonance(ResonanceCase::III, 0, 1, &base, FreeParam::G2, (0.0, 5.0)).unwrap()
}

#[test]
fn block_propagator_basics() {
    let sol = case_i_solution(20.0);
    for case in ResonanceCase::ALL {
        let u0 = analytic_block_propagator(case, &sol, 0.0);
        assert!((u0 - identity(4)).norm() < 1e-14);
        for t in [0.3, 7.0, 123.0] {
            assert!(unitarity_defect(&analytic_block_propagator(case, &sol, t)) < 1e-10);
        }
    }
    let mut zero = sol.clone();
    zero.rabi_frequency = 0.0;
    for t in [0.5, 40.0] {
        assert!((analytic_block_propagator(ResonanceCase::I, &zero, t) - identity(4)).norm() < 1e-14);
    }
}

#[test]
fn block_propagator_matches_exponential() {
    // closed form against expm of -i t (Delta/2) [[0, gamma Q], [gamma Q^T, 0]] conjugated by Gamma
    let sol = case_i_solution(20.0);
    let g = sol.rabi_frequency / 2.0;
    let selectors: [(ResonanceCase, [f64; 4]); 4] = [
        (ResonanceCase::I, [1.0, 0.0, 0.0, 0.0]),
        (ResonanceCase::II, [0.0, 0.0, 0.0, 1.0]),
        (ResonanceCase::III, [0.0, 1.0, 0.0, 0.0]),
        (ResonanceCase::IV, [0.0, 0.0, 1.0, 0.0]),
    ];
    let rot = CMat::from_fn(4, 4, |i, j| {
        if i / 2 == j / 2 {
            C64::from(sol.blocks[i / 2].gamma[(i % 2, j % 2)])
        } else {
            ZERO
        }
    });
    for (case, q) in selectors {
        let mut gen = CMat::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                gen[(i, 2 + j)] = C64::from(g * q[2 * i + j]);
                gen[(2 + j, i)] = C64::from(g * q[2 * i + j]);
            }
        }
        let t = 2.7;
        let expected = &rot * crate::algebra::expm(&(gen * (-I * t))).unwrap() * rot.transpose();
        let got = analytic_block_propagator(case, &sol, t);
        assert!((got - expected).norm() < 1e-12, "{case}");
    }
}

#[test]
fn case_i_fixes_complement_plane() {
    let sol = case_i_solution(20.0);
    let u = analytic_block_propagator(ResonanceCase::I, &sol, 3.3);
    for (slot, block) in sol.blocks.iter().enumerate() {
        // the lambda_- eigenvector of each level is left alone
        let mut v = CVec::zeros(4);
        v[2 * slot] = C64::from(block.gamma[(0, 1)]);
        v[2 * slot + 1] = C64::from(block.gamma[(1, 1)]);
        assert!((&u * &v - &v).norm() < 1e-12);
    }
}

#[test]
fn population_period_matches_rabi_frequency() {
    // locate the maxima of the transfer over three periods
    let sol = case_i_solution(20.0);
    let b0 = CVec::from_column_slice(&resonant_initial_amplitudes(&sol));
    let period = sol.rabi_period();
    let samples = 30_000;
    let transfer: Vec<f64> = (0..=samples)
        .map(|k| {
            let t = 3.0 * period * k as f64 / samples as f64;
            let b = analytic_block_propagator(ResonanceCase::I, &sol, t) * &b0;
            b[2].norm_sqr() + b[3].norm_sqr()
        })
        .collect();
    let mut crossings = Vec::new();
    for k in 1..samples {
        let (a, b) = (transfer[k] - 0.5, transfer[k + 1] - 0.5);
        if a < 0.0 && b >= 0.0 {
            let frac = a / (a - b);
            crossings.push(3.0 * period * (k as f64 + frac) / samples as f64);
        }
    }
    assert_eq!(crossings.len(), 3);
    let measured = (crossings[2] - crossings[0]) / 2.0;
    assert!((measured / period - 1.0).abs() < 1e-3);
    let peak = transfer.iter().cloned().fold(0.0, f64::max);
    assert!((peak - 1.0).abs() < 1e-6);
}

#[test]
fn half_period_transfer_agrees_with_reduced_equation() {
    // the reduced equation keeps the fast terms, so the gap is the rotating-wave error
    let mut gaps = Vec::new();
    for g2 in [0.3, 0.6] {
        let sol = case_i_solution(g2);
        let r = rwa_validity(&sol);
        assert!(r < 0.05);
        let b0 = CVec::from_column_slice(&resonant_initial_amplitudes(&sol));
        let t_half = std::f64::consts::PI / sol.rabi_frequency.abs();
        let analytic = analytic_block_propagator(ResonanceCase::I, &sol, t_half) * &b0;
        let p_analytic = analytic[2].norm_sqr() + analytic[3].norm_sqr();
        assert!((p_analytic - 1.0).abs() < 1e-12);
        let reduced = ReducedHamiltonian::new(&sol);
        let grid = uniform_grid(t_half, 9).unwrap();
        let traj = integrate(&reduced, &b0, &grid, StepControl::default().with_tol(1e-7)).unwrap();
        let end = traj.states.last().unwrap();
        let p_oracle = end[2].norm_sqr() + end[3].norm_sqr();
        let gap = (p_oracle - p_analytic).abs();
        assert!(gap < 3.0 * r, "g2 = {g2}: gap {gap}, r {r}");
        gaps.push(gap);
    }
    assert!(gaps[1] < gaps[0], "{gaps:?}");
}

#[test]
fn reduced_hamiltonian_is_hermitian() {
    let sol = case_i_solution(2.0);
    let h = ReducedHamiltonian::new(&sol);
    for t in [0.0, 0.4, 9.0] {
        assert!(crate::algebra::hermiticity_defect(&h.at(t)) < 1e-14);
    }
}

#[test]
fn assembled_state_at_zero() {
    let sol = spin_half_solution(0.05);
    let frame = build_frame(&sol.params).unwrap();
    let psi = assemble_full_state(0.0, &frame, &sol, &[C64::from(1.0), ZERO, ZERO, ZERO]).unwrap();
    assert!((psi - frame.state(1, 0).unwrap()).norm() < 1e-14);
    let bad = assemble_full_state(0.0, &frame, &sol, &[C64::from(1.0), C64::from(1.0), ZERO, ZERO]);
    assert!(matches!(bad, Err(Error::NotNormalized(_))));
}

#[test]
fn assembled_state_keeps_norm() {
    let sol = spin_half_solution(0.05);
    let frame = build_frame(&sol.params).unwrap();
    let b0 = resonant_initial_amplitudes(&sol);
    let period = sol.rabi_period();
    for k in 0..=20 {
        let t = period * k as f64 / 20.0;
        let psi = assemble_full_state(t, &frame, &sol, &b0).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn spin_half_resonance_has_closed_form() {
    let sol = spin_half_solution(0.05);
    // for one spin-1/2 both levels share E = (Delta/2) cos x and gamma = sign(E) sin x
    let x = sol.x;
    assert!((sol.gamma - x.sin()).abs() < 1e-12);
    let e = 0.025 * x.cos();
    let expected_g2 = (sol.big_omega.powi(2) / 4.0 - e * e).sqrt();
    assert!((sol.params.g2 - expected_g2).abs() < 1e-9);
    let table = transition_table(&build_frame(&sol.params).unwrap()).unwrap();
    assert!((table.e_delta(0).unwrap() - e).abs() < 1e-14);
}

#[test]
fn spin_half_full_dynamics_follow_rabi_curve() {
    // in a two-state mode the two-level ansatz is exact; only the RWA error remains
    let sol = spin_half_solution(0.05);
    let frame = build_frame(&sol.params).unwrap();
    let ham = crate::hamiltonians::full_hamiltonian(&sol.params).unwrap();
    let b0 = resonant_initial_amplitudes(&sol);
    let psi0 = assemble_full_state(0.0, &frame, &sol, &b0).unwrap();
    let grid = uniform_grid(sol.rabi_period(), 41).unwrap();
    let traj = integrate(&ham, &psi0, &grid, StepControl::default()).unwrap();
    let pops = crate::oracle::dressed_populations(&traj, &frame).unwrap();
    let level_n = pops.level(1);
    let worst = grid
        .iter()
        .zip(&level_n)
        .map(|(t, p)| (p - transfer_probability(&sol, *t)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 2.0 * rwa_validity(&sol), "{worst} vs r = {}", rwa_validity(&sol));
}
