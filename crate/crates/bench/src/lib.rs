//! Shared fixtures for the criterion benches.

use rabidress_core::algebra::AlgebraKind;
use rabidress_core::{build_frame, CVec, ModelParams};

/// Oscillator mode with a cosine field, at the given truncation.
pub fn driven_oscillator(dim: usize) -> ModelParams {
    ModelParams { omega_e: 0.5, ..ModelParams::oscillator(1.0, 0.1, 0.3, 0.3, dim) }
}

pub fn spin_mode(two_j: u32) -> ModelParams {
    ModelParams::oscillator(1.0, 0.1, 0.8, 0.3, 0).with_kind(AlgebraKind::Su2 { two_j })
}

/// Lowest `lambda = +1` dressed state of `p`.
pub fn ground_state(p: &ModelParams) -> CVec {
    build_frame(p).expect("fixture parameters are valid").state_unchecked(1, 0)
}
