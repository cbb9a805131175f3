//! Dressed-state dynamics of a two-level atom coupled to a bosonic,
//! su(1,1) or su(2) mode and a classical field, together with a brute-force
//! integrator that checks every analytic result on truncated matrices.

pub mod algebra;
pub mod dressing;
pub mod dynamics;
pub mod error;
pub mod hamiltonians;
pub mod oracle;

pub use algebra::{build_ladder, AlgebraKind, CMat, CVec, LadderAlgebra, Pauli, C64};
pub use dressing::{build_frame, transition_table, DressedFrame, TransitionTable};
pub use dynamics::{
    analytic_block_propagator, assemble_full_state, find_resonance, rwa_validity, u0, FreeParam, ResonanceCase,
    ResonanceSolution, ThetaDrive, TwoLevelBlock,
};
pub use error::{Error, Result};
pub use hamiltonians::{full_hamiltonian, Hamiltonian, ModelParams, TimeDepHamiltonian};
pub use oracle::{dressed_populations, integrate, jacobi_anger, StepControl, Trajectory};
