//! Open-quantum-system engine: Lindblad operators for the eight-state
//! road/car/driver basis, their vectorized superoperators, and time evolution.
//!
//! Every structured (closed-form) constructor has a brute-force Kronecker
//! counterpart; the two are compared entry-for-entry in tests and by
//! `validate`.

mod density;
mod evolve;
mod expm;
mod generator;
mod operators;
mod superop;

pub use density::DensityState;
pub use evolve::{evolve, integrate_vectorized_rk4, MasterEquation, Propagator};
pub use expm::expm;
pub use generator::{build_generator, generator_brute_force, GeneratorMatrix};
pub use operators::{hamiltonian, jump_operator};
pub use superop::{
    build_lambda, build_phi, build_vec_l, follows_block_pattern, lambda_closed_form, partner_state,
    phi_closed_form, vec_l_brute_force, vec_l_closed_form, vectorize_hamiltonian,
    vectorized_hamiltonian_closed_form, VecL,
};

/// Number of basis states: {SNC, SNS, SAC, SAS, DNC, DNS, DAC, DAS}.
pub const DIM: usize = 8;

/// Length of a vectorized 8x8 operator.
pub const VEC_DIM: usize = DIM * DIM;

/// Default fixed step of the Runge-Kutta oracles.
pub const RK4_STEP: f64 = 0.01;
