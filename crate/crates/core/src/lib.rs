//! Driver/vehicle alert game with an open-quantum-system model of driver
//! cognition.
//!
//! * [`engine`]: Lindblad operators, vectorized generators and time evolution.
//! * [`cognition`]: Luce rates, initial states, continue probabilities and the
//!   driver's final responses.
//! * [`game`]: utilities, beliefs and the car's payoffs.
//! * [`equilibrium`]: pure and mixed equilibria.
//! * [`sweep`]: belief-plane sweeps, summaries, outputs and self-validation.
//!
//! Structural code is generic over [`Scalar`] and runs on `f32`, `f64` and
//! exact rationals; analytic code is generic over [`Real`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cognition;
pub mod engine;
pub mod equilibrium;
mod error;
pub mod game;
pub mod matrix;
pub mod scalar;
pub mod sweep;

pub use error::{Error, Result};
pub use scalar::{decimal_from_f64, exact_from_f64, Real, Scalar};

pub use num_rational::BigRational;

/// Exact rational scalar.
pub type Rational = BigRational;

pub type Generator = engine::GeneratorMatrix<f64>;
pub type ExactGenerator = engine::GeneratorMatrix<BigRational>;
pub type Density = engine::DensityState<f64>;
pub type Utilities = game::UtilityTable<f64>;
pub type ExactUtilities = game::UtilityTable<BigRational>;
pub type Params = cognition::CognitionParams<f64>;
pub type Rates = cognition::LuceRates<f64>;
pub type Model = cognition::DriverModel<f64>;
pub type DriverGame = equilibrium::Game<f64>;
pub type Complex = num_complex::Complex64;
pub type CMatrix = matrix::ComplexMatrix<f64>;
