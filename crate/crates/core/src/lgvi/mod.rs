//! Lie group variational integrators.
//!
//! Four discrete maps share one implicit attitude solver:
//!
//! | coordinates | Hamiltonian (momenta)            | Lagrangian (two configurations) |
//! |-------------|----------------------------------|---------------------------------|
//! | inertial    | [`step_inertial_hamiltonian`]    | [`step_inertial_lagrangian`]    |
//! | relative    | [`step_relative_hamiltonian`]    | [`step_relative_lagrangian`]    |
//!
//! Attitudes are only ever updated by multiplying with the exponential of a
//! skew-symmetric matrix, so they stay on SO(3) up to rounding.

mod compose;
mod inertial;
mod relative;
mod solver;

pub use compose::{compose, CompositionScheme};
pub use inertial::{
    legendre_momenta_at_next, legendre_to_momenta, step_inertial_hamiltonian,
    step_inertial_lagrangian, Configuration, Increment, InertialConfigPair,
};
pub use relative::{
    relative_legendre_at_next, relative_legendre_to_momenta, step_relative_hamiltonian,
    step_relative_lagrangian, RelativeConfigPair, RelativeConfiguration, RelativeIncrement,
};
pub use solver::{
    g_jacobian, g_map, lyapunov_residual, solve_implicit_f, SolverConfig, StepIncrement,
};

use crate::error::{Error, Result};

/// A new state together with the Newton iterations spent producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput<S> {
    pub state: S,
    pub iterations: u32,
}

fn check_step(h: f64) -> Result<()> {
    if h.is_finite() && h != 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidStep(h))
    }
}
