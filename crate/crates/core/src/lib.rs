//! Full two-body dynamics with Lie group variational integrators.
//!
//! Two rigid bodies modelled as collections of point masses attract each
//! other through Newtonian gravity. The crate provides the mutual potential
//! and its gradients, continuous equations of motion with an RK4 reference
//! integrator, structure-preserving discrete maps in inertial and relative
//! coordinates, conserved-quantity diagnostics, and a run driver.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod lgvi;
pub mod liegroup;
pub mod par;
pub mod potential;
pub mod runner;
pub mod state;

pub use error::{Error, Result};
pub use liegroup::{Mat3, Rotation, Vec3};
