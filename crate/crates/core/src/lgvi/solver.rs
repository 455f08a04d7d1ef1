//! Newton solver for `F J_d − J_d Fᵀ = S(g)` with `F = exp(S(f))`.
//!
//! Substituting Rodrigues' formula turns the matrix equation into the vector
//! equation `g = G(f)`,
//!
//! ```text
//! G(f) = (sin‖f‖/‖f‖) J f + ((1 − cos‖f‖)/‖f‖²) f × J f,
//! ```
//!
//! with `J = tr(J_d) I − J_d`. Newton starts from the linearization
//! `f⁰ = J⁻¹ g`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::liegroup::{hat, rodrigues_coefficients, rodrigues_exp, Mat3, Rotation, Vec3};

/// Below this ‖f‖ the Jacobian coefficients use their Taylor series.
const JACOBIAN_SERIES: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Tolerance on ‖g − G(f)‖ relative to ‖g‖. Iteration also stops once
    /// the Newton update reaches the rounding level of `f`.
    pub tolerance: f64,
    pub max_iterations: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-15,
            max_iterations: 50,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "solver tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig(
                "solver needs at least one iteration".into(),
            ));
        }
        Ok(())
    }
}

/// Solution of one implicit attitude update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepIncrement {
    /// `F = exp(S(f))`, the attitude change over the step.
    pub rotation: Rotation,
    pub f: Vec3,
    pub iterations: u32,
}

/// `G(f)` for standard inertia `j`.
pub fn g_map(j: &Mat3, f: &Vec3) -> Vec3 {
    let (a, b) = rodrigues_coefficients(f.norm());
    let jf = j * f;
    jf * a + f.cross(&jf) * b
}

/// `c = (x cos x − sin x)/x³` and `d = (x sin x − 2(1 − cos x))/x⁴`.
fn jacobian_coefficients(x: f64) -> (f64, f64) {
    if x < JACOBIAN_SERIES {
        let x2 = x * x;
        (
            -1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0,
            -1.0 / 12.0 + x2 / 180.0 - x2 * x2 / 6720.0,
        )
    } else {
        closed_form_coefficients(x)
    }
}

fn closed_form_coefficients(x: f64) -> (f64, f64) {
    let (s, co) = x.sin_cos();
    let half = (0.5 * x).sin();
    let x3 = x * x * x;
    ((x * co - s) / x3, (x * s - 4.0 * half * half) / (x3 * x))
}

/// `∇G(f)`.
pub fn g_jacobian(j: &Mat3, f: &Vec3) -> Mat3 {
    let x = f.norm();
    let (a, b) = rodrigues_coefficients(x);
    let (c, d) = jacobian_coefficients(x);
    let jf = j * f;
    jf * f.transpose() * c + j * a + f.cross(&jf) * f.transpose() * d + (hat(f) * j - hat(&jf)) * b
}

/// Residual `‖F J_d − J_d Fᵀ − S(g)‖_F` of a candidate solution.
pub fn lyapunov_residual(jd: &Mat3, g: &Vec3, f: &Mat3) -> f64 {
    (f * jd - jd * f.transpose() - hat(g)).norm()
}

/// Solves `F J_d − J_d Fᵀ = S(g)` for `F ∈ SO(3)`.
///
/// `g = 0` always yields `F = I`, even for the zero inertia of a point mass.
pub fn solve_implicit_f(jd: &Mat3, g: &Vec3, cfg: &SolverConfig) -> Result<StepIncrement> {
    if *g == Vec3::zeros() {
        return Ok(StepIncrement {
            rotation: Rotation::identity(),
            f: Vec3::zeros(),
            iterations: 0,
        });
    }
    let j = Mat3::identity() * jd.trace() - jd;
    let j_inv = j.try_inverse().ok_or(Error::SingularInertia)?;
    let mut f = j_inv * g;
    if !(f.norm() < PI) {
        return Err(Error::OutsideCaptureBasin { norm: f.norm() });
    }
    let target = cfg.tolerance * g.norm();
    let mut residual = (g - g_map(&j, &f)).norm();
    let mut iterations = 0;
    while residual >= target {
        if iterations >= cfg.max_iterations {
            return Err(Error::NoConvergence {
                iterations,
                residual,
            });
        }
        let step = g_jacobian(&j, &f)
            .lu()
            .solve(&(g - g_map(&j, &f)))
            .ok_or(Error::SingularJacobian)?;
        if !step.iter().all(|c| c.is_finite()) {
            return Err(Error::SingularJacobian);
        }
        f += step;
        iterations += 1;
        residual = (g - g_map(&j, &f)).norm();
        // once the update is at the rounding level of f, further iterations
        // cannot reduce the residual
        if step.norm() <= 4.0 * f64::EPSILON * f.norm().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(StepIncrement {
        rotation: rodrigues_exp(&f),
        f,
        iterations,
    })
}
