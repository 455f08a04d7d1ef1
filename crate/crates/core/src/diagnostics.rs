//! Conserved quantities and attitude errors sampled along a trajectory.

use crate::error::{Error, Result};
use crate::liegroup::{hat, orthogonality_error, Mat3, Vec3};
use crate::potential::{eval_inertial, eval_relative};
use crate::state::{InertialState, RelativeState, System};

/// Energy split, total momenta and the worst attitude error of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub energy: f64,
    pub t_trans: f64,
    pub t_rot: f64,
    pub potential: f64,
    /// Total linear momentum `γ_T` in the inertial frame.
    pub linear_momentum: Vec3,
    /// Total angular momentum `π_T` about the inertial origin.
    pub angular_momentum: Vec3,
    /// Largest `‖I − RᵀR‖` over all attitudes in the state.
    pub orth_err_max: f64,
}

impl DiagnosticsRecord {
    fn new(
        t: f64,
        t_trans: f64,
        t_rot: f64,
        potential: f64,
        gamma: Vec3,
        pi: Vec3,
        orth: f64,
    ) -> Self {
        DiagnosticsRecord {
            t,
            energy: t_trans + t_rot + potential,
            t_trans,
            t_rot,
            potential,
            linear_momentum: gamma,
            angular_momentum: pi,
            orth_err_max: orth,
        }
    }
}

/// `½ tr(S(Ω) J_d S(Ω)ᵀ)`, equal to `½ ΩᵀJΩ` for `J = tr(J_d)I − J_d`.
pub fn rotational_energy_trace(omega: &Vec3, jd: &Mat3) -> f64 {
    let s = hat(omega);
    0.5 * (s * jd * s.transpose()).trace()
}

/// Diagnostics of an inertial state of any number of bodies.
pub fn diagnostics_inertial(
    system: &System,
    state: &InertialState,
    t: f64,
) -> Result<DiagnosticsRecord> {
    if system.bodies.len() != state.bodies.len() {
        return Err(Error::InvalidConfig(format!(
            "{} bodies but {} body states",
            system.bodies.len(),
            state.bodies.len()
        )));
    }
    let u = if system.bodies.len() > 1 {
        eval_inertial(
            &system.bodies,
            &system.gravity,
            &state.positions(),
            &state.attitudes(),
        )?
        .u
    } else {
        0.0
    };
    let mut t_trans = 0.0;
    let mut t_rot = 0.0;
    let mut gamma = Vec3::zeros();
    let mut pi = Vec3::zeros();
    let mut orth = 0.0f64;
    for (model, b) in system.bodies.iter().zip(&state.bodies) {
        let omega = model.angular_velocity(&b.angular_momentum)?;
        t_trans += 0.5 * b.momentum.norm_squared() / model.mass();
        t_rot += 0.5 * b.angular_momentum.dot(&omega);
        gamma += b.momentum;
        pi += b.x.cross(&b.momentum) + b.attitude * b.angular_momentum;
        orth = orth.max(orthogonality_error(&b.attitude));
    }
    Ok(DiagnosticsRecord::new(
        t, t_trans, t_rot, u, gamma, pi, orth,
    ))
}

/// Diagnostics of a relative two-body state, expressed in the inertial frame.
pub fn diagnostics_relative(
    system: &System,
    s: &RelativeState,
    t: f64,
) -> Result<DiagnosticsRecord> {
    let (b1, b2) = system.pair()?;
    let m = system.reduced_mass()?;
    let (m1, m2) = (b1.mass(), b2.mass());
    let u = eval_relative(b1, b2, &system.gravity, &s.x, &s.attitude)?.u;

    let v = s.momentum / m;
    let v2 = s.attitude2.transpose() * s.momentum2 / m2;
    let omega = s.attitude * b1.angular_velocity(&(s.attitude.transpose() * s.angular_momentum))?;
    let omega2 = b2.angular_velocity(&s.angular_momentum2)?;

    let t_trans = 0.5 * m1 * (v + v2).norm_squared() + 0.5 * m2 * v2.norm_squared();
    let t_rot = 0.5 * omega.dot(&s.angular_momentum) + 0.5 * omega2.dot(&s.angular_momentum2);

    let gamma = s.attitude2 * ((v + v2) * m1 + v2 * m2);
    let x1 = s.x2 + s.attitude2 * s.x;
    let center = (x1 * m1 + s.x2 * m2) / (m1 + m2);
    let pi = s.attitude2 * (s.x.cross(&v) * m + s.angular_momentum + s.angular_momentum2)
        + center.cross(&gamma);

    let orth = orthogonality_error(&s.attitude)
        .max(orthogonality_error(&s.attitude2))
        .max(orthogonality_error(&(s.attitude2 * s.attitude)));
    Ok(DiagnosticsRecord::new(
        t, t_trans, t_rot, u, gamma, pi, orth,
    ))
}
