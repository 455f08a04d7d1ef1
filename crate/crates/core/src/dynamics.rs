//! Continuous equations of motion in the four formulations, and the classical
//! Runge-Kutta integrator used as a non-geometric baseline.
//!
//! Every right-hand side returns its derivative in the same struct layout as
//! the state it was given.

use crate::error::{Error, Result};
use crate::liegroup::hat;
use crate::potential::{eval_inertial, eval_relative, moment_inertial, moment_relative};
use crate::state::{
    relative_inertia, BodyState, BodyVelocity, InertialState, InertialVelocities, Linear,
    RelativeState, RelativeVelocities, System,
};

/// Inertial equations in Hamiltonian variables:
/// `γ̇ = −∂U/∂x`, `Π̇ = Π × Ω + M`, `ẋ = γ/m`, `Ṙ = R S(Ω)`.
pub fn deriv_inertial_hamiltonian(system: &System, s: &InertialState) -> Result<InertialState> {
    let pot = eval_inertial(
        &system.bodies,
        &system.gravity,
        &s.positions(),
        &s.attitudes(),
    )?;
    let bodies = system
        .bodies
        .iter()
        .zip(&s.bodies)
        .enumerate()
        .map(|(i, (model, b))| {
            let omega = model.inverse_inertia()? * b.angular_momentum;
            let moment = moment_inertial(&b.attitude, &pot.du_dr[i]);
            Ok(BodyState {
                x: b.momentum / model.mass(),
                attitude: b.attitude * hat(&omega),
                momentum: -pot.du_dx[i],
                angular_momentum: b.angular_momentum.cross(&omega) + moment,
            })
        })
        .collect::<Result<_>>()?;
    Ok(InertialState { bodies })
}

/// Inertial equations in Lagrangian variables:
/// `v̇ = −(1/m)∂U/∂x`, `JΩ̇ + Ω × JΩ = M`, `ẋ = v`, `Ṙ = R S(Ω)`.
pub fn deriv_inertial_lagrangian(
    system: &System,
    s: &InertialVelocities,
) -> Result<InertialVelocities> {
    let xs: Vec<_> = s.bodies.iter().map(|b| b.x).collect();
    let rs: Vec<_> = s.bodies.iter().map(|b| b.attitude).collect();
    let pot = eval_inertial(&system.bodies, &system.gravity, &xs, &rs)?;
    let bodies = system
        .bodies
        .iter()
        .zip(&s.bodies)
        .enumerate()
        .map(|(i, (model, b))| {
            let j = model.standard_inertia();
            let moment = moment_inertial(&b.attitude, &pot.du_dr[i]);
            let omega = b.angular_velocity;
            Ok(BodyVelocity {
                x: b.velocity,
                attitude: b.attitude * hat(&omega),
                velocity: -pot.du_dx[i] / model.mass(),
                angular_velocity: model.inverse_inertia()? * (moment - omega.cross(&(j * omega))),
            })
        })
        .collect::<Result<_>>()?;
    Ok(InertialVelocities { bodies })
}

/// Relative equations in Hamiltonian variables, with reconstruction of body 2.
pub fn deriv_relative_hamiltonian(system: &System, s: &RelativeState) -> Result<RelativeState> {
    let (b1, b2) = system.pair()?;
    let m = system.reduced_mass()?;
    let pot = eval_relative(b1, b2, &system.gravity, &s.x, &s.attitude)?;
    let moment = moment_relative(&s.attitude, &pot.du_dr);
    b1.inverse_inertia()?;
    let jr_inv = relative_inertia(&s.attitude, b1.standard_inertia())
        .try_inverse()
        .ok_or(Error::SingularInertia)?;
    let omega = jr_inv * s.angular_momentum;
    let omega2 = b2.inverse_inertia()? * s.angular_momentum2;
    Ok(RelativeState {
        x: s.momentum / m - omega2.cross(&s.x),
        attitude: (hat(&omega) - hat(&omega2)) * s.attitude,
        momentum: -omega2.cross(&s.momentum) - pot.du_dx,
        angular_momentum: -omega2.cross(&s.angular_momentum) - moment,
        angular_momentum2: -omega2.cross(&s.angular_momentum2) + s.x.cross(&pot.du_dx) + moment,
        x2: s.momentum2 / b2.mass(),
        momentum2: s.attitude2 * pot.du_dx,
        attitude2: s.attitude2 * hat(&omega2),
    })
}

/// Relative equations in Lagrangian variables.
///
/// The body-1 equation `d/dt(J_R Ω) + Ω₂ × J_R Ω = −M` is expanded with
/// `J̇_R = Ṙ J₁ Rᵀ + R J₁ Ṙᵀ` and solved for `Ω̇`.
pub fn deriv_relative_lagrangian(
    system: &System,
    s: &RelativeVelocities,
) -> Result<RelativeVelocities> {
    let (b1, b2) = system.pair()?;
    let m = system.reduced_mass()?;
    let pot = eval_relative(b1, b2, &system.gravity, &s.x, &s.attitude)?;
    let moment = moment_relative(&s.attitude, &pot.du_dr);
    let omega = s.angular_velocity;
    let omega2 = s.angular_velocity2;
    let r_dot = (hat(&omega) - hat(&omega2)) * s.attitude;

    let j1 = b1.standard_inertia();
    b1.inverse_inertia()?;
    let jr = relative_inertia(&s.attitude, j1);
    let jr_dot = r_dot * j1 * s.attitude.transpose() + s.attitude * j1 * r_dot.transpose();
    let jr_inv = jr.try_inverse().ok_or(Error::SingularInertia)?;
    let pi_dot = -omega2.cross(&(jr * omega)) - moment;

    let j2 = b2.standard_inertia();
    let torque2 = s.x.cross(&pot.du_dx) + moment - omega2.cross(&(j2 * omega2));

    Ok(RelativeVelocities {
        x: s.velocity - omega2.cross(&s.x),
        attitude: r_dot,
        velocity: -omega2.cross(&s.velocity) - pot.du_dx / m,
        angular_velocity: jr_inv * (pi_dot - jr_dot * omega),
        angular_velocity2: b2.inverse_inertia()? * torque2,
        x2: s.velocity2,
        velocity2: s.attitude2 * pot.du_dx / b2.mass(),
        attitude2: s.attitude2 * hat(&omega2),
    })
}

/// One classical fourth-order Runge-Kutta step.
///
/// Attitudes are advanced entrywise like every other component, so they
/// drift off SO(3).
pub fn rk4_step<S, F>(deriv: F, state: &S, h: f64) -> Result<S>
where
    S: Linear,
    F: Fn(&S) -> Result<S>,
{
    if !h.is_finite() {
        return Err(Error::InvalidStep(h));
    }
    let k1 = deriv(state)?;
    let k2 = deriv(&state.add_scaled(0.5 * h, &k1))?;
    let k3 = deriv(&state.add_scaled(0.5 * h, &k2))?;
    let k4 = deriv(&state.add_scaled(h, &k3))?;
    Ok(state
        .add_scaled(h / 6.0, &k1)
        .add_scaled(h / 3.0, &k2)
        .add_scaled(h / 3.0, &k3)
        .add_scaled(h / 6.0, &k4))
}
