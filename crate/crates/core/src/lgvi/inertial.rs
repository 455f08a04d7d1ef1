use crate::error::{Error, Result};
use crate::liegroup::{vee_unchecked, Mat3, Rotation, Vec3};
use crate::potential::{eval_inertial, moment_inertial, InertialPotential};
use crate::state::{BodyState, InertialState, System};

use super::{check_step, solve_implicit_f, SolverConfig, StepOutput};

/// Position and attitude of one body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Configuration {
    pub x: Vec3,
    pub attitude: Mat3,
}

/// Step from one configuration to the next: `x_{k+1} = x_k + dx`,
/// `R_{k+1} = R_k F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Increment {
    pub dx: Vec3,
    pub f: Mat3,
}

/// Two consecutive configurations of every body, the state of the discrete
/// Lagrangian map.
///
/// The pair `(q_k, q_{k+1})` is stored as `q_k` plus the increments leading
/// to `q_{k+1}`, so that the differences entering the map and the discrete
/// Legendre transform never have to be recovered by cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct InertialConfigPair {
    pub current: Vec<Configuration>,
    pub increments: Vec<Increment>,
}

fn potential_at(system: &System, configs: &[Configuration]) -> Result<InertialPotential> {
    let xs: Vec<Vec3> = configs.iter().map(|c| c.x).collect();
    let rs: Vec<Mat3> = configs.iter().map(|c| c.attitude).collect();
    eval_inertial(&system.bodies, &system.gravity, &xs, &rs)
}

fn configurations(state: &InertialState) -> Vec<Configuration> {
    state
        .bodies
        .iter()
        .map(|b| Configuration {
            x: b.x,
            attitude: b.attitude,
        })
        .collect()
}

/// Discrete Hamiltonian map in inertial coordinates.
///
/// Positions advance first, then each attitude update `F` is solved from
/// `h S(Π + h/2 M) = F J_d − J_d Fᵀ`, the potential is evaluated once at the
/// new configuration, and the momenta close the step.
pub fn step_inertial_hamiltonian(
    system: &System,
    state: &InertialState,
    h: f64,
    cfg: &SolverConfig,
) -> Result<StepOutput<InertialState>> {
    check_step(h)?;
    let pot = eval_inertial(
        &system.bodies,
        &system.gravity,
        &state.positions(),
        &state.attitudes(),
    )?;
    let mut iterations = 0;
    let mut next = Vec::with_capacity(state.bodies.len());
    let mut kicked = Vec::with_capacity(state.bodies.len());
    for (i, (model, b)) in system.bodies.iter().zip(&state.bodies).enumerate() {
        let m = model.mass();
        let moment = moment_inertial(&b.attitude, &pot.du_dr[i]);
        let x = b.x + b.momentum * (h / m) - pot.du_dx[i] * (h * h / (2.0 * m));
        let half_kick = b.angular_momentum + moment * (0.5 * h);
        let inc = solve_implicit_f(model.nonstandard_inertia(), &(half_kick * h), cfg)?;
        iterations += inc.iterations;
        let f = *inc.rotation.matrix();
        next.push(Configuration {
            x,
            attitude: b.attitude * f,
        });
        kicked.push((f, half_kick));
    }
    let pot_next = potential_at(system, &next)?;
    let bodies = state
        .bodies
        .iter()
        .zip(&next)
        .zip(&kicked)
        .enumerate()
        .map(|(i, ((b, c), (f, half_kick)))| BodyState {
            x: c.x,
            attitude: c.attitude,
            momentum: b.momentum - (pot.du_dx[i] + pot_next.du_dx[i]) * (0.5 * h),
            angular_momentum: f.transpose() * half_kick
                + moment_inertial(&c.attitude, &pot_next.du_dr[i]) * (0.5 * h),
        })
        .collect();
    Ok(StepOutput {
        state: InertialState { bodies },
        iterations,
    })
}

/// Discrete Lagrangian map `(q_k, q_{k+1}) ↦ (q_{k+1}, q_{k+2})` in
/// inertial coordinates:
/// `x_{k+2} − 2x_{k+1} + x_k = −(h²/m) ∂U_{k+1}/∂x`,
/// `F_{k+1} J_d − J_d F_{k+1}ᵀ = J_d F_k − F_kᵀ J_d + h² S(M_{k+1})`.
pub fn step_inertial_lagrangian(
    system: &System,
    pair: &InertialConfigPair,
    h: f64,
    cfg: &SolverConfig,
) -> Result<StepOutput<InertialConfigPair>> {
    check_step(h)?;
    let next = pair.next();
    let pot = potential_at(system, &next)?;
    let mut iterations = 0;
    let mut increments = Vec::with_capacity(next.len());
    for (i, ((model, inc), q)) in system
        .bodies
        .iter()
        .zip(&pair.increments)
        .zip(&next)
        .enumerate()
    {
        let jd = model.nonstandard_inertia();
        let moment = moment_inertial(&q.attitude, &pot.du_dr[i]);
        let g = vee_unchecked(&(jd * inc.f - inc.f.transpose() * jd)) + moment * (h * h);
        let sol = solve_implicit_f(jd, &g, cfg)?;
        iterations += sol.iterations;
        increments.push(Increment {
            dx: inc.dx - pot.du_dx[i] * (h * h / model.mass()),
            f: sol.rotation.into_matrix(),
        });
    }
    Ok(StepOutput {
        state: InertialConfigPair {
            current: next,
            increments,
        },
        iterations,
    })
}

/// Momenta at `q_k` from the discrete Legendre transform of `(q_k, q_{k+1})`:
/// `γ_k = (m/h)(x_{k+1} − x_k) + (h/2)∂U_k/∂x_k`,
/// `S(Π_k) = (F_k J_d − J_d F_kᵀ)/h − (h/2) S(M_k)`.
pub fn legendre_to_momenta(
    system: &System,
    current: &[Configuration],
    next: &[Configuration],
    h: f64,
) -> Result<InertialState> {
    InertialConfigPair::from_configurations(current, next)?.momenta(system, h)
}

/// Momenta at `q_{k+1}` from the other half of the discrete Legendre
/// transform: `γ_{k+1} = (m/h)(x_{k+1} − x_k) − (h/2)∂U_{k+1}/∂x_{k+1}`,
/// `Π_{k+1} = F_kᵀ vee(F_k J_d − J_d F_kᵀ)/h + (h/2) M_{k+1}`.
pub fn legendre_momenta_at_next(
    system: &System,
    current: &[Configuration],
    next: &[Configuration],
    h: f64,
) -> Result<InertialState> {
    InertialConfigPair::from_configurations(current, next)?.momenta_at_next(system, h)
}

impl InertialConfigPair {
    /// The pair `(current, next)`; every `R_kᵀR_{k+1}` must be a rotation.
    pub fn from_configurations(current: &[Configuration], next: &[Configuration]) -> Result<Self> {
        if current.len() != next.len() {
            return Err(Error::InvalidConfig(format!(
                "configuration pair has {} and {} bodies",
                current.len(),
                next.len()
            )));
        }
        let increments = current
            .iter()
            .zip(next)
            .map(|(c, n)| {
                Ok(Increment {
                    dx: n.x - c.x,
                    f: Rotation::new(c.attitude.transpose() * n.attitude)?.into_matrix(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(InertialConfigPair {
            current: current.to_vec(),
            increments,
        })
    }

    /// `q_{k+1}`.
    pub fn next(&self) -> Vec<Configuration> {
        self.current
            .iter()
            .zip(&self.increments)
            .map(|(c, inc)| Configuration {
                x: c.x + inc.dx,
                attitude: c.attitude * inc.f,
            })
            .collect()
    }

    /// Starts the Lagrangian map from positions and momenta: the increments
    /// are those of one Hamiltonian step.
    pub fn from_momenta(
        system: &System,
        state: &InertialState,
        h: f64,
        cfg: &SolverConfig,
    ) -> Result<StepOutput<Self>> {
        check_step(h)?;
        let pot = eval_inertial(
            &system.bodies,
            &system.gravity,
            &state.positions(),
            &state.attitudes(),
        )?;
        let mut iterations = 0;
        let mut increments = Vec::with_capacity(state.bodies.len());
        for (i, (model, b)) in system.bodies.iter().zip(&state.bodies).enumerate() {
            let m = model.mass();
            let moment = moment_inertial(&b.attitude, &pot.du_dr[i]);
            let g = (b.angular_momentum + moment * (0.5 * h)) * h;
            let sol = solve_implicit_f(model.nonstandard_inertia(), &g, cfg)?;
            iterations += sol.iterations;
            increments.push(Increment {
                dx: b.momentum * (h / m) - pot.du_dx[i] * (h * h / (2.0 * m)),
                f: sol.rotation.into_matrix(),
            });
        }
        Ok(StepOutput {
            state: InertialConfigPair {
                current: configurations(state),
                increments,
            },
            iterations,
        })
    }

    /// Positions and momenta at `q_k`.
    pub fn momenta(&self, system: &System, h: f64) -> Result<InertialState> {
        check_step(h)?;
        let pot = potential_at(system, &self.current)?;
        let bodies = system
            .bodies
            .iter()
            .zip(self.current.iter().zip(&self.increments))
            .enumerate()
            .map(|(i, (model, (c, inc)))| {
                let jd = model.nonstandard_inertia();
                let f = inc.f;
                let moment = moment_inertial(&c.attitude, &pot.du_dr[i]);
                BodyState {
                    x: c.x,
                    attitude: c.attitude,
                    momentum: inc.dx * (model.mass() / h) + pot.du_dx[i] * (0.5 * h),
                    angular_momentum: vee_unchecked(&(f * jd - jd * f.transpose())) / h
                        - moment * (0.5 * h),
                }
            })
            .collect();
        Ok(InertialState { bodies })
    }

    /// Positions and momenta at `q_{k+1}`.
    pub fn momenta_at_next(&self, system: &System, h: f64) -> Result<InertialState> {
        check_step(h)?;
        let next = self.next();
        let pot = potential_at(system, &next)?;
        let bodies = system
            .bodies
            .iter()
            .zip(next.iter().zip(&self.increments))
            .enumerate()
            .map(|(i, (model, (n, inc)))| {
                let jd = model.nonstandard_inertia();
                let f = inc.f;
                let moment = moment_inertial(&n.attitude, &pot.du_dr[i]);
                BodyState {
                    x: n.x,
                    attitude: n.attitude,
                    momentum: inc.dx * (model.mass() / h) - pot.du_dx[i] * (0.5 * h),
                    angular_momentum: f.transpose() * vee_unchecked(&(f * jd - jd * f.transpose()))
                        / h
                        + moment * (0.5 * h),
                }
            })
            .collect();
        Ok(InertialState { bodies })
    }
}
