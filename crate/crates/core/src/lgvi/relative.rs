use crate::error::Result;
use crate::liegroup::{vee_unchecked, Mat3, Rotation, Vec3};
use crate::potential::{eval_relative, moment_relative, PotentialEval};
use crate::state::{relative_inertia, RelativeState, System};

use super::{check_step, solve_implicit_f, SolverConfig, StepOutput};

/// Reduced configuration: relative position and attitude, plus the inertial
/// position and attitude of body 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeConfiguration {
    pub x: Vec3,
    pub attitude: Mat3,
    pub x2: Vec3,
    pub attitude2: Mat3,
}

/// Step between consecutive reduced configurations:
/// `X_{k+1} = F₂ᵀ(X_k + y)`, `R_{k+1} = F₂ᵀ F R_k`, `x₂_{k+1} = x₂_k + dx2`,
/// `R₂_{k+1} = R₂_k F₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeIncrement {
    /// `F₂ X_{k+1} − X_k`, the displacement seen in the body-2 frame at `k`.
    pub y: Vec3,
    pub f: Mat3,
    pub f2: Mat3,
    pub dx2: Vec3,
}

/// Two consecutive reduced configurations, stored as the first one plus the
/// increment to the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeConfigPair {
    pub current: RelativeConfiguration,
    pub increment: RelativeIncrement,
}

impl From<&RelativeState> for RelativeConfiguration {
    fn from(s: &RelativeState) -> Self {
        RelativeConfiguration {
            x: s.x,
            attitude: s.attitude,
            x2: s.x2,
            attitude2: s.attitude2,
        }
    }
}

fn potential(system: &System, x: &Vec3, r: &Mat3) -> Result<PotentialEval> {
    let (b1, b2) = system.pair()?;
    eval_relative(b1, b2, &system.gravity, x, r)
}

/// `vee(F J_d − J_d Fᵀ)`
fn lyapunov_vee(f: &Mat3, jd: &Mat3) -> Vec3 {
    vee_unchecked(&(f * jd - jd * f.transpose()))
}

/// Discrete Hamiltonian map in relative coordinates, with reconstruction of
/// body 2.
///
/// `F₂` is solved from `h S(Π₂ + h/2 X × ∂U/∂X + h/2 M) = F₂ J_{d2} − J_{d2} F₂ᵀ`
/// and `F` from `h S(Π − h/2 M) = F J_{dR} − J_{dR} Fᵀ`; both only need data
/// at the start of the step. The body-2 momentum update uses `Π₂`, the
/// quantity paired with `F₂` by the Legendre transform.
pub fn step_relative_hamiltonian(
    system: &System,
    s: &RelativeState,
    h: f64,
    cfg: &SolverConfig,
) -> Result<StepOutput<RelativeState>> {
    check_step(h)?;
    let (b1, b2) = system.pair()?;
    let m = system.reduced_mass()?;
    let m2 = b2.mass();
    let pot = potential(system, &s.x, &s.attitude)?;
    let moment = moment_relative(&s.attitude, &pot.du_dr);
    let orbital = s.x.cross(&pot.du_dx);

    let kick2 = s.angular_momentum2 + (orbital + moment) * (0.5 * h);
    let inc2 = solve_implicit_f(b2.nonstandard_inertia(), &(kick2 * h), cfg)?;
    let kick1 = s.angular_momentum - moment * (0.5 * h);
    let jdr = relative_inertia(&s.attitude, b1.nonstandard_inertia());
    let inc1 = solve_implicit_f(&jdr, &(kick1 * h), cfg)?;
    let f2 = *inc2.rotation.matrix();
    let f = *inc1.rotation.matrix();
    let f2t = f2.transpose();

    let x = f2t * (s.x + s.momentum * (h / m) - pot.du_dx * (h * h / (2.0 * m)));
    let attitude = f2t * f * s.attitude;
    let x2 = s.x2 + s.momentum2 * (h / m2) + s.attitude2 * pot.du_dx * (h * h / (2.0 * m2));
    let attitude2 = s.attitude2 * f2;

    let pot_next = potential(system, &x, &attitude)?;
    let moment_next = moment_relative(&attitude, &pot_next.du_dr);
    let orbital_next = x.cross(&pot_next.du_dx);

    let state = RelativeState {
        x,
        attitude,
        momentum: f2t * (s.momentum - pot.du_dx * (0.5 * h)) - pot_next.du_dx * (0.5 * h),
        angular_momentum: f2t * kick1 - moment_next * (0.5 * h),
        angular_momentum2: f2t * kick2 + (orbital_next + moment_next) * (0.5 * h),
        x2,
        momentum2: s.momentum2 + (s.attitude2 * pot.du_dx + attitude2 * pot_next.du_dx) * (0.5 * h),
        attitude2,
    };
    Ok(StepOutput {
        state,
        iterations: inc1.iterations + inc2.iterations,
    })
}

/// Discrete Lagrangian map on reduced configurations,
/// `(q_k, q_{k+1}) ↦ (q_{k+1}, q_{k+2})`:
/// `F₂_{k+1} X_{k+2} − 2X_{k+1} + F₂_kᵀ X_k = −(h²/m) ∂U_{k+1}/∂X`, with the
/// attitude increments solved from
/// `F J_{dR} − J_{dR} Fᵀ = F₂_kᵀ(F_k J_{dR_k} − J_{dR_k} F_kᵀ)F₂_k − h² S(M)`
/// and `F₂ J_{d2} − J_{d2} F₂ᵀ = F₂_kᵀ(F₂_k J_{d2} − J_{d2} F₂_kᵀ)F₂_k + h² S(X × ∂U/∂X + M)`.
pub fn step_relative_lagrangian(
    system: &System,
    pair: &RelativeConfigPair,
    h: f64,
    cfg: &SolverConfig,
) -> Result<StepOutput<RelativeConfigPair>> {
    check_step(h)?;
    let (b1, b2) = system.pair()?;
    let m = system.reduced_mass()?;
    let inc = &pair.increment;
    let cur = pair.next();
    let pot = potential(system, &cur.x, &cur.attitude)?;
    let moment = moment_relative(&cur.attitude, &pot.du_dr);
    let f2_prev_t = inc.f2.transpose();

    let jd1 = b1.nonstandard_inertia();
    let jdr_prev = relative_inertia(&pair.current.attitude, jd1);
    let jdr = relative_inertia(&cur.attitude, jd1);
    let g1 = f2_prev_t * lyapunov_vee(&inc.f, &jdr_prev) - moment * (h * h);
    let sol1 = solve_implicit_f(&jdr, &g1, cfg)?;

    let jd2 = b2.nonstandard_inertia();
    let g2 = f2_prev_t * lyapunov_vee(&inc.f2, jd2) + (cur.x.cross(&pot.du_dx) + moment) * (h * h);
    let sol2 = solve_implicit_f(jd2, &g2, cfg)?;

    let increment = RelativeIncrement {
        y: f2_prev_t * inc.y - pot.du_dx * (h * h / m),
        f: sol1.rotation.into_matrix(),
        f2: sol2.rotation.into_matrix(),
        dx2: inc.dx2 + cur.attitude2 * pot.du_dx * (h * h / b2.mass()),
    };
    Ok(StepOutput {
        state: RelativeConfigPair {
            current: cur,
            increment,
        },
        iterations: sol1.iterations + sol2.iterations,
    })
}

/// Relative momenta at `current` from the discrete Legendre transform of
/// `(current, next)`.
pub fn relative_legendre_to_momenta(
    system: &System,
    current: &RelativeConfiguration,
    next: &RelativeConfiguration,
    h: f64,
) -> Result<RelativeState> {
    RelativeConfigPair::from_configurations(current, next)?.momenta(system, h)
}

/// Relative momenta at `next` from the discrete Legendre transform of
/// `(current, next)`.
pub fn relative_legendre_at_next(
    system: &System,
    current: &RelativeConfiguration,
    next: &RelativeConfiguration,
    h: f64,
) -> Result<RelativeState> {
    RelativeConfigPair::from_configurations(current, next)?.momenta_at_next(system, h)
}

impl RelativeConfigPair {
    /// The pair `(current, next)`; the attitude increments must be rotations.
    pub fn from_configurations(
        current: &RelativeConfiguration,
        next: &RelativeConfiguration,
    ) -> Result<Self> {
        let f2 = Rotation::new(current.attitude2.transpose() * next.attitude2)?.into_matrix();
        let f = Rotation::new(f2 * next.attitude * current.attitude.transpose())?.into_matrix();
        Ok(RelativeConfigPair {
            current: *current,
            increment: RelativeIncrement {
                y: f2 * next.x - current.x,
                f,
                f2,
                dx2: next.x2 - current.x2,
            },
        })
    }

    /// `q_{k+1}`.
    pub fn next(&self) -> RelativeConfiguration {
        let c = &self.current;
        let inc = &self.increment;
        let f2t = inc.f2.transpose();
        RelativeConfiguration {
            x: f2t * (c.x + inc.y),
            attitude: f2t * inc.f * c.attitude,
            x2: c.x2 + inc.dx2,
            attitude2: c.attitude2 * inc.f2,
        }
    }

    /// Starts the reduced Lagrangian map from momenta, with the increments of
    /// one Hamiltonian step.
    pub fn from_momenta(
        system: &System,
        s: &RelativeState,
        h: f64,
        cfg: &SolverConfig,
    ) -> Result<StepOutput<Self>> {
        check_step(h)?;
        let (b1, b2) = system.pair()?;
        let m = system.reduced_mass()?;
        let pot = potential(system, &s.x, &s.attitude)?;
        let moment = moment_relative(&s.attitude, &pot.du_dr);
        let g2 = (s.angular_momentum2 + (s.x.cross(&pot.du_dx) + moment) * (0.5 * h)) * h;
        let sol2 = solve_implicit_f(b2.nonstandard_inertia(), &g2, cfg)?;
        let jdr = relative_inertia(&s.attitude, b1.nonstandard_inertia());
        let sol1 = solve_implicit_f(&jdr, &((s.angular_momentum - moment * (0.5 * h)) * h), cfg)?;
        let increment = RelativeIncrement {
            y: s.momentum * (h / m) - pot.du_dx * (h * h / (2.0 * m)),
            f: sol1.rotation.into_matrix(),
            f2: sol2.rotation.into_matrix(),
            dx2: s.momentum2 * (h / b2.mass())
                + s.attitude2 * pot.du_dx * (h * h / (2.0 * b2.mass())),
        };
        Ok(StepOutput {
            state: RelativeConfigPair {
                current: s.into(),
                increment,
            },
            iterations: sol1.iterations + sol2.iterations,
        })
    }

    /// Relative momenta at `q_k`.
    pub fn momenta(&self, system: &System, h: f64) -> Result<RelativeState> {
        check_step(h)?;
        let (b1, b2) = system.pair()?;
        let m = system.reduced_mass()?;
        let c = &self.current;
        let inc = &self.increment;
        let pot = potential(system, &c.x, &c.attitude)?;
        let moment = moment_relative(&c.attitude, &pot.du_dr);
        let jdr = relative_inertia(&c.attitude, b1.nonstandard_inertia());
        Ok(RelativeState {
            x: c.x,
            attitude: c.attitude,
            momentum: inc.y * (m / h) + pot.du_dx * (0.5 * h),
            angular_momentum: lyapunov_vee(&inc.f, &jdr) / h + moment * (0.5 * h),
            angular_momentum2: lyapunov_vee(&inc.f2, b2.nonstandard_inertia()) / h
                - (c.x.cross(&pot.du_dx) + moment) * (0.5 * h),
            x2: c.x2,
            momentum2: inc.dx2 * (b2.mass() / h) - c.attitude2 * pot.du_dx * (0.5 * h),
            attitude2: c.attitude2,
        })
    }

    /// Relative momenta at `q_{k+1}`.
    pub fn momenta_at_next(&self, system: &System, h: f64) -> Result<RelativeState> {
        check_step(h)?;
        let (b1, b2) = system.pair()?;
        let m = system.reduced_mass()?;
        let inc = &self.increment;
        let n = self.next();
        let pot = potential(system, &n.x, &n.attitude)?;
        let moment = moment_relative(&n.attitude, &pot.du_dr);
        let f2t = inc.f2.transpose();
        let jdr = relative_inertia(&self.current.attitude, b1.nonstandard_inertia());
        Ok(RelativeState {
            x: n.x,
            attitude: n.attitude,
            momentum: f2t * inc.y * (m / h) - pot.du_dx * (0.5 * h),
            angular_momentum: f2t * lyapunov_vee(&inc.f, &jdr) / h - moment * (0.5 * h),
            angular_momentum2: f2t * lyapunov_vee(&inc.f2, b2.nonstandard_inertia()) / h
                + (n.x.cross(&pot.du_dx) + moment) * (0.5 * h),
            x2: n.x2,
            momentum2: inc.dx2 * (b2.mass() / h) + n.attitude2 * pot.du_dx * (0.5 * h),
            attitude2: n.attitude2,
        })
    }
}
