//! Simulation states in inertial and relative coordinates, the conversions
//! between velocity and momentum variables, and the two-body reduction maps.

use crate::error::{Error, Result};
use crate::liegroup::{Mat3, Vec3};
use crate::potential::{BodyModel, Gravity};

/// Bodies plus the gravity model acting between them.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    pub bodies: Vec<BodyModel>,
    pub gravity: Gravity,
}

impl System {
    pub fn new(bodies: Vec<BodyModel>, gravity: Gravity) -> Self {
        System { bodies, gravity }
    }

    pub fn two_body(body1: BodyModel, body2: BodyModel, gravity: Gravity) -> Self {
        System {
            bodies: vec![body1, body2],
            gravity,
        }
    }

    /// Both bodies of a two-body system, or an error for any other count.
    pub fn pair(&self) -> Result<(&BodyModel, &BodyModel)> {
        match self.bodies.as_slice() {
            [a, b] => Ok((a, b)),
            other => Err(Error::InvalidConfig(format!(
                "relative coordinates need exactly two bodies, got {}",
                other.len()
            ))),
        }
    }

    /// `m = m₁m₂/(m₁+m₂)`
    pub fn reduced_mass(&self) -> Result<f64> {
        let (a, b) = self.pair()?;
        Ok(a.mass() * b.mass() / (a.mass() + b.mass()))
    }
}

/// Vector-space operations used by explicit integrators.
pub trait Linear: Sized {
    /// `self + a·other`
    fn add_scaled(&self, a: f64, other: &Self) -> Self;
}

/// One body in inertial coordinates, Hamiltonian variables: position,
/// attitude, linear momentum `γ`, body-frame angular momentum `Π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState {
    pub x: Vec3,
    pub attitude: Mat3,
    pub momentum: Vec3,
    pub angular_momentum: Vec3,
}

/// One body in inertial coordinates, Lagrangian variables: position,
/// attitude, velocity `v`, body-frame angular velocity `Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyVelocity {
    pub x: Vec3,
    pub attitude: Mat3,
    pub velocity: Vec3,
    pub angular_velocity: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InertialState {
    pub bodies: Vec<BodyState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InertialVelocities {
    pub bodies: Vec<BodyVelocity>,
}

impl InertialState {
    pub fn positions(&self) -> Vec<Vec3> {
        self.bodies.iter().map(|b| b.x).collect()
    }

    pub fn attitudes(&self) -> Vec<Mat3> {
        self.bodies.iter().map(|b| b.attitude).collect()
    }

    /// `γ = m v`, `Π = J Ω`
    pub fn from_velocities(bodies: &[BodyModel], v: &InertialVelocities) -> Result<Self> {
        check_len(bodies.len(), v.bodies.len())?;
        Ok(InertialState {
            bodies: bodies
                .iter()
                .zip(&v.bodies)
                .map(|(m, b)| BodyState {
                    x: b.x,
                    attitude: b.attitude,
                    momentum: b.velocity * m.mass(),
                    angular_momentum: m.standard_inertia() * b.angular_velocity,
                })
                .collect(),
        })
    }

    /// `v = γ/m`, `Ω = J⁻¹Π`
    pub fn to_velocities(&self, bodies: &[BodyModel]) -> Result<InertialVelocities> {
        check_len(bodies.len(), self.bodies.len())?;
        let bodies = bodies
            .iter()
            .zip(&self.bodies)
            .map(|(m, b)| {
                Ok(BodyVelocity {
                    x: b.x,
                    attitude: b.attitude,
                    velocity: b.momentum / m.mass(),
                    angular_velocity: m.inverse_inertia()? * b.angular_momentum,
                })
            })
            .collect::<Result<_>>()?;
        Ok(InertialVelocities { bodies })
    }
}

fn check_len(models: usize, states: usize) -> Result<()> {
    if models == states {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "{models} body models but {states} body states"
        )))
    }
}

impl Linear for InertialState {
    fn add_scaled(&self, a: f64, other: &Self) -> Self {
        InertialState {
            bodies: self
                .bodies
                .iter()
                .zip(&other.bodies)
                .map(|(s, o)| BodyState {
                    x: s.x + o.x * a,
                    attitude: s.attitude + o.attitude * a,
                    momentum: s.momentum + o.momentum * a,
                    angular_momentum: s.angular_momentum + o.angular_momentum * a,
                })
                .collect(),
        }
    }
}

impl Linear for InertialVelocities {
    fn add_scaled(&self, a: f64, other: &Self) -> Self {
        InertialVelocities {
            bodies: self
                .bodies
                .iter()
                .zip(&other.bodies)
                .map(|(s, o)| BodyVelocity {
                    x: s.x + o.x * a,
                    attitude: s.attitude + o.attitude * a,
                    velocity: s.velocity + o.velocity * a,
                    angular_velocity: s.angular_velocity + o.angular_velocity * a,
                })
                .collect(),
        }
    }
}

/// Two-body state in the frame of body 2, Hamiltonian variables, with the
/// inertial motion of body 2 carried along for reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeState {
    /// `X = R₂ᵀ(x₁ − x₂)`
    pub x: Vec3,
    /// `R = R₂ᵀR₁`
    pub attitude: Mat3,
    /// `Γ = m V`
    pub momentum: Vec3,
    /// `Π = J_R Ω`, body-1 angular momentum in the body-2 frame.
    pub angular_momentum: Vec3,
    /// `Π₂ = J₂ Ω₂`
    pub angular_momentum2: Vec3,
    pub x2: Vec3,
    /// `γ₂ = m₂ v₂`
    pub momentum2: Vec3,
    pub attitude2: Mat3,
}

/// Two-body state in the frame of body 2, Lagrangian variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeVelocities {
    pub x: Vec3,
    pub attitude: Mat3,
    /// `V = R₂ᵀ(ẋ₁ − ẋ₂)`
    pub velocity: Vec3,
    /// `Ω = R Ω₁`
    pub angular_velocity: Vec3,
    pub angular_velocity2: Vec3,
    pub x2: Vec3,
    pub velocity2: Vec3,
    pub attitude2: Mat3,
}

/// `J_R = R J₁ Rᵀ`
pub fn relative_inertia(r: &Mat3, j1: &Mat3) -> Mat3 {
    r * j1 * r.transpose()
}

impl RelativeState {
    pub fn from_velocities(system: &System, v: &RelativeVelocities) -> Result<Self> {
        let (b1, b2) = system.pair()?;
        let m = system.reduced_mass()?;
        Ok(RelativeState {
            x: v.x,
            attitude: v.attitude,
            momentum: v.velocity * m,
            angular_momentum: relative_inertia(&v.attitude, b1.standard_inertia())
                * v.angular_velocity,
            angular_momentum2: b2.standard_inertia() * v.angular_velocity2,
            x2: v.x2,
            momentum2: v.velocity2 * b2.mass(),
            attitude2: v.attitude2,
        })
    }

    pub fn to_velocities(&self, system: &System) -> Result<RelativeVelocities> {
        let (b1, b2) = system.pair()?;
        let m = system.reduced_mass()?;
        Ok(RelativeVelocities {
            x: self.x,
            attitude: self.attitude,
            velocity: self.momentum / m,
            angular_velocity: relative_angular_velocity(
                &self.attitude,
                b1,
                &self.angular_momentum,
            )?,
            angular_velocity2: b2.inverse_inertia()? * self.angular_momentum2,
            x2: self.x2,
            velocity2: self.momentum2 / b2.mass(),
            attitude2: self.attitude2,
        })
    }
}

/// `Ω = J_R⁻¹ Π`
pub fn relative_angular_velocity(r: &Mat3, body1: &BodyModel, pi: &Vec3) -> Result<Vec3> {
    body1.inverse_inertia()?;
    let jr = relative_inertia(r, body1.standard_inertia());
    let inv = jr.try_inverse().ok_or(Error::SingularInertia)?;
    Ok(inv * pi)
}

impl Linear for RelativeState {
    fn add_scaled(&self, a: f64, o: &Self) -> Self {
        RelativeState {
            x: self.x + o.x * a,
            attitude: self.attitude + o.attitude * a,
            momentum: self.momentum + o.momentum * a,
            angular_momentum: self.angular_momentum + o.angular_momentum * a,
            angular_momentum2: self.angular_momentum2 + o.angular_momentum2 * a,
            x2: self.x2 + o.x2 * a,
            momentum2: self.momentum2 + o.momentum2 * a,
            attitude2: self.attitude2 + o.attitude2 * a,
        }
    }
}

impl Linear for RelativeVelocities {
    fn add_scaled(&self, a: f64, o: &Self) -> Self {
        RelativeVelocities {
            x: self.x + o.x * a,
            attitude: self.attitude + o.attitude * a,
            velocity: self.velocity + o.velocity * a,
            angular_velocity: self.angular_velocity + o.angular_velocity * a,
            angular_velocity2: self.angular_velocity2 + o.angular_velocity2 * a,
            x2: self.x2 + o.x2 * a,
            velocity2: self.velocity2 + o.velocity2 * a,
            attitude2: self.attitude2 + o.attitude2 * a,
        }
    }
}

/// Relative variables of a two-body inertial state.
pub fn reduce(system: &System, s: &InertialState) -> Result<RelativeState> {
    let (b1, b2) = system.pair()?;
    let m = system.reduced_mass()?;
    let [s1, s2] = s.bodies.as_slice() else {
        return Err(Error::InvalidConfig(
            "reduction needs a two-body state".into(),
        ));
    };
    let r2t = s2.attitude.transpose();
    let r = r2t * s1.attitude;
    Ok(RelativeState {
        x: r2t * (s1.x - s2.x),
        attitude: r,
        momentum: r2t * (s1.momentum / b1.mass() - s2.momentum / b2.mass()) * m,
        angular_momentum: r * s1.angular_momentum,
        angular_momentum2: s2.angular_momentum,
        x2: s2.x,
        momentum2: s2.momentum,
        attitude2: s2.attitude,
    })
}

/// Inertial state recovered from relative variables.
pub fn reconstruct(system: &System, s: &RelativeState) -> Result<InertialState> {
    let (b1, b2) = system.pair()?;
    let m = system.reduced_mass()?;
    let v2 = s.momentum2 / b2.mass();
    let v1 = v2 + s.attitude2 * s.momentum / m;
    Ok(InertialState {
        bodies: vec![
            BodyState {
                x: s.x2 + s.attitude2 * s.x,
                attitude: s.attitude2 * s.attitude,
                momentum: v1 * b1.mass(),
                angular_momentum: s.attitude.transpose() * s.angular_momentum,
            },
            BodyState {
                x: s.x2,
                attitude: s.attitude2,
                momentum: s.momentum2,
                angular_momentum: s.angular_momentum2,
            },
        ],
    })
}
