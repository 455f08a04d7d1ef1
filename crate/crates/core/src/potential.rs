//! Mutual gravity of rigid bodies modeled as finite point-mass collections.
//!
//! Two conventions for the gravity-gradient moment coexist: the inertial
//! formulation works with the rows of `R_i` and `∂U/∂R_i`
//! ([`moment_inertial`]), the relative formulation with their columns
//! ([`moment_relative`]). Call sites pick one explicitly.

use crate::error::{Error, Result};
use crate::liegroup::{hat, vee_unchecked, InertiaPair, Mat3, Vec3};

/// Default minimum distance between any two point masses.
pub const DEFAULT_MIN_SEPARATION: f64 = 1e-9;

/// Pair counts above this use compensated summation.
const COMPENSATED_PAIRS: usize = 64;

/// One point mass of a body, as a fraction of the body's total mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass {
    /// Body-frame offset from the center of mass.
    pub offset: Vec3,
    pub fraction: f64,
}

/// A rigid body: total mass, point-mass layout and inertia.
///
/// The potential only sees the point masses. The inertia may be overridden so
/// that bodies built from spheres can carry the spheres' own rotational
/// inertia while still gravitating like point masses.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyModel {
    mass: f64,
    points: Vec<PointMass>,
    inertia: InertiaPair,
    inverse_standard: Option<Mat3>,
}

impl BodyModel {
    /// Builds a body whose inertia is derived from its point masses.
    pub fn from_points(mass: f64, points: Vec<PointMass>) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::NonPositiveMass(mass));
        }
        if points.is_empty() {
            return Err(Error::InvalidBody("body has no point masses".into()));
        }
        if points.iter().any(|p| {
            !p.fraction.is_finite() || p.fraction <= 0.0 || !p.offset.iter().all(|c| c.is_finite())
        }) {
            return Err(Error::InvalidBody(
                "point masses need finite offsets and positive fractions".into(),
            ));
        }
        let total: f64 = points.iter().map(|p| p.fraction).sum();
        if (total - 1.0).abs() > 1e-14 * points.len() as f64 {
            return Err(Error::InvalidBody(format!(
                "mass fractions sum to {total}, not 1"
            )));
        }
        let center: Vec3 = points.iter().map(|p| p.offset * p.fraction).sum();
        let extent = points.iter().map(|p| p.offset.norm()).fold(1.0, f64::max);
        if center.norm() > 1e-14 * extent {
            return Err(Error::InvalidBody(format!(
                "point masses are not centered on the body origin (offset {:.3e})",
                center.norm()
            )));
        }
        let jd = point_nonstandard_inertia(mass, &points);
        let inertia = InertiaPair::from_nonstandard(jd)?;
        Ok(BodyModel {
            mass,
            points,
            inverse_standard: inertia.standard().try_inverse(),
            inertia,
        })
    }

    /// A single point mass. Its derived inertia is zero.
    pub fn point(mass: f64) -> Result<Self> {
        Self::from_points(
            mass,
            vec![PointMass {
                offset: Vec3::zeros(),
                fraction: 1.0,
            }],
        )
    }

    /// Replaces the inertia with a user-supplied standard moment of inertia.
    pub fn with_standard_inertia(mut self, j: Mat3) -> Result<Self> {
        if !j.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidBody("inertia must be finite".into()));
        }
        self.inertia = InertiaPair::from_standard(j)?;
        self.inverse_standard = self.inertia.standard().try_inverse();
        Ok(self)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn points(&self) -> &[PointMass] {
        &self.points
    }

    pub fn inertia(&self) -> &InertiaPair {
        &self.inertia
    }

    /// `J_d` used by the integrators.
    pub fn nonstandard_inertia(&self) -> &Mat3 {
        self.inertia.nonstandard()
    }

    /// `J` used by the integrators.
    pub fn standard_inertia(&self) -> &Mat3 {
        self.inertia.standard()
    }

    /// `J⁻¹`, or [`Error::SingularInertia`] for degenerate bodies.
    pub fn inverse_inertia(&self) -> Result<&Mat3> {
        self.inverse_standard.as_ref().ok_or(Error::SingularInertia)
    }

    /// `Ω = J⁻¹Π`. A body with singular inertia may only carry `Π = 0`.
    pub fn angular_velocity(&self, pi: &Vec3) -> Result<Vec3> {
        match &self.inverse_standard {
            Some(inv) => Ok(inv * pi),
            None if *pi == Vec3::zeros() => Ok(Vec3::zeros()),
            None => Err(Error::SingularInertia),
        }
    }

    /// `J_d` implied by the point masses alone, `m Σ f ρρᵀ`.
    pub fn point_mass_inertia(&self) -> Mat3 {
        point_nonstandard_inertia(self.mass, &self.points)
    }
}

fn point_nonstandard_inertia(mass: f64, points: &[PointMass]) -> Mat3 {
    points
        .iter()
        .map(|p| p.offset * p.offset.transpose() * (mass * p.fraction))
        .sum()
}

/// Dumbbell: two equal halves at `±(length/2) e₁`. A zero length collapses to
/// a single point mass.
pub fn dumbbell_model(mass: f64, length: f64) -> Result<BodyModel> {
    if !(mass > 0.0) {
        return Err(Error::NonPositiveMass(mass));
    }
    if !(length >= 0.0) || !length.is_finite() {
        return Err(Error::InvalidBody(format!(
            "dumbbell length must be non-negative, got {length}"
        )));
    }
    if length == 0.0 {
        return BodyModel::point(mass);
    }
    let offset = Vec3::new(0.5 * length, 0.0, 0.0);
    BodyModel::from_points(
        mass,
        vec![
            PointMass {
                offset,
                fraction: 0.5,
            },
            PointMass {
                offset: -offset,
                fraction: 0.5,
            },
        ],
    )
}

/// Gravitational constant and contact gate shared by every evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gravity {
    pub constant: f64,
    pub min_separation: f64,
}

impl Gravity {
    pub fn new(constant: f64) -> Self {
        Gravity {
            constant,
            min_separation: DEFAULT_MIN_SEPARATION,
        }
    }

    /// Normalized units: `G (m̄₁ + m̄₂) = 1`.
    pub fn normalized(m1: f64, m2: f64) -> Self {
        Self::new(1.0 / (m1 + m2))
    }
}

/// Potential and first partials in relative coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialEval {
    pub u: f64,
    pub du_dx: Vec3,
    pub du_dr: Mat3,
}

/// Neumaier summation, switched off for small sums.
#[derive(Clone, Copy)]
struct Sum {
    total: f64,
    carry: f64,
}

impl Sum {
    const ZERO: Sum = Sum {
        total: 0.0,
        carry: 0.0,
    };

    #[inline]
    fn add(&mut self, x: f64, compensated: bool) {
        if !compensated {
            self.total += x;
            return;
        }
        let t = self.total + x;
        if self.total.abs() >= x.abs() {
            self.carry += (self.total - t) + x;
        } else {
            self.carry += (x - t) + self.total;
        }
        self.total = t;
    }

    fn value(&self) -> f64 {
        self.total + self.carry
    }
}

struct VecSum<const N: usize>([Sum; N]);

impl<const N: usize> VecSum<N> {
    fn new() -> Self {
        VecSum([Sum::ZERO; N])
    }

    fn add(&mut self, values: &[f64], compensated: bool) {
        for (s, v) in self.0.iter_mut().zip(values) {
            s.add(*v, compensated);
        }
    }

    fn values(&self) -> [f64; N] {
        std::array::from_fn(|i| self.0[i].value())
    }
}

/// `U(X, R)` for body 1 at relative position `x` and attitude `r` in the frame
/// of body 2, with `∂U/∂X` and `∂U/∂R` (entrywise partials).
pub fn eval_relative(
    b1: &BodyModel,
    b2: &BodyModel,
    gravity: &Gravity,
    x: &Vec3,
    r: &Mat3,
) -> Result<PotentialEval> {
    let compensated = b1.points.len() * b2.points.len() > COMPENSATED_PAIRS;
    let scale = gravity.constant * b1.mass * b2.mass;
    let mut u = Sum::ZERO;
    let mut dx = VecSum::<3>::new();
    let mut dr = VecSum::<9>::new();
    for p2 in &b2.points {
        for p1 in &b1.points {
            let rho1 = r * p1.offset;
            let d = x + rho1 - p2.offset;
            let dist = d.norm();
            if !(dist >= gravity.min_separation) {
                return Err(Error::BodiesOverlap { separation: dist });
            }
            let k = scale * p1.fraction * p2.fraction;
            let inv = 1.0 / dist;
            u.add(-k * inv, compensated);
            let g = d * (k * inv * inv * inv);
            dx.add(g.as_slice(), compensated);
            dr.add((g * p1.offset.transpose()).as_slice(), compensated);
        }
    }
    Ok(PotentialEval {
        u: u.value(),
        du_dx: Vec3::from(dx.values()),
        du_dr: Mat3::from_column_slice(&dr.values()),
    })
}

/// Potential and partials for `n` bodies in inertial coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct InertialPotential {
    pub u: f64,
    pub du_dx: Vec<Vec3>,
    pub du_dr: Vec<Mat3>,
}

/// `U = −½ Σ_{i≠j} Σ_{p,q} G mᵢ mⱼ fₚ f_q / ‖xᵢ + Rᵢρₚ − xⱼ − Rⱼρ_q‖`.
pub fn eval_inertial(
    bodies: &[BodyModel],
    gravity: &Gravity,
    xs: &[Vec3],
    rs: &[Mat3],
) -> Result<InertialPotential> {
    let n = bodies.len();
    if n != xs.len() || n != rs.len() {
        return Err(Error::InvalidConfig(format!(
            "{n} bodies but {} positions and {} attitudes",
            xs.len(),
            rs.len()
        )));
    }
    let world: Vec<Vec<Vec3>> = bodies
        .iter()
        .zip(rs)
        .map(|(b, r)| b.points.iter().map(|p| r * p.offset).collect())
        .collect();
    let total_pairs: usize = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| bodies[i].points.len() * bodies[j].points.len())
        .sum();
    let compensated = total_pairs > COMPENSATED_PAIRS;

    let mut u = Sum::ZERO;
    let mut dx: Vec<VecSum<3>> = (0..n).map(|_| VecSum::new()).collect();
    let mut dr: Vec<VecSum<9>> = (0..n).map(|_| VecSum::new()).collect();
    for i in 0..n {
        for j in i + 1..n {
            let scale = gravity.constant * bodies[i].mass * bodies[j].mass;
            for (pi, wi) in bodies[i].points.iter().zip(&world[i]) {
                for (pj, wj) in bodies[j].points.iter().zip(&world[j]) {
                    let d = xs[i] + wi - xs[j] - wj;
                    let dist = d.norm();
                    if !(dist >= gravity.min_separation) {
                        return Err(Error::BodiesOverlap { separation: dist });
                    }
                    let k = scale * pi.fraction * pj.fraction;
                    let inv = 1.0 / dist;
                    u.add(-k * inv, compensated);
                    let g = d * (k * inv * inv * inv);
                    dx[i].add(g.as_slice(), compensated);
                    dx[j].add((-g).as_slice(), compensated);
                    dr[i].add((g * pi.offset.transpose()).as_slice(), compensated);
                    dr[j].add((-g * pj.offset.transpose()).as_slice(), compensated);
                }
            }
        }
    }
    Ok(InertialPotential {
        u: u.value(),
        du_dx: dx.iter().map(|s| Vec3::from(s.values())).collect(),
        du_dr: dr
            .iter()
            .map(|s| Mat3::from_column_slice(&s.values()))
            .collect(),
    })
}

/// Gravity moment on a body in its own frame: `Σ_p r_p × u_p` over the rows
/// of `R` and `∂U/∂R`, equivalently `S(M) = (∂U/∂R)ᵀR − Rᵀ(∂U/∂R)`.
pub fn moment_inertial(r: &Mat3, du_dr: &Mat3) -> Vec3 {
    (0..3)
        .map(|p| {
            let row_r = r.row(p).transpose();
            let row_u = du_dr.row(p).transpose();
            row_r.cross(&row_u)
        })
        .sum()
}

/// Relative-coordinate moment: `Σ_p r_p × u_p` over the columns of `R` and
/// `∂U/∂R`, equivalently `S(M) = (∂U/∂R)Rᵀ − R(∂U/∂R)ᵀ`.
pub fn moment_relative(r: &Mat3, du_dr: &Mat3) -> Vec3 {
    (0..3).map(|p| r.column(p).cross(&du_dr.column(p))).sum()
}

/// Skew-difference form of [`moment_inertial`].
pub fn moment_inertial_skew(r: &Mat3, du_dr: &Mat3) -> Vec3 {
    vee_unchecked(&(du_dr.transpose() * r - r.transpose() * du_dr))
}

/// Skew-difference form of [`moment_relative`].
pub fn moment_relative_skew(r: &Mat3, du_dr: &Mat3) -> Vec3 {
    vee_unchecked(&(du_dr * r.transpose() - r * du_dr.transpose()))
}

/// `S(X × ∂U/∂X)`, the orbital part of the moment on body 2.
pub fn orbital_moment(x: &Vec3, du_dx: &Vec3) -> Mat3 {
    hat(&x.cross(du_dx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_pair() -> (BodyModel, BodyModel, Gravity) {
        let b1 = dumbbell_model(1.5, 0.0).unwrap();
        let b2 = dumbbell_model(3.0, 0.0).unwrap();
        (b1, b2, Gravity::normalized(1.5, 3.0))
    }

    #[test]
    fn dumbbell_inertia_from_point_masses() {
        // J_d = m Σ f ρρᵀ = 1.5 · (0.125)² on the rod axis
        let b = dumbbell_model(1.5, 0.25).unwrap();
        let jd = b.nonstandard_inertia();
        assert!((jd[(0, 0)] - 0.0234375).abs() < 1e-16);
        let j = b.standard_inertia();
        assert!((j - Mat3::from_diagonal(&Vec3::new(0.0, 0.0234375, 0.0234375))).norm() < 1e-16);
        let center: Vec3 = b.points().iter().map(|p| p.offset * p.fraction).sum();
        assert_eq!(center, Vec3::zeros());
    }

    #[test]
    fn zero_length_dumbbell_is_a_point() {
        let b = dumbbell_model(2.0, 0.0).unwrap();
        assert_eq!(b.points().len(), 1);
        assert_eq!(*b.nonstandard_inertia(), Mat3::zeros());
        assert_eq!(b.inverse_inertia().unwrap_err(), Error::SingularInertia);
    }

    #[test]
    fn rejects_bad_bodies() {
        assert_eq!(
            dumbbell_model(0.0, 1.0).unwrap_err(),
            Error::NonPositiveMass(0.0)
        );
        let off_center = vec![PointMass {
            offset: Vec3::x(),
            fraction: 1.0,
        }];
        assert!(matches!(
            BodyModel::from_points(1.0, off_center),
            Err(Error::InvalidBody(_))
        ));
        let bad_sum = vec![
            PointMass {
                offset: Vec3::x(),
                fraction: 0.5,
            },
            PointMass {
                offset: -Vec3::x(),
                fraction: 0.4,
            },
        ];
        assert!(matches!(
            BodyModel::from_points(1.0, bad_sum),
            Err(Error::InvalidBody(_))
        ));
    }

    #[test]
    fn unit_distance_points_give_minus_one() {
        let (b1, b2, g) = unit_pair();
        let e = eval_relative(&b1, &b2, &g, &Vec3::x(), &Mat3::identity()).unwrap();
        assert!((e.u + 1.0).abs() < 1e-15);
        assert_eq!(e.du_dr, Mat3::zeros());
    }

    #[test]
    fn overlap_is_rejected() {
        let (b1, b2, g) = unit_pair();
        let err = eval_relative(&b1, &b2, &g, &Vec3::zeros(), &Mat3::identity()).unwrap_err();
        assert!(matches!(err, Error::BodiesOverlap { .. }));
    }

    #[test]
    fn moments_vanish_without_gradient() {
        let r = Mat3::identity();
        assert_eq!(moment_inertial(&r, &Mat3::zeros()), Vec3::zeros());
        assert_eq!(moment_relative(&r, &Mat3::zeros()), Vec3::zeros());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = Sum::ZERO;
        s.add(1.0, true);
        for _ in 0..10 {
            s.add(1e-17, true);
        }
        s.add(-1.0, true);
        assert!((s.value() - 1e-16).abs() < 1e-30);
    }
}
