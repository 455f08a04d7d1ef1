#![allow(dead_code)]

use fullbody::config::SimConfig;
use fullbody::liegroup::{rodrigues_exp, Mat3, Vec3};
use fullbody::potential::{BodyModel, PointMass};
use fullbody::state::System;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vec3(rng: &mut impl Rng, scale: f64) -> Vec3 {
    Vec3::from_fn(|_, _| rng.random_range(-scale..scale))
}

pub fn mat3(rng: &mut impl Rng, scale: f64) -> Mat3 {
    Mat3::from_fn(|_, _| rng.random_range(-scale..scale))
}

/// Uniform-ish point in the ball of radius `r`.
pub fn ball(rng: &mut impl Rng, r: f64) -> Vec3 {
    loop {
        let v = vec3(rng, 1.0);
        if v.norm() <= 1.0 {
            return v * r;
        }
    }
}

pub fn rotation(rng: &mut impl Rng) -> Mat3 {
    rodrigues_exp(&ball(rng, std::f64::consts::PI)).into_matrix()
}

pub fn symmetric(rng: &mut impl Rng) -> Mat3 {
    let a = mat3(rng, 1.0);
    (a + a.transpose()) * 0.5
}

pub fn skew(rng: &mut impl Rng) -> Mat3 {
    let a = mat3(rng, 1.0);
    (a - a.transpose()) * 0.5
}

/// Positive definite nonstandard inertia `Q diag(a, b, c) Qᵀ`.
pub fn nonstandard_inertia(rng: &mut impl Rng) -> Mat3 {
    let q = rotation(rng);
    let d = Vec3::from_fn(|_, _| rng.random_range(0.1..1.0));
    q * Mat3::from_diagonal(&d) * q.transpose()
}

/// A rigid body of `n` point masses with random fractions, shifted so the
/// center of mass sits at the origin.
pub fn point_body(rng: &mut impl Rng, mass: f64, n: usize, size: f64) -> BodyModel {
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let offsets: Vec<Vec3> = (0..n).map(|_| vec3(rng, size)).collect();
    let center: Vec3 = offsets
        .iter()
        .zip(&weights)
        .map(|(o, w)| o * (w / total))
        .sum();
    let points = offsets
        .iter()
        .zip(&weights)
        .map(|(o, w)| PointMass {
            offset: o - center,
            fraction: w / total,
        })
        .collect();
    BodyModel::from_points(mass, points).expect("valid body")
}

pub fn flyby() -> (SimConfig, System) {
    let cfg = SimConfig::flyby_default();
    let system = cfg.system().expect("flyby system");
    (cfg, system)
}

/// `Σ_k Aᵏ/k!` for `k < terms`.
pub fn exp_series(a: &Mat3, terms: usize) -> Mat3 {
    let mut sum = Mat3::identity();
    let mut term = Mat3::identity();
    for k in 1..terms {
        term = term * a / k as f64;
        sum += term;
    }
    sum
}

/// Central difference of `f` along each of the `n` coordinates of `x`.
pub fn central_gradient<const N: usize>(
    x: [f64; N],
    step: f64,
    f: impl Fn(&[f64; N]) -> f64,
) -> [f64; N] {
    std::array::from_fn(|i| {
        let mut p = x;
        let mut m = x;
        p[i] += step;
        m[i] -= step;
        (f(&p) - f(&m)) / (2.0 * step)
    })
}

/// `‖a − b‖ / ‖b‖` over flattened components.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / norm.max(f64::MIN_POSITIVE)
}

/// A two-body inertial state with bodies 0.8 to 2 apart and body angular
/// velocities up to 10 per axis.
pub fn two_body_state(rng: &mut impl Rng, system: &System) -> fullbody::state::InertialState {
    use fullbody::state::{BodyState, InertialState};
    let x2 = vec3(rng, 1.0);
    let d = ball(rng, 1.0);
    let x1 = x2 + d.normalize() * (0.8 + 1.2 * d.norm());
    let mut body = |x: Vec3, model: &BodyModel| BodyState {
        x,
        attitude: rotation(rng),
        momentum: vec3(rng, 1.0),
        angular_momentum: model.standard_inertia() * vec3(rng, 10.0),
    };
    let b1 = body(x1, &system.bodies[0]);
    let b2 = body(x2, &system.bodies[1]);
    InertialState {
        bodies: vec![b1, b2],
    }
}
