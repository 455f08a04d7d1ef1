mod common;

use fullbody::dynamics::deriv_relative_hamiltonian;
use fullbody::lgvi::{
    compose, g_map, legendre_momenta_at_next, legendre_to_momenta, lyapunov_residual,
    relative_legendre_at_next, relative_legendre_to_momenta, solve_implicit_f,
    step_inertial_hamiltonian, step_inertial_lagrangian, step_relative_hamiltonian,
    step_relative_lagrangian, CompositionScheme, Configuration, InertialConfigPair,
    RelativeConfigPair, RelativeConfiguration, SolverConfig,
};
use fullbody::liegroup::{orthogonality_error, std_from_nonstd, Mat3, Vec3};
use fullbody::potential::{dumbbell_model, Gravity};
use fullbody::state::{reconstruct, BodyState, InertialState, RelativeState, System};
use fullbody::Error;
use proptest::prelude::*;

use common::{ball, flyby, nonstandard_inertia, rng};

const SOLVER: SolverConfig = SolverConfig {
    tolerance: 1e-15,
    max_iterations: 50,
};

fn configurations(s: &InertialState) -> Vec<Configuration> {
    s.bodies
        .iter()
        .map(|b| Configuration {
            x: b.x,
            attitude: b.attitude,
        })
        .collect()
}

fn max_state_gap(a: &InertialState, b: &InertialState) -> f64 {
    a.bodies
        .iter()
        .zip(&b.bodies)
        .map(|(p, q)| {
            (p.x - q.x)
                .norm()
                .max((p.attitude - q.attitude).norm())
                .max((p.momentum - q.momentum).norm())
                .max((p.angular_momentum - q.angular_momentum).norm())
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solver_recovers_the_rotation_vector(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let jd = nonstandard_inertia(&mut rng);
        let f_star = ball(&mut rng, 1.0);
        let g = g_map(&std_from_nonstd(&jd).unwrap(), &f_star);
        let sol = solve_implicit_f(&jd, &g, &SOLVER).unwrap();
        prop_assert!((sol.f - f_star).norm() < 1e-12);
        prop_assert!(lyapunov_residual(&jd, &g, sol.rotation.matrix()) < 1e-13 * g.norm().max(1.0));
        prop_assert!((sol.rotation.matrix() - fullbody::liegroup::rodrigues_exp(&sol.f).matrix()).norm() < 1e-13);
    }
}

#[test]
fn zero_momentum_needs_no_iteration() {
    let jd = Mat3::from_diagonal(&Vec3::new(0.5, 0.3, 0.2));
    let sol = solve_implicit_f(&jd, &Vec3::zeros(), &SOLVER).unwrap();
    assert_eq!(sol.iterations, 0);
    assert_eq!(*sol.rotation.matrix(), Mat3::identity());
}

#[test]
fn flyby_bodies_converge_in_a_few_iterations() {
    let (cfg, system) = flyby();
    let s = cfg.initial_inertial(&system).unwrap();
    for (model, b) in system.bodies.iter().zip(&s.bodies) {
        let g = b.angular_momentum * cfg.h;
        if g == Vec3::zeros() {
            continue;
        }
        let sol = solve_implicit_f(model.nonstandard_inertia(), &g, &SOLVER).unwrap();
        assert!(sol.iterations <= 5, "{}", sol.iterations);
    }
}

#[test]
fn solver_failures_are_reported() {
    let jd = Mat3::from_diagonal(&Vec3::new(0.5, 0.3, 0.2));
    let far = solve_implicit_f(&jd, &Vec3::new(10.0, 0.0, 0.0), &SOLVER).unwrap_err();
    assert!(matches!(far, Error::OutsideCaptureBasin { .. }));
    let tight = SolverConfig {
        tolerance: 1e-15,
        max_iterations: 1,
    };
    let err = solve_implicit_f(&jd, &Vec3::new(0.3, 0.4, -0.2), &tight).unwrap_err();
    assert!(matches!(err, Error::NoConvergence { iterations: 1, .. }));
    // a dumbbell without sphere inertia has J singular
    let rod = dumbbell_model(1.0, 1.0).unwrap();
    let err = solve_implicit_f(
        rod.nonstandard_inertia(),
        &Vec3::new(0.1, 0.0, 0.0),
        &SOLVER,
    )
    .unwrap_err();
    assert_eq!(err, Error::SingularInertia);
}

#[test]
fn invalid_steps_are_rejected() {
    let (cfg, system) = flyby();
    let s = cfg.initial_relative(&system).unwrap();
    for h in [0.0, f64::NAN, f64::INFINITY] {
        assert!(matches!(
            step_relative_hamiltonian(&system, &s, h, &SOLVER),
            Err(Error::InvalidStep(_))
        ));
    }
}

fn configuration_gap(a: &RelativeConfiguration, b: &RelativeConfiguration) -> f64 {
    (a.x - b.x)
        .norm()
        .max((a.attitude - b.attitude).norm())
        .max((a.x2 - b.x2).norm())
        .max((a.attitude2 - b.attitude2).norm())
}

#[test]
fn legendre_transform_round_trips() {
    let (cfg, system) = flyby();
    let h = cfg.h;
    let s = cfg.initial_inertial(&system).unwrap();
    let next = step_inertial_hamiltonian(&system, &s, h, &SOLVER)
        .unwrap()
        .state;
    let (q0, q1) = (configurations(&s), configurations(&next));
    // configurations → momenta → one Hamiltonian step reproduces q_{k+1}
    let momenta = legendre_to_momenta(&system, &q0, &q1, h).unwrap();
    let stepped = step_inertial_hamiltonian(&system, &momenta, h, &SOLVER)
        .unwrap()
        .state;
    for (a, b) in configurations(&stepped).iter().zip(&q1) {
        assert!((a.x - b.x).norm() < 1e-13 && (a.attitude - b.attitude).norm() < 1e-13);
    }
    // momenta recovered from configuration differences carry a 1/h rounding factor
    let tol = 1e-15 / h;
    assert!(max_state_gap(&momenta, &s) < tol);
    assert!(
        max_state_gap(
            &legendre_momenta_at_next(&system, &q0, &q1, h).unwrap(),
            &next
        ) < tol
    );

    let rs = cfg.initial_relative(&system).unwrap();
    let rnext = step_relative_hamiltonian(&system, &rs, h, &SOLVER)
        .unwrap()
        .state;
    let (c0, c1) = (
        RelativeConfiguration::from(&rs),
        RelativeConfiguration::from(&rnext),
    );
    let back = relative_legendre_to_momenta(&system, &c0, &c1, h).unwrap();
    let stepped = step_relative_hamiltonian(&system, &back, h, &SOLVER)
        .unwrap()
        .state;
    let g = configuration_gap(&RelativeConfiguration::from(&stepped), &c1);
    assert!(g < 1e-13, "{g:e}");
    let ahead = relative_legendre_at_next(&system, &c0, &c1, h).unwrap();
    let gap = |a: &RelativeState, b: &RelativeState| {
        max_state_gap(
            &reconstruct(&system, a).unwrap(),
            &reconstruct(&system, b).unwrap(),
        )
    };
    let (g0, g1) = (gap(&back, &rs), gap(&ahead, &rnext));
    assert!(g0 < tol && g1 < tol, "{g0:e} {g1:e}");
}

#[test]
fn legendre_transform_of_rest() {
    let (_, system) = flyby();
    let q = [
        Configuration {
            x: Vec3::new(1.0, 0.0, 0.0),
            attitude: Mat3::identity(),
        },
        Configuration {
            x: Vec3::new(-5.0, 0.0, 0.0),
            attitude: Mat3::identity(),
        },
    ];
    let free = System::new(vec![system.bodies[0].clone()], Gravity::new(1.0));
    let s = legendre_to_momenta(&free, &q[..1], &q[..1], 1e-3).unwrap();
    assert_eq!(s.bodies[0].momentum, Vec3::zeros());
    assert_eq!(s.bodies[0].angular_momentum, Vec3::zeros());
    let bad = vec![Configuration {
        x: Vec3::zeros(),
        attitude: Mat3::identity() * 1.1,
    }];
    assert!(legendre_to_momenta(&free, &q[..1], &bad, 1e-3).is_err());
}

#[test]
fn free_particle_drifts_uniformly() {
    let body = dumbbell_model(2.0, 0.5)
        .unwrap()
        .with_standard_inertia(Mat3::from_diagonal(&Vec3::new(0.1, 0.2, 0.25)))
        .unwrap();
    let system = System::new(vec![body], Gravity::new(1.0));
    let s0 = InertialState {
        bodies: vec![BodyState {
            x: Vec3::new(1.0, 2.0, 3.0),
            attitude: Mat3::identity(),
            momentum: Vec3::new(0.4, -0.2, 0.1),
            angular_momentum: Vec3::zeros(),
        }],
    };
    let h = 1e-2;
    let mut s = s0.clone();
    for k in 1..=100 {
        s = step_inertial_hamiltonian(&system, &s, h, &SOLVER)
            .unwrap()
            .state;
        let expected = s0.bodies[0].x + s0.bodies[0].momentum * (k as f64 * h / 2.0);
        assert!((s.bodies[0].x - expected).norm() < 1e-13);
        assert_eq!(s.bodies[0].attitude, Mat3::identity());
        assert_eq!(s.bodies[0].momentum, s0.bodies[0].momentum);
    }
    // the Lagrangian map follows x_{k+1} = 2x_k − x_{k−1}
    let mut pair = InertialConfigPair::from_momenta(&system, &s0, h, &SOLVER)
        .unwrap()
        .state;
    let mut previous = pair.current[0].x;
    for _ in 0..100 {
        pair = step_inertial_lagrangian(&system, &pair, h, &SOLVER)
            .unwrap()
            .state;
        let next = pair.next()[0].x;
        assert!((next - (2.0 * pair.current[0].x - previous)).norm() < 1e-13);
        previous = pair.current[0].x;
    }
}

#[test]
fn free_rigid_body_keeps_its_momentum_norm() {
    let j = Mat3::from_diagonal(&Vec3::new(1.0, 2.0, 3.0));
    let body = dumbbell_model(1.0, 1.0)
        .unwrap()
        .with_standard_inertia(j)
        .unwrap();
    let system = System::new(vec![body], Gravity::new(1.0));
    let mut s = InertialState {
        bodies: vec![BodyState {
            x: Vec3::zeros(),
            attitude: Mat3::identity(),
            momentum: Vec3::zeros(),
            angular_momentum: j * Vec3::new(0.2, 3.0, 0.1),
        }],
    };
    let n0 = s.bodies[0].angular_momentum.norm();
    for _ in 0..1000 {
        s = step_inertial_hamiltonian(&system, &s, 1e-2, &SOLVER)
            .unwrap()
            .state;
    }
    assert!((s.bodies[0].angular_momentum.norm() - n0).abs() < 1e-13 * n0);
}

#[test]
fn lagrangian_and_hamiltonian_inertial_maps_agree() {
    let (cfg, system) = flyby();
    let h = cfg.h;
    let mut s = cfg.initial_inertial(&system).unwrap();
    let mut pair = InertialConfigPair::from_momenta(&system, &s, h, &SOLVER)
        .unwrap()
        .state;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        s = step_inertial_hamiltonian(&system, &s, h, &SOLVER)
            .unwrap()
            .state;
        pair = step_inertial_lagrangian(&system, &pair, h, &SOLVER)
            .unwrap()
            .state;
        worst = worst.max(max_state_gap(&pair.momenta(&system, h).unwrap(), &s));
    }
    assert!(worst < 1e-10, "{worst:e}");
}

#[test]
fn lagrangian_and_hamiltonian_relative_maps_agree() {
    let (cfg, system) = flyby();
    let h = cfg.h;
    let mut s = cfg.initial_relative(&system).unwrap();
    let mut pair = RelativeConfigPair::from_momenta(&system, &s, h, &SOLVER)
        .unwrap()
        .state;
    let (mut worst, mut x2_gap) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        s = step_relative_hamiltonian(&system, &s, h, &SOLVER)
            .unwrap()
            .state;
        pair = step_relative_lagrangian(&system, &pair, h, &SOLVER)
            .unwrap()
            .state;
        let m = pair.momenta(&system, h).unwrap();
        worst = worst.max(max_state_gap(
            &reconstruct(&system, &m).unwrap(),
            &reconstruct(&system, &s).unwrap(),
        ));
        x2_gap = x2_gap.max((pair.current.x2 - s.x2).norm());
    }
    assert!(worst < 1e-10, "{worst:e}");
    assert!(x2_gap < 1e-10, "{x2_gap:e}");
}

#[test]
fn relative_map_is_the_reduced_inertial_map() {
    let (cfg, system) = flyby();
    let h = cfg.h;
    let mut inertial = cfg.initial_inertial(&system).unwrap();
    let mut relative = cfg.initial_relative(&system).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..2000 {
        inertial = step_inertial_hamiltonian(&system, &inertial, h, &SOLVER)
            .unwrap()
            .state;
        relative = step_relative_hamiltonian(&system, &relative, h, &SOLVER)
            .unwrap()
            .state;
        worst = worst.max(max_state_gap(
            &reconstruct(&system, &relative).unwrap(),
            &inertial,
        ));
    }
    assert!(worst < 1e-10, "{worst:e}");
}

#[test]
fn spherical_bodies_reduce_to_discrete_kepler() {
    let point = |m| {
        dumbbell_model(m, 0.0)
            .unwrap()
            .with_standard_inertia(Mat3::identity() * 0.1)
            .unwrap()
    };
    let system = System::two_body(point(1.5), point(3.0), Gravity::normalized(1.5, 3.0));
    let mut inertial = InertialState {
        bodies: vec![
            BodyState {
                x: Vec3::new(1.0, 0.0, 0.0),
                attitude: Mat3::identity(),
                momentum: Vec3::new(0.0, 1.2, 0.1),
                angular_momentum: Vec3::new(0.0, 0.0, 0.05),
            },
            BodyState {
                x: Vec3::zeros(),
                attitude: Mat3::identity(),
                momentum: Vec3::new(0.0, -1.2, -0.1),
                angular_momentum: Vec3::zeros(),
            },
        ],
    };
    let mut relative = fullbody::state::reduce(&system, &inertial).unwrap();
    let n0 = relative.angular_momentum.norm();
    for _ in 0..2000 {
        inertial = step_inertial_hamiltonian(&system, &inertial, 1e-3, &SOLVER)
            .unwrap()
            .state;
        relative = step_relative_hamiltonian(&system, &relative, 1e-3, &SOLVER)
            .unwrap()
            .state;
    }
    assert!((relative.angular_momentum.norm() - n0).abs() < 1e-15);
    let x = inertial.bodies[0].x - inertial.bodies[1].x;
    assert!((relative.attitude2 * relative.x - x).norm() < 1e-12);
}

#[test]
fn one_step_is_consistent_with_the_vector_field() {
    let (cfg, system) = flyby();
    let s = cfg.initial_relative(&system).unwrap();
    let d = deriv_relative_hamiltonian(&system, &s).unwrap();
    // central difference of the map (forward and backward step) against the field
    let err = |h: f64| {
        let fwd = step_relative_hamiltonian(&system, &s, h, &SOLVER)
            .unwrap()
            .state;
        let bwd = step_relative_hamiltonian(&system, &s, -h, &SOLVER)
            .unwrap()
            .state;
        ((fwd.momentum - bwd.momentum) / (2.0 * h) - d.momentum).norm()
            + ((fwd.angular_momentum - bwd.angular_momentum) / (2.0 * h) - d.angular_momentum)
                .norm()
            + ((fwd.x - bwd.x) / (2.0 * h) - d.x).norm()
    };
    let ratio = err(2e-3) / err(1e-3);
    assert!((ratio.log2() - 2.0).abs() < 0.2, "{ratio}");
}

#[test]
fn orthogonality_error_grows_at_most_linearly() {
    let (cfg, system) = flyby();
    let mut s = cfg.initial_relative(&system).unwrap();
    for n in 1..=5000 {
        s = step_relative_hamiltonian(&system, &s, cfg.h, &SOLVER)
            .unwrap()
            .state;
        let e = orthogonality_error(&s.attitude).max(orthogonality_error(&s.attitude2));
        assert!(e <= n as f64 * 5e-16 + 1e-14, "step {n}: {e:e}");
    }
}

#[test]
fn single_weight_composition_is_the_base_step() {
    let (cfg, system) = flyby();
    let s = cfg.initial_relative(&system).unwrap();
    let base = step_relative_hamiltonian(&system, &s, cfg.h, &SOLVER).unwrap();
    let composed = compose(&CompositionScheme::single(), &s, cfg.h, |s, h| {
        step_relative_hamiltonian(&system, s, h, &SOLVER)
    })
    .unwrap();
    assert_eq!(composed, base);
    let w = CompositionScheme::yoshida4();
    let c = 1.0 / (2.0 - 2f64.cbrt());
    let expected = [c, -2f64.cbrt() * c, c];
    assert!(w
        .weights()
        .iter()
        .zip(expected)
        .all(|(a, b)| (a - b).abs() < 1e-15));
    assert!(w.weights()[1] < 0.0);
}

#[test]
fn composition_is_fourth_order_on_the_flyby_system() {
    let (cfg, system) = flyby();
    let horizon = 0.5;
    let run = |h: f64| {
        let mut s = cfg.initial_relative(&system).unwrap();
        for _ in 0..(horizon / h).round() as usize {
            s = compose(&CompositionScheme::yoshida4(), &s, h, |s, h| {
                step_relative_hamiltonian(&system, s, h, &SOLVER)
            })
            .unwrap()
            .state;
        }
        s
    };
    let reference = run(1.25e-3);
    let err = |h| (run(h).x - reference.x).norm();
    let slope = (err(1e-2) / err(5e-3)).log2();
    assert!((slope - 4.0).abs() < 0.3, "{slope}");
}
