mod common;

use fullbody::liegroup::{
    hat, nonstd_from_std, orthogonality_error, rodrigues_exp, std_from_nonstd, vee, Mat3, Rotation,
    Vec3,
};
use fullbody::Error;
use proptest::prelude::*;

use common::exp_series;

fn v3(range: f64) -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-range..range).prop_map(Vec3::from)
}

fn m3(range: f64) -> impl Strategy<Value = Mat3> {
    prop::array::uniform9(-range..range).prop_map(|a| Mat3::from_row_slice(&a))
}

fn rotation() -> impl Strategy<Value = Mat3> {
    v3(2.0).prop_map(|f| rodrigues_exp(&f).into_matrix())
}

fn symmetric() -> impl Strategy<Value = Mat3> {
    m3(1.0).prop_map(|a| (a + a.transpose()) * 0.5)
}

proptest! {
    #[test]
    fn hat_is_the_cross_product(x in v3(10.0), y in v3(10.0)) {
        let direct = Vec3::new(
            x[1] * y[2] - x[2] * y[1],
            x[2] * y[0] - x[0] * y[2],
            x[0] * y[1] - x[1] * y[0],
        );
        prop_assert_eq!(hat(&x) * y, direct);
        prop_assert_eq!(hat(&x).transpose(), -hat(&x));
    }

    #[test]
    fn vee_inverts_hat(x in v3(10.0)) {
        prop_assert_eq!(vee(&hat(&x)).unwrap(), x);
    }

    #[test]
    fn hat_of_cross_is_a_commutator(x in v3(1.0), y in v3(1.0)) {
        let lhs = hat(&x.cross(&y));
        prop_assert!((lhs - (hat(&x) * hat(&y) - hat(&y) * hat(&x))).norm() < 1e-13);
        prop_assert!((lhs - (y * x.transpose() - x * y.transpose())).norm() < 1e-13);
    }

    #[test]
    fn hat_is_equivariant(x in v3(1.0), r in rotation()) {
        prop_assert!((hat(&(r * x)) - r * hat(&x) * r.transpose()).norm() < 1e-13);
    }

    #[test]
    fn hat_gram_matrix(x in v3(1.0)) {
        let expected = Mat3::identity() * x.dot(&x) - x * x.transpose();
        prop_assert!((hat(&x).transpose() * hat(&x) - expected).norm() < 1e-13);
    }

    #[test]
    fn trace_identities(a in m3(1.0), b in m3(1.0), q in symmetric(), x in v3(1.0)) {
        let t = (a * b).trace();
        prop_assert!((t - (b * a).trace()).abs() < 1e-13);
        prop_assert!((t - (b.transpose() * a.transpose()).trace()).abs() < 1e-13);
        prop_assert!((t - (a.transpose() * b.transpose()).trace()).abs() < 1e-13);
        prop_assert!(((a.transpose() * b).trace() - a.component_mul(&b).sum()).abs() < 1e-13);
        prop_assert!((hat(&x) * q).trace().abs() < 1e-13);
    }

    #[test]
    fn inertia_identity(jd in symmetric(), w in v3(1.0)) {
        let j = std_from_nonstd(&jd).unwrap();
        prop_assert!((hat(&(j * w)) - (hat(&w) * jd + jd * hat(&w))).norm() < 1e-13);
        prop_assert!((std_from_nonstd(&nonstd_from_std(&j).unwrap()).unwrap() - j).norm() < 1e-14);
    }

    #[test]
    fn rodrigues_matches_the_series(f in v3(0.6)) {
        let r = rodrigues_exp(&f);
        prop_assert!((r.matrix() - exp_series(&hat(&f), 20)).norm() < 1e-13);
    }

    #[test]
    fn rodrigues_matches_the_series_at_large_angles(f in v3(1.8)) {
        let r = rodrigues_exp(&f);
        prop_assert!((r.matrix() - exp_series(&hat(&f), 40)).norm() < 1e-13);
    }

    #[test]
    fn rodrigues_stays_on_the_group(f in v3(3.0)) {
        let r = rodrigues_exp(&f);
        prop_assert!(orthogonality_error(r.matrix()) < 1e-14);
        prop_assert!((r.matrix().determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tiny_rotation_vectors_are_smooth(f in v3(1e-8)) {
        let r = rodrigues_exp(&f);
        let first_order = Mat3::identity() + hat(&f);
        prop_assert!((r.matrix() - first_order).norm() < 1e-15);
    }
}

#[test]
fn quarter_turn_about_e3() {
    let r = rodrigues_exp(&Vec3::new(0.0, 0.0, std::f64::consts::FRAC_PI_2));
    assert!((r.matrix() * Vec3::x() - Vec3::y()).norm() < 1e-15);
    assert_eq!(*rodrigues_exp(&Vec3::zeros()).matrix(), Mat3::identity());
}

#[test]
fn inertia_conversions() {
    assert_eq!(
        std_from_nonstd(&Mat3::identity()).unwrap(),
        Mat3::identity() * 2.0
    );
    assert_eq!(
        nonstd_from_std(&(Mat3::identity() * 2.0)).unwrap(),
        Mat3::identity()
    );
    let jd = std_from_nonstd(&Mat3::from_diagonal(&Vec3::new(1.0, 2.0, 4.0))).unwrap();
    assert_eq!(jd, Mat3::from_diagonal(&Vec3::new(6.0, 5.0, 3.0)));
    let body2 = nonstd_from_std(&Mat3::from_diagonal(&Vec3::new(0.0030, 0.1905, 0.1905))).unwrap();
    // tr(J)/2 = 0.192
    let expected = Mat3::from_diagonal(&Vec3::new(0.1890, 0.0015, 0.0015));
    assert!((body2 - expected).norm() < 1e-15);
}

#[test]
fn asymmetric_inertia_is_rejected() {
    let mut j = Mat3::identity();
    j[(0, 1)] = 0.1;
    assert!(matches!(
        std_from_nonstd(&j),
        Err(Error::NonSymmetricInput { .. })
    ));
    assert!(matches!(
        nonstd_from_std(&j),
        Err(Error::NonSymmetricInput { .. })
    ));
}

#[test]
fn orthogonality_error_of_a_scaling() {
    assert_eq!(orthogonality_error(&Mat3::identity()), 0.0);
    let e = orthogonality_error(&(Mat3::identity() * 1.01));
    assert!((e - 0.0201 * 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn rotation_gate() {
    assert!(Rotation::new(Mat3::identity() * 1.01).is_err());
    assert!(Rotation::new(-Mat3::identity()).is_err());
    assert!(vee(&Mat3::identity()).is_err());
    assert_eq!(vee(&Mat3::zeros()).unwrap(), Vec3::zeros());
}
