//! Three-vector and 3×3 matrix algebra on SO(3) and its Lie algebra.
//!
//! [`hat`] maps a vector to the skew-symmetric matrix of its cross product,
//! [`vee`] inverts it, and [`rodrigues_exp`] is the closed-form exponential
//! used by every attitude update in the integrators.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Tolerance used by [`vee`] on the symmetric part of its input.
pub const SKEW_TOLERANCE: f64 = 1e-10;
/// Tolerance on ‖RᵀR − I‖_F accepted by [`Rotation::new`].
pub const ROTATION_TOLERANCE: f64 = 1e-12;
/// Relative symmetry tolerance for inertia matrices.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Below this rotation angle the Rodrigues coefficients use their Taylor series.
const SMALL_ANGLE: f64 = 1e-8;

/// Skew-symmetric matrix `S(v)` with `S(v) w = v × w`.
#[inline]
pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`hat`] on the skew part of `m`.
///
/// Fails with [`Error::NonSkewInput`] if the symmetric part of `m` exceeds
/// [`SKEW_TOLERANCE`] (relative to `max(1, ‖m‖_F)`).
pub fn vee(m: &Mat3) -> Result<Vec3> {
    let residual = (m + m.transpose()).norm();
    if residual > SKEW_TOLERANCE * m.norm().max(1.0) {
        return Err(Error::NonSkewInput { residual });
    }
    Ok(vee_unchecked(m))
}

/// Vector of the skew part of `m`, without checking symmetry.
#[inline]
pub fn vee_unchecked(m: &Mat3) -> Vec3 {
    Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// `sin(x)/x` and `(1 − cos x)/x²` for `x = ‖f‖ ≥ 0`.
#[inline]
pub(crate) fn rodrigues_coefficients(x: f64) -> (f64, f64) {
    if x < SMALL_ANGLE {
        let x2 = x * x;
        (1.0 - x2 / 6.0, 0.5 - x2 / 24.0)
    } else {
        let half = 0.5 * x;
        let s = half.sin() / half;
        (x.sin() / x, 0.5 * s * s)
    }
}

/// Rodrigues' formula: `exp(S(f)) = I + a S(f) + b S(f)²`.
pub fn rodrigues_exp(f: &Vec3) -> Rotation {
    let (a, b) = rodrigues_coefficients(f.norm());
    let s = hat(f);
    Rotation(Mat3::identity() + s * a + s * s * b)
}

/// ‖I − RᵀR‖ in the Frobenius norm.
#[inline]
pub fn orthogonality_error(r: &Mat3) -> f64 {
    (Mat3::identity() - r.transpose() * r).norm()
}

fn symmetry_residual(m: &Mat3) -> f64 {
    (m - m.transpose()).norm()
}

fn check_symmetric(m: &Mat3) -> Result<()> {
    let residual = symmetry_residual(m);
    if residual > SYMMETRY_TOLERANCE * m.norm().max(1.0) {
        Err(Error::NonSymmetricInput { residual })
    } else {
        Ok(())
    }
}

/// Standard inertia `J = tr(J_d) I − J_d` from the nonstandard `J_d = ∫ρρᵀ dm`.
pub fn std_from_nonstd(jd: &Mat3) -> Result<Mat3> {
    check_symmetric(jd)?;
    Ok(Mat3::identity() * jd.trace() - jd)
}

/// Nonstandard inertia `J_d = tr(J)/2 I − J`, the inverse of [`std_from_nonstd`].
pub fn nonstd_from_std(j: &Mat3) -> Result<Mat3> {
    check_symmetric(j)?;
    Ok(Mat3::identity() * (0.5 * j.trace()) - j)
}

/// A 3×3 matrix known to lie on SO(3).
///
/// Construction checks orthogonality at [`ROTATION_TOLERANCE`]; nothing ever
/// re-orthogonalizes a stored attitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn new(m: Mat3) -> Result<Self> {
        let orthogonality = orthogonality_error(&m);
        let det = m.determinant();
        if !(orthogonality <= ROTATION_TOLERANCE) || det <= 0.0 {
            return Err(Error::NotARotation { orthogonality, det });
        }
        Ok(Rotation(m))
    }

    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat3 {
        self.0
    }

    pub fn transpose(&self) -> Self {
        Rotation(self.0.transpose())
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &Rotation) -> Self {
        Rotation(self.0 * other.0)
    }
}

/// A nonstandard/standard inertia pair with `J = tr(J_d) I − J_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaPair {
    nonstandard: Mat3,
    standard: Mat3,
}

impl InertiaPair {
    pub fn from_nonstandard(jd: Mat3) -> Result<Self> {
        let j = std_from_nonstd(&jd)?;
        Ok(Self::symmetrized(jd, j))
    }

    pub fn from_standard(j: Mat3) -> Result<Self> {
        let jd = nonstd_from_std(&j)?;
        Ok(Self::symmetrized(jd, j))
    }

    fn symmetrized(jd: Mat3, j: Mat3) -> Self {
        InertiaPair {
            nonstandard: (jd + jd.transpose()) * 0.5,
            standard: (j + j.transpose()) * 0.5,
        }
    }

    /// `J_d`
    pub fn nonstandard(&self) -> &Mat3 {
        &self.nonstandard
    }

    /// `J`
    pub fn standard(&self) -> &Mat3 {
        &self.standard
    }
}
