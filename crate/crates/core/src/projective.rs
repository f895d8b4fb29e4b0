//! Plane homographies acting on points and conics.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Point2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conic::{normalize_conic, ConicMatrix};
use crate::error::{Error, Result};

/// Largest condition number accepted by [`transform_conic`].
pub const MAX_TRANSFORM_CONDITION: f64 = 1e12;

/// Radius of the region that [`random_homography`] keeps away from the
/// line at infinity.
pub const DEFAULT_TEST_REGION_RADIUS: f64 = 64.0;

/// Invertible 3×3 matrix acting on homogeneous plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography(Matrix3<f64>);

impl Homography {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = m.norm();
        if scale == 0.0 || (m / scale).determinant() == 0.0 {
            return Err(Error::NearSingularTransform {
                condition: f64::INFINITY,
            });
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Self(Matrix3::new(1.0, 0.0, tx, 0.0, 1.0, ty, 0.0, 0.0, 1.0))
    }

    pub fn scaling(sx: f64, sy: f64) -> Result<Self> {
        Self::new(Matrix3::from_diagonal(&Vector3::new(sx, sy, 1.0)))
    }

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Result<Self> {
        self.0
            .try_inverse()
            .ok_or(Error::NearSingularTransform {
                condition: f64::INFINITY,
            })
            .and_then(Self::new)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Homography) -> Self {
        Self(self.0 * first.0)
    }

    /// Ratio of largest to smallest singular value.
    pub fn condition_number(&self) -> f64 {
        condition_number(&self.0)
    }
}

pub(crate) fn condition_number(m: &Matrix3<f64>) -> f64 {
    let sv = m.singular_values();
    let (max, min) = (sv.max(), sv.min());
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Image of a conic under `h`: `normalize(L⁻ᵀ Q L⁻¹)`.
pub fn transform_conic(q: &ConicMatrix, h: &Homography) -> Result<ConicMatrix> {
    let condition = h.condition_number();
    if !(condition <= MAX_TRANSFORM_CONDITION) {
        return Err(Error::NearSingularTransform { condition });
    }
    let inv = h
        .0
        .try_inverse()
        .ok_or(Error::NearSingularTransform { condition })?;
    let m = inv.transpose() * q.matrix() * inv;
    Ok(normalize_conic(&ConicMatrix::new(m)?))
}

/// Image `(x/w, y/w)` of a point under `h`.
pub fn transform_point(p: &Point2<f64>, h: &Homography) -> Result<Point2<f64>> {
    let v = h.0 * p.to_homogeneous();
    let norm = v.norm();
    if !(v[2].abs() > 1e-12 * norm) {
        return Err(Error::PointAtInfinity);
    }
    Ok(Point2::new(v[0] / v[2], v[1] / v[2]))
}

/// Deterministic pseudo-random homography with condition number at most
/// `max_condition`, safe on the disc of radius
/// [`DEFAULT_TEST_REGION_RADIUS`] around the origin.
pub fn random_homography(seed: u64, max_condition: f64) -> Homography {
    random_homography_in_region(seed, max_condition, DEFAULT_TEST_REGION_RADIUS)
}

/// Like [`random_homography`] with an explicit test-region radius.
///
/// The matrix is `rotation · anisotropic scale · rotation · translation ·
/// perspective`, where the perspective row is bounded by
/// `0.2 / region_radius` so that `w ∈ [0.7, 1.3]` on the region. If the
/// sampled matrix exceeds `max_condition`, the non-rigid parts are shrunk
/// toward the identity until it fits. `max_condition <= 1` yields a pure
/// rotation, possibly combined with a reflection.
pub fn random_homography_in_region(seed: u64, max_condition: f64, region_radius: f64) -> Homography {
    debug_assert!(max_condition >= 1.0, "max_condition must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let rot_a = rng.random_range(-PI..PI);
    let reflect = rng.random_bool(0.5);
    let mirror = Matrix3::from_diagonal(&Vector3::new(1.0, if reflect { -1.0 } else { 1.0 }, 1.0));
    let rigid = *Homography::rotation(rot_a).matrix() * mirror;
    if max_condition <= 1.0 {
        return Homography(rigid);
    }

    let rot_b = rng.random_range(-PI..PI);
    let log_scale: f64 = rng.random_range(-0.7..0.7);
    let log_aniso: f64 = rng.random_range(0.0..1.2);
    let shift = Vector3::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), 0.0);
    let g_max = 0.2 / region_radius;
    let persp = (rng.random_range(-g_max..g_max), rng.random_range(-g_max..g_max));

    let mut t = 1.0;
    loop {
        let s = (t * log_scale).exp();
        let k = (t * log_aniso).exp();
        let scale = Matrix3::from_diagonal(&Vector3::new(s * k, s / k, 1.0));
        let translate = *Homography::translation(t * shift.x, t * shift.y).matrix();
        #[rustfmt::skip]
        let perspective = Matrix3::new(
            1.0,          0.0,          0.0,
            0.0,          1.0,          0.0,
            t * persp.0,  t * persp.1,  1.0,
        );
        let m = rigid * scale * *Homography::rotation(rot_b).matrix() * translate * perspective;
        if condition_number(&m) <= max_condition || t < 1e-6 {
            if t < 1e-6 {
                return Homography(rigid);
            }
            return Homography(m);
        }
        t *= 0.5;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::{ellipse_to_conic, EllipseGeom};

    fn unit_circle() -> ConicMatrix {
        ConicMatrix::from_diagonal(1.0, 1.0, -1.0).unwrap()
    }

    #[test]
    fn identity_keeps_conic() {
        let q = transform_conic(&unit_circle(), &Homography::identity()).unwrap();
        assert!((q.matrix() - normalize_conic(&unit_circle()).matrix()).amax() < 1e-15);
    }

    #[test]
    fn translated_unit_circle() {
        let q = transform_conic(&unit_circle(), &Homography::translation(3.0, -2.0)).unwrap();
        let expected = ellipse_to_conic(&EllipseGeom::circle(3.0, -2.0, 1.0).unwrap());
        assert!((q.matrix() - normalize_conic(&expected).matrix()).amax() < 1e-14);
        // Compare raw coefficients after fixing A = 1.
        let c = q.coefficients();
        let want = [1.0, 0.0, 1.0, -6.0, 4.0, 12.0];
        for (g, w) in c.iter().zip(want) {
            assert!((g / c[0] - w).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_scaling_doubles_radius() {
        let h = Homography::scaling(2.0, 2.0).unwrap();
        let q = transform_conic(&unit_circle(), &h).unwrap();
        let r2 = normalize_conic(&ConicMatrix::from_diagonal(1.0, 1.0, -4.0).unwrap());
        assert!((q.matrix() - r2.matrix()).amax() < 1e-15);
    }

    #[test]
    fn transform_point_examples() {
        let p = Point2::new(1.0, 2.0);
        assert_eq!(transform_point(&p, &Homography::identity()).unwrap(), p);
        let t = Homography::translation(3.0, -2.0);
        assert_eq!(transform_point(&Point2::origin(), &t).unwrap(), Point2::new(3.0, -2.0));
        let h = Homography::new(Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0)).unwrap();
        assert_eq!(transform_point(&Point2::new(1.0, 0.0), &h).unwrap(), Point2::new(0.5, 0.0));
    }

    #[test]
    fn point_on_horizon_is_rejected() {
        let h = Homography::new(Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0)).unwrap();
        assert_eq!(transform_point(&Point2::new(-1.0, 5.0), &h), Err(Error::PointAtInfinity));
    }

    #[test]
    fn ill_conditioned_transform_is_rejected() {
        let h = Homography::scaling(1e-7, 1e7).unwrap();
        assert!(matches!(
            transform_conic(&unit_circle(), &h),
            Err(Error::NearSingularTransform { .. })
        ));
        assert!(Homography::new(Matrix3::zeros()).is_err());
    }

    #[test]
    fn random_homography_is_deterministic_and_bounded() {
        assert_eq!(random_homography(42, 1e3), random_homography(42, 1e3));
        for seed in 0..200 {
            let h = random_homography(seed, 1e3);
            assert!(h.condition_number() <= 1e3);
            assert!(h.matrix().determinant() != 0.0);
        }
    }

    #[test]
    fn unit_condition_gives_rigid_motion() {
        let h = random_homography(7, 1.0);
        let sv = h.matrix().singular_values();
        assert!((sv.max() - sv.min()).abs() < 1e-12, "{sv:?}");
        assert!((h.condition_number() - 1.0).abs() < 1e-12);
    }
}
