#![allow(dead_code)]

use conic_center::{
    ellipse_to_conic, random_homography, transform_conic, transform_point, ConicMatrix, EllipseGeom, Homography,
};
use nalgebra::Point2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Concentric circles and their image under a random homography.
pub struct ConcentricCase {
    pub center: Point2<f64>,
    pub r: f64,
    pub big_r: f64,
    pub h: Homography,
    /// Inner and outer circle conics before the homography.
    pub circles: (ConicMatrix, ConicMatrix),
    /// Inner and outer conics after the homography.
    pub q1: ConicMatrix,
    pub q2: ConicMatrix,
    pub true_center: Point2<f64>,
}

impl ConcentricCase {
    pub fn ratio(&self) -> f64 {
        self.big_r / self.r
    }
}

/// Center in `[−10, 10]²`, `r ∈ [0.1, 5]`, `R/r ∈ (1, 10]`, homography with
/// condition number at most `max_condition`.
pub fn concentric_case(seed: u64, max_condition: f64) -> ConcentricCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = Point2::new(rng.random_range(-10.0..=10.0), rng.random_range(-10.0..=10.0));
    let r = rng.random_range(0.1..=5.0);
    // (1, 10]: reject the open end.
    let k = loop {
        let k: f64 = rng.random_range(1.0..=10.0);
        if k > 1.0 {
            break k;
        }
    };
    let big_r = r * k;
    let h = random_homography(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xA5A5, max_condition);
    let c1 = ellipse_to_conic(&EllipseGeom::circle(center.x, center.y, r).unwrap());
    let c2 = ellipse_to_conic(&EllipseGeom::circle(center.x, center.y, big_r).unwrap());
    let q1 = transform_conic(&c1, &h).unwrap();
    let q2 = transform_conic(&c2, &h).unwrap();
    let true_center = transform_point(&center, &h).unwrap();
    ConcentricCase {
        center,
        r,
        big_r,
        h,
        circles: (c1, c2),
        q1,
        q2,
        true_center,
    }
}

/// Image-scale ellipse: center in a 640 × 480 window around the origin,
/// `a ∈ [5, 200]`, `b/a ∈ [0.2, 0.95]`.
///
/// Storing `F ≈ cᵀMc − a²b²` rounds away `ε·|c|²/b²` of the axes, so thin
/// ellipses far from the origin cannot round-trip to 1e−9 in any
/// implementation; this domain keeps `|c|/b ≤ 400`.
pub fn random_ellipse(rng: &mut impl Rng) -> EllipseGeom {
    let a = rng.random_range(5.0..=200.0);
    let b = a * rng.random_range(0.2..=0.95);
    let theta = rng.random_range(0.0..std::f64::consts::PI);
    EllipseGeom::new(rng.random_range(-320.0..=320.0), rng.random_range(-240.0..=240.0), a, b, theta).unwrap()
}

/// Largest parameter error of `got` against `want`: center and axes relative
/// to the ellipse size, theta as an angle modulo π.
pub fn ellipse_rel_error(got: &EllipseGeom, want: &EllipseGeom) -> f64 {
    let size = want.a();
    let center = (got.center() - want.center()).norm() / size.max(want.center().coords.norm());
    let axes = ((got.a() - want.a()) / want.a()).abs().max(((got.b() - want.b()) / want.b()).abs());
    let dtheta = (got.theta() - want.theta()).rem_euclid(std::f64::consts::PI);
    let theta = dtheta.min(std::f64::consts::PI - dtheta);
    center.max(axes).max(theta)
}
