//! Ellipses and their homogeneous conic matrices.
//!
//! A conic `Ax² + Bxy + Cy² + Dx + Ey + F = 0` is stored as the symmetric
//! matrix
//!
//! ```text
//!     | A    B/2  D/2 |
//! Q = | B/2  C    E/2 |
//!     | D/2  E/2  F   |
//! ```
//!
//! so that a point `(x, y)` lies on the conic iff `[x y 1] Q [x y 1]ᵀ = 0`.
//! Ellipses built by [`ellipse_to_conic`] are negative in their interior.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Point2, Vector3};

use crate::error::{Error, Result};

/// Default threshold on `|det Q|` of a normalized conic below which it is
/// treated as degenerate.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;

// Entries of a unit-norm matrix below this magnitude do not decide its sign.
const SIGN_EPS: f64 = 1e-12;

/// Geometric ellipse: center, semiaxes and rotation of the major axis.
///
/// Invariants: `a >= b > 0` and `theta ∈ [0, π)`. Circles always carry
/// `theta = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseGeom {
    cx: f64,
    cy: f64,
    a: f64,
    b: f64,
    theta: f64,
}

impl EllipseGeom {
    /// Builds an ellipse, swapping the axes (and turning `theta` by π/2)
    /// when `b > a` and reducing `theta` modulo π.
    pub fn new(cx: f64, cy: f64, a: f64, b: f64, theta: f64) -> Result<Self> {
        if ![cx, cy, a, b, theta].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidEllipse("non-finite parameter".into()));
        }
        if a <= 0.0 || b <= 0.0 {
            return Err(Error::InvalidEllipse(format!(
                "semiaxes must be positive (a = {a}, b = {b})"
            )));
        }
        let (a, b, theta) = if b > a {
            (b, a, theta + 0.5 * PI)
        } else {
            (a, b, theta)
        };
        let theta = if a == b { 0.0 } else { wrap_half_turn(theta) };
        Ok(Self {
            cx,
            cy,
            a,
            b,
            theta,
        })
    }

    pub fn circle(cx: f64, cy: f64, r: f64) -> Result<Self> {
        Self::new(cx, cy, r, r, 0.0)
    }

    pub fn cx(&self) -> f64 {
        self.cx
    }

    pub fn cy(&self) -> f64 {
        self.cy
    }

    /// Major semiaxis.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Minor semiaxis.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Rotation of the major axis from the x-axis, in `[0, π)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn center(&self) -> Point2<f64> {
        Point2::new(self.cx, self.cy)
    }

    pub fn area(&self) -> f64 {
        PI * self.a * self.b
    }

    /// Point at parameter angle `t` of the standard parametrization.
    pub fn point_at(&self, t: f64) -> Point2<f64> {
        let (st, ct) = t.sin_cos();
        let (sr, cr) = self.theta.sin_cos();
        Point2::new(
            self.cx + self.a * ct * cr - self.b * st * sr,
            self.cy + self.a * ct * sr + self.b * st * cr,
        )
    }

    /// Half extents `(w, h)` of the axis-aligned bounding box.
    pub fn half_extents(&self) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        let (a2, b2) = (self.a * self.a, self.b * self.b);
        ((a2 * c * c + b2 * s * s).sqrt(), (a2 * s * s + b2 * c * c).sqrt())
    }
}

fn wrap_half_turn(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t >= PI {
        0.0
    } else {
        t
    }
}

/// 3×3 symmetric homogeneous matrix of a conic, defined up to nonzero scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicMatrix(Matrix3<f64>);

impl ConicMatrix {
    /// Wraps `m`, replacing it by its symmetric part.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let sym = (m + m.transpose()) * 0.5;
        if sym.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroMatrix);
        }
        Ok(Self(sym))
    }

    /// Builds the matrix of `Ax² + Bxy + Cy² + Dx + Ey + F = 0`.
    pub fn from_coefficients(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Result<Self> {
        #[rustfmt::skip]
        let m = Matrix3::new(
            a,       b / 2.0, d / 2.0,
            b / 2.0, c,       e / 2.0,
            d / 2.0, e / 2.0, f,
        );
        Self::new(m)
    }

    pub fn from_diagonal(d0: f64, d1: f64, d2: f64) -> Result<Self> {
        Self::new(Matrix3::from_diagonal(&Vector3::new(d0, d1, d2)))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// Coefficients `[A, B, C, D, E, F]`.
    pub fn coefficients(&self) -> [f64; 6] {
        let m = &self.0;
        [
            m[(0, 0)],
            2.0 * m[(0, 1)],
            m[(1, 1)],
            2.0 * m[(0, 2)],
            2.0 * m[(1, 2)],
            m[(2, 2)],
        ]
    }

    /// Quadratic form `ṽᵀ Q ṽ` at `ṽ = (x, y, 1)`.
    pub fn eval(&self, p: &Point2<f64>) -> f64 {
        let v = p.to_homogeneous();
        v.dot(&(self.0 * v))
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// Same conic with the matrix multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(self.0 * alpha)
    }

    pub fn normalized(&self) -> Self {
        normalize_conic(self)
    }
}

/// Conic matrix of `e` from its geometric parameters.
pub fn ellipse_to_conic(e: &EllipseGeom) -> ConicMatrix {
    let (s, c) = e.theta.sin_cos();
    let (a2, b2) = (e.a * e.a, e.b * e.b);
    let (cx, cy) = (e.cx, e.cy);

    let ca = a2 * s * s + b2 * c * c;
    let cb = 2.0 * (b2 - a2) * c * s;
    let cc = a2 * c * c + b2 * s * s;
    let cd = -2.0 * ca * cx - cb * cy;
    let ce = -cb * cx - 2.0 * cc * cy;
    let cf = ca * cx * cx + cb * cx * cy + cc * cy * cy - a2 * b2;

    ConicMatrix::from_coefficients(ca, cb, cc, cd, ce, cf)
        .expect("a valid ellipse has a nonzero conic matrix")
}

/// Geometric parameters of a conic that is a real, non-degenerate ellipse.
///
/// Translates to the centroid (from the gradient's 2×2 system), then
/// diagonalizes the quadratic block for the axes and rotation.
pub fn conic_to_ellipse(q: &ConicMatrix) -> Result<EllipseGeom> {
    let m = *normalize_conic(q).matrix();
    let (qa, qb, qc) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let (qd, qe, qf) = (m[(0, 2)], m[(1, 2)], m[(2, 2)]);

    let det2 = qa * qc - qb * qb;
    if det2 <= 0.0 || qa + qc <= 0.0 {
        return Err(Error::NotAnEllipse("quadratic part is not definite"));
    }
    let cx = (qb * qe - qc * qd) / det2;
    let cy = (qb * qd - qa * qe) / det2;

    // Value of the quadratic form at the centroid; negative for a real ellipse.
    let f0 = qf + qd * cx + qe * cy;
    let f0_scale = qf.abs() + (qd * cx).abs() + (qe * cy).abs();
    if !(f0 < -1e-14 * f0_scale) {
        return Err(Error::NotAnEllipse("no real points or degenerate"));
    }

    let mean = 0.5 * (qa + qc);
    let rad = (0.5 * (qa - qc)).hypot(qb);
    let mu_max = mean + rad;
    let mu_min = det2 / mu_max;

    let a = (-f0 / mu_min).sqrt();
    let b = (-f0 / mu_max).sqrt();
    if !(a.is_finite() && b.is_finite() && cx.is_finite() && cy.is_finite()) {
        return Err(Error::NotAnEllipse("axes overflow"));
    }
    let theta = if rad <= 4.0 * f64::EPSILON * mean {
        0.0
    } else {
        // Major axis follows the eigenvector of the smaller eigenvalue.
        0.5 * (-2.0 * qb).atan2(qc - qa)
    };
    EllipseGeom::new(cx, cy, a, b.min(a), theta)
}

/// `true` iff `|det|` of the normalized matrix is at most `tol`.
pub fn conic_is_degenerate(q: &ConicMatrix, tol: f64) -> bool {
    normalize_conic(q).determinant().abs() <= tol
}

/// Rescales to unit Frobenius norm and fixes the sign so the trace of the
/// upper-left 2×2 block is positive (or, when that trace vanishes, the first
/// nonzero entry is positive).
pub fn normalize_conic(q: &ConicMatrix) -> ConicMatrix {
    ConicMatrix(normalize_matrix(&q.0).expect("conic matrices are nonzero and finite"))
}

/// Normalizes a raw symmetric matrix; fails on zero or non-finite input.
pub fn normalize_matrix(m: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let max = m.amax();
    if max == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    // Power-of-two prescale is exact and keeps the norm away from
    // overflow and underflow.
    let mut n = m * pow2(-exponent_of(max));
    n /= n.norm();

    let tr2 = n[(0, 0)] + n[(1, 1)];
    let flip = if tr2.abs() > SIGN_EPS {
        tr2 < 0.0
    } else {
        n.transpose()
            .iter()
            .find(|v| v.abs() > SIGN_EPS)
            .is_some_and(|&v| v < 0.0)
    };
    if flip {
        n = -n;
    }
    Ok(n)
}

fn exponent_of(x: f64) -> i32 {
    let bits = x.abs().to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    if biased == 0 {
        // subnormal
        exponent_of(x * pow2(64)) - 64
    } else {
        biased - 1023
    }
}

fn pow2(e: i32) -> f64 {
    // Split to stay within the normal exponent range for large |e|.
    let half = e / 2;
    f64::powi(2.0, half) * f64::powi(2.0, e - half)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_coeffs(q: &ConicMatrix, expected: [f64; 6], tol: f64) {
        for (got, want) in q.coefficients().iter().zip(expected) {
            assert!((got - want).abs() <= tol, "{:?} vs {:?}", q.coefficients(), expected);
        }
    }

    #[test]
    fn unit_circle_coefficients() {
        let e = EllipseGeom::new(0.0, 0.0, 1.0, 1.0, 0.0).unwrap();
        assert_coeffs(&ellipse_to_conic(&e), [1.0, 0.0, 1.0, 0.0, 0.0, -1.0], 0.0);
    }

    #[test]
    fn axis_aligned_ellipse_coefficients() {
        let e = EllipseGeom::new(0.0, 0.0, 2.0, 1.0, 0.0).unwrap();
        assert_coeffs(&ellipse_to_conic(&e), [1.0, 0.0, 4.0, 0.0, 0.0, -4.0], 0.0);
    }

    #[test]
    fn translated_circle_matches_expanded_polynomial() {
        // (x - 3)² + (y + 2)² - 1 = x² + y² - 6x + 4y + 12
        let e = EllipseGeom::circle(3.0, -2.0, 1.0).unwrap();
        assert_coeffs(&ellipse_to_conic(&e), [1.0, 0.0, 1.0, -6.0, 4.0, 12.0], 1e-12);
    }

    #[test]
    fn conic_to_ellipse_examples() {
        let unit = ConicMatrix::from_diagonal(1.0, 1.0, -1.0).unwrap();
        let e = conic_to_ellipse(&unit).unwrap();
        assert_eq!((e.cx(), e.cy(), e.a(), e.b(), e.theta()), (0.0, 0.0, 1.0, 1.0, 0.0));

        let q = ConicMatrix::from_diagonal(1.0, 4.0, -4.0).unwrap();
        let e = conic_to_ellipse(&q).unwrap();
        assert!((e.a() - 2.0).abs() < 1e-14 && (e.b() - 1.0).abs() < 1e-14);
        assert_eq!(e.theta(), 0.0);

        let scaled = unit.scaled(-7.3).unwrap();
        let e = conic_to_ellipse(&scaled).unwrap();
        assert!((e.a() - 1.0).abs() < 1e-14 && (e.b() - 1.0).abs() < 1e-14);
        assert_eq!(e.center(), Point2::new(0.0, 0.0));
    }

    #[test]
    fn conic_to_ellipse_rejects_non_ellipses() {
        let hyperbola = ConicMatrix::from_diagonal(1.0, -1.0, -1.0).unwrap();
        let imaginary = ConicMatrix::from_diagonal(1.0, 1.0, 1.0).unwrap();
        let point = ConicMatrix::from_diagonal(1.0, 1.0, 0.0).unwrap();
        let parabola = ConicMatrix::from_coefficients(1.0, 0.0, 0.0, 0.0, -1.0, 0.0).unwrap();
        for q in [hyperbola, imaginary, point, parabola] {
            assert!(matches!(conic_to_ellipse(&q), Err(Error::NotAnEllipse(_))), "{q:?}");
        }
    }

    #[test]
    fn degeneracy_examples() {
        let tol = 1e-12;
        let circle = ConicMatrix::from_diagonal(1.0, 1.0, -1.0).unwrap();
        assert!(!conic_is_degenerate(&circle, tol));
        assert!(conic_is_degenerate(&ConicMatrix::from_diagonal(1.0, 1.0, 0.0).unwrap(), tol));
        assert!(conic_is_degenerate(&ConicMatrix::from_diagonal(1.0, -1.0, 0.0).unwrap(), tol));
    }

    #[test]
    fn normalize_examples() {
        let s3 = 3f64.sqrt();
        let expected = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0)) / s3;
        for d in [[2.0, 2.0, -2.0], [-1.0, -1.0, 1.0]] {
            let q = ConicMatrix::from_diagonal(d[0], d[1], d[2]).unwrap();
            let n = normalize_conic(&q);
            assert!((n.matrix() - expected).amax() < 1e-15);
        }
        assert_eq!(normalize_matrix(&Matrix3::zeros()), Err(Error::ZeroMatrix));
        assert_eq!(ConicMatrix::new(Matrix3::zeros()), Err(Error::ZeroMatrix));
    }

    #[test]
    fn normalize_sign_falls_back_to_first_entry() {
        // Line at infinity counted twice: the 2×2 block is zero.
        let q = ConicMatrix::from_diagonal(0.0, 0.0, -3.0).unwrap();
        assert_eq!(normalize_conic(&q).matrix()[(2, 2)], 1.0);
        // x² - y² has zero 2×2 trace; the first entry decides.
        let q = ConicMatrix::from_diagonal(-1.0, 1.0, 0.0).unwrap();
        assert!(normalize_conic(&q).matrix()[(0, 0)] > 0.0);
    }

    #[test]
    fn normalize_is_exact_under_power_of_two_scaling() {
        let e = EllipseGeom::new(1.5, -0.25, 3.0, 1.2, 0.7).unwrap();
        let q = ellipse_to_conic(&e);
        let base = normalize_conic(&q);
        for k in [-600, -40, -1, 1, 17, 500] {
            for sign in [1.0, -1.0] {
                let s = q.scaled(sign * pow2(k)).unwrap();
                assert_eq!(normalize_conic(&s), base, "k = {k}");
            }
        }
    }

    #[test]
    fn constructor_canonicalizes() {
        let e = EllipseGeom::new(0.0, 0.0, 1.0, 2.0, 0.0).unwrap();
        assert_eq!((e.a(), e.b()), (2.0, 1.0));
        assert!((e.theta() - 0.5 * PI).abs() < 1e-15);

        let e = EllipseGeom::new(0.0, 0.0, 2.0, 1.0, -0.25).unwrap();
        assert!((e.theta() - (PI - 0.25)).abs() < 1e-15);

        let c = EllipseGeom::new(0.0, 0.0, 1.0, 1.0, 1.2).unwrap();
        assert_eq!(c.theta(), 0.0);

        assert!(EllipseGeom::new(0.0, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(EllipseGeom::new(f64::NAN, 0.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn interior_is_negative() {
        let e = EllipseGeom::new(12.0, -3.0, 5.0, 2.0, 1.1).unwrap();
        let q = ellipse_to_conic(&e);
        assert!(q.eval(&e.center()) < 0.0);
        assert!(normalize_conic(&q).eval(&e.center()) < 0.0);
    }
}
