//! Projected center and radii ratio of two ellipses that are the images of
//! a pair of concentric circles.
//!
//! With `A = Q₂Q₁⁻¹`, the pencil `−λQ₁ + Q₂` degenerates at the eigenvalues
//! of `A`. For projectively concentric conics the spectrum is
//! `λ₁ = λ₂` (the line through the two touching points, counted twice) plus a
//! distinguished `λ₃` whose degenerate conic is the common center
//! `p ∝ Q₁⁻¹u₃`. The eigenvalue ratios are projective invariants with
//! `λ₁ : λ₂ : λ₃ = 1 : 1 : R²/r²`, so `R/r = (λ₃² / (λ₁λ₂))^¼`.

use nalgebra::{Matrix3, Point2, Vector3};

use crate::conic::{normalize_conic, normalize_matrix, ConicMatrix, DEFAULT_DEGENERACY_TOL};
use crate::eigen::{eig3_with, EigenTriple, Isolation};
use crate::error::{Error, NotConcentricReason, Result};

/// Concentricity tolerance for exact (analytic) conics.
pub const EXACT_TOL: f64 = 1e-6;

/// Concentricity tolerance for conics fitted to noisy boundary points.
pub const FITTED_TOL: f64 = 5e-2;

/// Output of [`concentric_center_ratio`].
#[derive(Debug, Clone, PartialEq)]
pub struct CenterRatio {
    /// Image of the common center, in the input coordinates.
    pub center: Point2<f64>,
    /// Outer over inner radius, `R/r`.
    pub ratio: f64,
    /// `|λ₁ − λ₂| / max|λᵢ|`.
    pub concentricity: f64,
    /// `[λ₁, λ₂, λ₃]` with `λ₁ <= λ₂` the near-double pair and `λ₃` the
    /// distinguished eigenvalue, computed in the conditioned frame.
    pub eigenvalues: [f64; 3],
}

impl CenterRatio {
    /// Ratio estimates `[√(λ₂λ₃/λ₁²), √(λ₁λ₃/λ₂²), (λ₃²/(λ₁λ₂))^¼]`.
    ///
    /// They agree when `λ₁ = λ₂`. The last one is symmetric in the pair and is
    /// the one reported in [`CenterRatio::ratio`].
    pub fn ratio_estimates(&self) -> [f64; 3] {
        let [l1, l2, l3] = self.eigenvalues;
        [
            (l2 * l3 / (l1 * l1)).sqrt(),
            (l1 * l3 / (l2 * l2)).sqrt(),
            (l3 * l3 / (l1 * l2)).sqrt().sqrt(),
        ]
    }
}

/// Similarity `x ↦ (x − origin) / scale` that brings both ellipses to unit
/// size around the origin.
#[derive(Debug, Clone, Copy)]
struct Conditioning {
    origin: Point2<f64>,
    scale: f64,
}

impl Conditioning {
    fn for_pair(q1: &ConicMatrix, q2: &ConicMatrix) -> Self {
        match (centroid_and_size(q1), centroid_and_size(q2)) {
            (Some((c1, s1)), Some((c2, s2))) => {
                let origin = Point2::from((c1.coords + c2.coords) * 0.5);
                let spread = 0.5 * (c1 - c2).norm();
                Self {
                    origin,
                    scale: s1.max(s2).max(spread),
                }
            }
            _ => Self {
                origin: Point2::origin(),
                scale: 1.0,
            },
        }
    }

    /// `Tᵀ Q T` with `T` the inverse conditioning map, then normalized.
    fn apply(&self, q: &ConicMatrix) -> Matrix3<f64> {
        let s = self.scale;
        #[rustfmt::skip]
        let back = Matrix3::new(
            s,   0.0, self.origin.x,
            0.0, s,   self.origin.y,
            0.0, 0.0, 1.0,
        );
        let m = back.transpose() * q.matrix() * back;
        normalize_matrix(&m).unwrap_or(m)
    }

    fn restore(&self, p: Point2<f64>) -> Point2<f64> {
        self.origin + p.coords * self.scale
    }
}

/// Centroid and semi-major axis of an ellipse conic, without the full
/// geometric conversion.
fn centroid_and_size(q: &ConicMatrix) -> Option<(Point2<f64>, f64)> {
    let m = q.matrix();
    let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let (d, e, f) = (m[(0, 2)], m[(1, 2)], m[(2, 2)]);
    let det2 = a * c - b * b;
    if !(det2 > 0.0) {
        return None;
    }
    let cx = (b * e - c * d) / det2;
    let cy = (b * d - a * e) / det2;
    let f0 = f + d * cx + e * cy;
    let mean = 0.5 * (a + c);
    let rad = (0.5 * (a - c)).hypot(b);
    // Smallest-magnitude eigenvalue of the quadratic block, with the sign of the block.
    let mu_min = det2 / (mean.abs() + rad) * mean.signum();
    let major_sq = -f0 / mu_min;
    (major_sq > 0.0 && major_sq.is_finite() && cx.is_finite() && cy.is_finite())
        .then(|| (Point2::new(cx, cy), major_sq.sqrt()))
}

/// Recovers the projected common center and the radii ratio `R/r` of two
/// ellipses assumed to be projective images of concentric circles.
///
/// `inner` is the image of the smaller circle. Passing the conics the other
/// way round yields the same center and the reciprocal ratio. The pair is
/// accepted when its concentricity is at most `tol`.
pub fn concentric_center_ratio(inner: &ConicMatrix, outer: &ConicMatrix, tol: f64) -> Result<CenterRatio> {
    let frame = Conditioning::for_pair(inner, outer);
    let q1 = frame.apply(inner);
    let q2 = frame.apply(outer);

    if (q1 - q2).amax() <= 1e-12 {
        return Err(Error::NotConcentric {
            reason: NotConcentricReason::Identical,
            concentricity: 0.0,
        });
    }
    if q1.determinant().abs() <= DEFAULT_DEGENERACY_TOL {
        return Err(Error::SingularInnerConic);
    }
    let q1_inv = q1.try_inverse().ok_or(Error::SingularInnerConic)?;

    let eig = pencil_spectrum(&(q2 * q1_inv))?;
    let [l1, l2, l3] = eig.values;
    let concentricity = concentricity_of(&eig.values);

    if (l3 - l1).abs().min((l3 - l2).abs()) <= 1e-12 * max_abs(&eig.values) {
        return Err(Error::NotConcentric {
            reason: NotConcentricReason::Identical,
            concentricity,
        });
    }
    if !(concentricity <= tol) {
        return Err(Error::NotConcentric {
            reason: NotConcentricReason::SplitDoubleEigenvalue,
            concentricity,
        });
    }
    // (R/r)⁴ = λ₃² / (λ₁λ₂)
    let ratio_pow4 = l3 * l3 / (l1 * l2);
    if !(ratio_pow4 > 0.0 && ratio_pow4.is_finite()) {
        return Err(Error::NotConcentric {
            reason: NotConcentricReason::NonPositiveRatio,
            concentricity,
        });
    }

    let p = q1_inv * eig.vectors[2];
    let p = p / p.norm();
    if !(p.z.abs() > 1e-12) {
        return Err(Error::CenterAtInfinity);
    }
    let center = frame.restore(Point2::new(p.x / p.z, p.y / p.z));

    Ok(CenterRatio {
        center,
        ratio: ratio_pow4.sqrt().sqrt(),
        concentricity,
        eigenvalues: eig.values,
    })
}

fn pencil_spectrum(a: &Matrix3<f64>) -> Result<EigenTriple> {
    eig3_with(a, Isolation::LogMagnitude).map_err(|e| match e {
        Error::ComplexEigenvalues { .. } => Error::NotConcentric {
            reason: NotConcentricReason::ComplexPair,
            concentricity: f64::INFINITY,
        },
        other => other,
    })
}

fn max_abs(values: &[f64; 3]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn concentricity_of(values: &[f64; 3]) -> f64 {
    (values[0] - values[1]).abs() / max_abs(values)
}

/// Eigen-decomposition of `Q₂Q₁⁻¹` for the conics as given (no
/// normalization or change of coordinates). Its eigenvalues are the
/// parameters at which [`pencil_conic`] degenerates.
pub fn pencil_eigenvalues(q1: &ConicMatrix, q2: &ConicMatrix) -> Result<EigenTriple> {
    let inv = q1.matrix().try_inverse().ok_or(Error::SingularInnerConic)?;
    eig3_with(&(q2.matrix() * inv), Isolation::LogMagnitude)
}

/// Member `normalize(−λQ₁ + Q₂)` of the pencil spanned by two conics.
pub fn pencil_conic(q1: &ConicMatrix, q2: &ConicMatrix, lambda: f64) -> Result<ConicMatrix> {
    let m = q2.matrix() - q1.matrix() * lambda;
    let magnitude = q2.matrix().norm() + lambda.abs() * q1.matrix().norm();
    if m.norm() <= 1e-14 * magnitude {
        return Err(Error::ZeroMatrix);
    }
    Ok(normalize_conic(&ConicMatrix::new(m)?))
}

/// Relative split `|λ₁ − λ₂| / max|λᵢ|` of the near-double eigenvalue.
///
/// Zero for projectively concentric conics; `+∞` when the pencil has a
/// complex pair or cannot be formed.
pub fn concentricity_check(q1: &ConicMatrix, q2: &ConicMatrix) -> f64 {
    let frame = Conditioning::for_pair(q1, q2);
    let m1 = frame.apply(q1);
    let m2 = frame.apply(q2);
    let Some(inv) = m1.try_inverse() else {
        return f64::INFINITY;
    };
    match pencil_spectrum(&(m2 * inv)) {
        Ok(eig) => concentricity_of(&eig.values),
        Err(_) => f64::INFINITY,
    }
}

/// Homogeneous null vector of a degenerate conic (its singular point).
pub fn degenerate_point(q: &ConicMatrix) -> Vector3<f64> {
    let m = q.matrix();
    let rows = [m.row(0).transpose(), m.row(1).transpose(), m.row(2).transpose()];
    [rows[0].cross(&rows[1]), rows[0].cross(&rows[2]), rows[1].cross(&rows[2])]
        .into_iter()
        .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))
        .map(|v| v.normalize())
        .unwrap_or_else(Vector3::z)
}
