//! Closed-form eigen-decomposition of general real 3×3 matrices.
//!
//! Roots of the characteristic cubic come from the trigonometric / Cardano
//! formulas and get one Newton step. The most isolated root is kept as is;
//! the other two are recomputed from a Householder deflation, because a
//! (near) double root of the cubic is only accurate to about `√ε` while the
//! deflated 2×2 block resolves it to working precision.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Vector3};

use crate::error::{Error, Result};

/// Imaginary parts above this fraction of `‖m‖_F` count as a complex pair.
pub const COMPLEX_TOL: f64 = 1e-6;

/// Three real eigenpairs of a 3×3 matrix.
///
/// `values[2]` is the most isolated eigenvalue; `values[0] <= values[1]` are
/// the remaining pair. Vectors have unit norm and their largest-magnitude
/// component positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenTriple {
    pub values: [f64; 3],
    pub vectors: [Vector3<f64>; 3],
    /// `‖m uᵢ − λᵢ uᵢ‖` for each pair.
    pub residuals: [f64; 3],
}

/// How the distinguished eigenvalue is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Isolation {
    /// Largest minimum distance `|λᵢ − λⱼ|`.
    Absolute,
    /// Largest minimum distance `|log|λᵢ| − log|λⱼ||`.
    LogMagnitude,
}

/// Eigenvalues and eigenvectors of `m`.
///
/// Fails with [`Error::ComplexEigenvalues`] when a conjugate pair has an
/// imaginary part above `1e-6 · ‖m‖_F`.
pub fn eig3(m: &Matrix3<f64>) -> Result<EigenTriple> {
    eig3_with(m, Isolation::Absolute)
}

pub(crate) fn eig3_with(m: &Matrix3<f64>, isolation: Isolation) -> Result<EigenTriple> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let scale = m.norm();
    if scale == 0.0 {
        return Ok(EigenTriple {
            values: [0.0; 3],
            vectors: [Vector3::x(), Vector3::y(), Vector3::z()],
            residuals: [0.0; 3],
        });
    }
    let a = m / scale;

    let roots = characteristic_roots(&a);
    // Deflate with a real root first; the 2×2 block then settles whether the
    // other two are real, to working precision.
    let first = match roots {
        CubicRoots::Three(r) => r[pick_isolated(&r, isolation)],
        CubicRoots::One(r) => r,
    };
    let (mut lambda3, mut u3) = eigenpair_for(&a, first);
    let (mut l1, mut l2) = deflated_pair(&a, &u3)?;

    let values = [l1, l2, lambda3];
    let pivot = pick_isolated(&values, isolation);
    if pivot != 2 {
        let (lambda, u) = eigenpair_for(&a, values[pivot]);
        let (p1, p2) = deflated_pair(&a, &u)?;
        (lambda3, u3, l1, l2) = (lambda, u, p1, p2);
    }
    let (u1, u2) = pair_vectors(&a, l1, l2, &u3);

    let values = [l1 * scale, l2 * scale, lambda3 * scale];
    let vectors = [canonical_sign(u1), canonical_sign(u2), canonical_sign(u3)];
    let residuals = [0, 1, 2].map(|i| (m * vectors[i] - vectors[i] * values[i]).norm());
    Ok(EigenTriple {
        values,
        vectors,
        residuals,
    })
}

enum CubicRoots {
    Three([f64; 3]),
    /// Only one real root; the other two are a conjugate pair.
    One(f64),
}

/// Real roots of `det(a − λI)`, one Newton step each.
fn characteristic_roots(a: &Matrix3<f64>) -> CubicRoots {
    let c2 = -a.trace();
    let c1 = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)] + a[(0, 0)] * a[(2, 2)]
        - a[(0, 2)] * a[(2, 0)]
        + a[(1, 1)] * a[(2, 2)]
        - a[(1, 2)] * a[(2, 1)];
    let c0 = -a.determinant();

    let shift = -c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    let disc = (0.5 * q).powi(2) + (p / 3.0).powi(3);

    let poly = |x: f64| ((x + c2) * x + c1) * x + c0;
    let dpoly = |x: f64| (3.0 * x + 2.0 * c2) * x + c1;
    let newton = |x: f64| {
        let d = dpoly(x);
        let y = x - poly(x) / d;
        if d != 0.0 && y.is_finite() && poly(y).abs() <= poly(x).abs() {
            y
        } else {
            x
        }
    };

    if disc <= 0.0 {
        let r = (-p / 3.0).max(0.0).sqrt();
        if r == 0.0 {
            return CubicRoots::Three([shift; 3]);
        }
        let phi = (-0.5 * q / (r * r * r)).clamp(-1.0, 1.0).acos();
        CubicRoots::Three([0.0, 1.0, 2.0].map(|k| newton(2.0 * r * ((phi + 2.0 * PI * k) / 3.0).cos() + shift)))
    } else {
        let sq = disc.sqrt();
        // Pick the cube-root branch without cancellation.
        let u = (-0.5 * q - q.signum() * sq).cbrt();
        let v = if u == 0.0 { 0.0 } else { -p / (3.0 * u) };
        CubicRoots::One(newton(u + v + shift))
    }
}

/// Eigenvector for an approximate eigenvalue, with the eigenvalue replaced by
/// its Rayleigh quotient when that lowers the residual.
fn eigenpair_for(a: &Matrix3<f64>, lambda: f64) -> (f64, Vector3<f64>) {
    let u = match null_space(&(a - Matrix3::from_diagonal_element(lambda))) {
        NullSpace::One(v) | NullSpace::Two(v, _) => v,
        NullSpace::Full => Vector3::z(),
    };
    let u = refine(a, lambda, u);
    let au = a * u;
    let rho = u.dot(&au);
    if (au - u * rho).norm() <= (au - u * lambda).norm() {
        (rho, u)
    } else {
        (lambda, u)
    }
}

fn pick_isolated(roots: &[f64; 3], isolation: Isolation) -> usize {
    let use_log = isolation == Isolation::LogMagnitude && roots.iter().all(|r| *r != 0.0);
    let dist = |i: usize, j: usize| {
        if use_log {
            (roots[i].abs().ln() - roots[j].abs().ln()).abs()
        } else {
            (roots[i] - roots[j]).abs()
        }
    };
    let isolation_of = |i: usize| {
        (0..3)
            .filter(|&j| j != i)
            .map(|j| dist(i, j))
            .fold(f64::INFINITY, f64::min)
    };
    // Ties go to the largest index so that a sorted triple keeps λ₃ last.
    (0..3)
        .rev()
        .max_by(|&i, &j| isolation_of(i).total_cmp(&isolation_of(j)))
        .unwrap_or(2)
}

/// Eigenvalues of the 2×2 block left after deflating the eigenvector `u`.
fn deflated_pair(a: &Matrix3<f64>, u: &Vector3<f64>) -> Result<(f64, f64)> {
    let h = householder_to_e1(u);
    let t = h * a * h;
    let b: Matrix2<f64> = t.fixed_view::<2, 2>(1, 1).into_owned();

    let mean = 0.5 * (b[(0, 0)] + b[(1, 1)]);
    let half_diff = 0.5 * (b[(0, 0)] - b[(1, 1)]);
    let disc = half_diff * half_diff + b[(0, 1)] * b[(1, 0)];
    if disc >= 0.0 {
        let r = disc.sqrt();
        Ok((mean - r, mean + r))
    } else {
        let imag = (-disc).sqrt();
        if imag > COMPLEX_TOL {
            return Err(Error::ComplexEigenvalues { imag });
        }
        Ok((mean, mean))
    }
}

/// Symmetric orthogonal `H` whose first column is `±u`.
fn householder_to_e1(u: &Vector3<f64>) -> Matrix3<f64> {
    let u = u.normalize();
    let s = if u[0] >= 0.0 { -1.0 } else { 1.0 };
    let w = u - Vector3::x() * s;
    let ww = w.norm_squared();
    if ww == 0.0 {
        return Matrix3::identity();
    }
    Matrix3::identity() - w * w.transpose() * (2.0 / ww)
}

fn pair_vectors(a: &Matrix3<f64>, l1: f64, l2: f64, u3: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    if (l1 - l2).abs() <= 1e-8 {
        let mid = 0.5 * (l1 + l2);
        match null_space(&(a - Matrix3::from_diagonal_element(mid))) {
            NullSpace::One(v) => {
                let v = refine(a, mid, v);
                (v, v)
            }
            NullSpace::Two(v1, v2) => (refine(a, l1, v1), refine(a, l2, v2)),
            NullSpace::Full => {
                let (v1, v2) = orthonormal_complement(u3);
                (v1, v2)
            }
        }
    } else {
        let vec_for = |l: f64| match null_space(&(a - Matrix3::from_diagonal_element(l))) {
            NullSpace::One(v) | NullSpace::Two(v, _) => refine(a, l, v),
            NullSpace::Full => *u3,
        };
        (vec_for(l1), vec_for(l2))
    }
}

enum NullSpace {
    One(Vector3<f64>),
    Two(Vector3<f64>, Vector3<f64>),
    Full,
}

/// Numerical null space of a shifted matrix `s = a − λI` (with `‖a‖ = 1`).
fn null_space(s: &Matrix3<f64>) -> NullSpace {
    let norm = s.norm();
    if norm <= 1e-12 {
        return NullSpace::Full;
    }
    let rows = [s.row(0).transpose(), s.row(1).transpose(), s.row(2).transpose()];
    let crosses = [rows[0].cross(&rows[1]), rows[0].cross(&rows[2]), rows[1].cross(&rows[2])];
    let best = crosses
        .iter()
        .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))
        .copied()
        .unwrap_or_else(Vector3::zeros);
    if best.norm() > 1e-8 * norm * norm {
        return NullSpace::One(best.normalize());
    }
    let dominant = rows
        .iter()
        .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))
        .copied()
        .unwrap_or_else(Vector3::x);
    let (v1, v2) = orthonormal_complement(&dominant);
    NullSpace::Two(v1, v2)
}

/// Two orthonormal vectors orthogonal to `n`.
fn orthonormal_complement(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let n = n.normalize();
    let axis = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        Vector3::x()
    } else if n.y.abs() <= n.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let v1 = n.cross(&axis).normalize();
    let v2 = n.cross(&v1).normalize();
    (v1, v2)
}

/// One step of inverse iteration with a slightly perturbed shift.
fn refine(a: &Matrix3<f64>, lambda: f64, v: Vector3<f64>) -> Vector3<f64> {
    let shift = lambda + 1e-13 * (1.0 + lambda.abs());
    let s = a - Matrix3::from_diagonal_element(shift);
    match s.lu().solve(&v) {
        Some(y) if y.iter().all(|c| c.is_finite()) && y.norm() > 0.0 => {
            let y = y.normalize();
            // Keep the refined vector only if it does not worsen the residual.
            let before = (a * v - v * lambda).norm();
            let after = (a * y - y * lambda).norm();
            if after <= before {
                y
            } else {
                v
            }
        }
        _ => v,
    }
}

fn canonical_sign(v: Vector3<f64>) -> Vector3<f64> {
    let v = v.normalize();
    if v[v.iamax()] < 0.0 {
        -v
    } else {
        v
    }
}
