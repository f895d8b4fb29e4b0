//! Ellipse-center baselines: direct least-squares ellipse fitting and
//! synthetic boundary sampling.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Point2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::conic::{conic_to_ellipse, ConicMatrix, EllipseGeom};
use crate::eigen::eig3;
use crate::error::{Error, Result};

/// Fewest points accepted for a fit (five for a conic, plus one).
pub const MIN_POINTS: usize = 6;

/// Contiguous arc of parameter angle `[start, end)` removed before sampling.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ArcInterval {
    pub start: f64,
    pub end: f64,
}

impl ArcInterval {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, t: f64) -> bool {
        let len = (self.end - self.start).clamp(0.0, TAU);
        (t - self.start).rem_euclid(TAU) < len
    }
}

/// Which scene conic a boundary sample was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundarySource {
    Pupil,
    Iris,
    #[default]
    Other,
}

/// Boundary points of one ellipse, as an edge detector would report them.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySample {
    points: Vec<Point2<f64>>,
    pub source: BoundarySource,
    pub noise_sigma: f64,
    pub occlusion: Option<ArcInterval>,
}

impl BoundarySample {
    /// Wraps raw points; needs at least [`MIN_POINTS`] finite points.
    pub fn new(points: Vec<Point2<f64>>) -> Result<Self> {
        if points.len() < MIN_POINTS {
            return Err(Error::TooFewPoints {
                got: points.len(),
                min: MIN_POINTS,
            });
        }
        if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            points,
            source: BoundarySource::Other,
            noise_sigma: 0.0,
            occlusion: None,
        })
    }

    pub fn with_source(mut self, source: BoundarySource) -> Self {
        self.source = source;
        self
    }

    pub fn points(&self) -> &[Point2<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Samples `n` evenly spaced parameter angles on `e`, drops those inside
/// `occlusion`, and perturbs the rest with isotropic Gaussian noise.
pub fn sample_ellipse_boundary(
    e: &EllipseGeom,
    n: usize,
    noise_sigma: f64,
    occlusion: Option<ArcInterval>,
    seed: u64,
) -> Result<BoundarySample> {
    let noise = Normal::new(0.0, noise_sigma)
        .map_err(|_| Error::InvalidEllipse(format!("bad noise sigma {noise_sigma}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let points: Vec<Point2<f64>> = (0..n)
        .map(|k| TAU * k as f64 / n as f64)
        .filter(|t| !occlusion.is_some_and(|arc| arc.contains(*t)))
        .map(|t| {
            let p = e.point_at(t);
            if noise_sigma > 0.0 {
                Point2::new(p.x + noise.sample(&mut rng), p.y + noise.sample(&mut rng))
            } else {
                p
            }
        })
        .collect();

    let mut sample = BoundarySample::new(points)?;
    sample.noise_sigma = noise_sigma;
    sample.occlusion = occlusion;
    Ok(sample)
}

/// Direct least-squares ellipse fit.
///
/// Minimizes the algebraic residual `Σ (ṽᵢᵀ Q ṽᵢ)²` under `4AC − B² = 1`,
/// solved through the reduced 3×3 eigenproblem on the quadratic
/// coefficients. Points are centered and scaled first.
pub fn fit_ellipse(s: &BoundarySample) -> Result<EllipseGeom> {
    conic_to_ellipse(&fit_conic(s.points())?)
}

/// Same fit as [`fit_ellipse`], returned as a conic matrix.
pub fn fit_conic(points: &[Point2<f64>]) -> Result<ConicMatrix> {
    if points.len() < MIN_POINTS {
        return Err(Error::TooFewPoints {
            got: points.len(),
            min: MIN_POINTS,
        });
    }
    let n = points.len() as f64;
    let mean = points.iter().fold(nalgebra::Vector2::zeros(), |acc, p| acc + p.coords) / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let d = p.coords - mean;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    let spread = (sxx + syy) / n;
    if !(spread > 0.0) {
        return Err(Error::DegenerateFit("all points coincide"));
    }
    // Smallest eigenvalue of the scatter matrix vanishes for collinear points.
    let half_tr = 0.5 * (sxx + syy);
    let min_eig = half_tr - (0.5 * (sxx - syy)).hypot(sxy);
    if min_eig <= 1e-12 * half_tr {
        return Err(Error::DegenerateFit("points are collinear"));
    }
    let scale = spread.sqrt();

    let mut s1 = Matrix3::zeros();
    let mut s2 = Matrix3::zeros();
    let mut s3 = Matrix3::zeros();
    for p in points {
        let x = (p.x - mean.x) / scale;
        let y = (p.y - mean.y) / scale;
        let quad = nalgebra::Vector3::new(x * x, x * y, y * y);
        let lin = nalgebra::Vector3::new(x, y, 1.0);
        s1 += quad * quad.transpose();
        s2 += quad * lin.transpose();
        s3 += lin * lin.transpose();
    }
    let s3_inv = s3
        .try_inverse()
        .ok_or(Error::DegenerateFit("linear scatter matrix is singular"))?;
    let t = -s3_inv * s2.transpose();
    let reduced = s1 + s2 * t;
    // Premultiply by the inverse of the constraint matrix [[0,0,2],[0,-1,0],[2,0,0]].
    #[rustfmt::skip]
    let system = Matrix3::new(
        reduced[(2, 0)] / 2.0, reduced[(2, 1)] / 2.0, reduced[(2, 2)] / 2.0,
        -reduced[(1, 0)],      -reduced[(1, 1)],      -reduced[(1, 2)],
        reduced[(0, 0)] / 2.0, reduced[(0, 1)] / 2.0, reduced[(0, 2)] / 2.0,
    );
    let eig = eig3(&system).map_err(|_| Error::DegenerateFit("eigenproblem has no real solution"))?;

    let quad = eig
        .vectors
        .iter()
        .zip(eig.values)
        .filter_map(|(v, value)| {
            let constraint = 4.0 * v[0] * v[2] - v[1] * v[1];
            (constraint > 1e-12).then_some((*v, value))
        })
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(v, _)| v)
        .ok_or(Error::NotAnEllipse("no eigenvector satisfies the ellipse constraint"))?;
    let lin = t * quad;

    let normalized = ConicMatrix::from_coefficients(quad[0], quad[1], quad[2], lin[0], lin[1], lin[2])?;
    // Back to input coordinates: x' = (x − mean) / scale.
    #[rustfmt::skip]
    let to_normalized = Matrix3::new(
        1.0 / scale, 0.0,         -mean.x / scale,
        0.0,         1.0 / scale, -mean.y / scale,
        0.0,         0.0,         1.0,
    );
    ConicMatrix::new(to_normalized.transpose() * normalized.matrix() * to_normalized)
}

/// Geometric center of an ellipse, the naive pupil-center estimate.
pub fn euclidean_center(e: &EllipseGeom) -> Point2<f64> {
    e.center()
}
