use std::io::Write;

use nalgebra::{Point2, Point3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scene::{fixation_targets, project_scene, EyeScene, SceneTruth};
use crate::concentric::{concentric_center_ratio, EXACT_TOL, FITTED_TOL};
use crate::conic::{conic_to_ellipse, ConicMatrix};
use crate::error::{Error, Result};
use crate::fitting::{
    euclidean_center, fit_conic, sample_ellipse_boundary, ArcInterval, BoundarySample, BoundarySource,
};

/// Column header of sweep CSV files.
pub const CSV_HEADER: [&str; 7] = [
    "phi_deg",
    "theta_deg",
    "pupil_radius_mm",
    "gaze_angle_deg",
    "err_ours_px",
    "err_euclidean_px",
    "err_fit_px",
];

/// Pupil-center estimators compared in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Concentric-circle center from the pupil and iris conics.
    Ours,
    /// Center of the exact pupil ellipse.
    Euclidean,
    /// Center of an ellipse fitted to sampled pupil boundary points.
    Fit,
}

/// Which conics [`Estimator::Ours`] receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConicSource {
    /// The analytic image conics.
    #[default]
    Exact,
    /// Conics fitted to the sampled boundaries.
    Fitted,
}

/// Synthetic boundary detection applied to each cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundaryNoise {
    pub sigma: f64,
    pub pupil_points: usize,
    pub iris_points: usize,
    pub occlusion: Option<ArcInterval>,
}

impl Default for BoundaryNoise {
    fn default() -> Self {
        Self {
            sigma: 0.25,
            pupil_points: 64,
            iris_points: 128,
            occlusion: None,
        }
    }
}

/// Everything besides the scene grid that determines a sweep's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    pub estimators: Vec<Estimator>,
    pub boundary: BoundaryNoise,
    pub ours_conics: ConicSource,
    /// Concentricity tolerance; `None` picks the default for `ours_conics`.
    pub tolerance: Option<f64>,
    pub seed: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            estimators: vec![Estimator::Ours, Estimator::Euclidean, Estimator::Fit],
            boundary: BoundaryNoise::default(),
            ours_conics: ConicSource::Exact,
            tolerance: None,
            seed: 0,
        }
    }
}

impl SweepOptions {
    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(match self.ours_conics {
            ConicSource::Exact => EXACT_TOL,
            ConicSource::Fitted => FITTED_TOL,
        })
    }

    fn uses(&self, e: Estimator) -> bool {
        self.estimators.contains(&e)
    }
}

/// Fixation circle for the pupil-size sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TargetCircle {
    pub center: Point3<f64>,
    pub radius: f64,
}

impl Default for TargetCircle {
    fn default() -> Self {
        Self {
            center: Point3::new(0.0, 0.0, 500.0),
            radius: 100.0,
        }
    }
}

/// One sweep cell. Errors are pixel distances to the true projected pupil
/// center, `None` when the estimator was not run or failed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub phi_deg: f64,
    pub theta_deg: f64,
    pub pupil_radius_mm: f64,
    pub gaze_angle_deg: f64,
    pub err_ours: Option<f64>,
    pub err_euclidean: Option<f64>,
    pub err_fit: Option<f64>,
}

/// One record per `(φ, θ)`, φ-major, with the base scene's gaze.
pub fn run_camera_sweep(
    base: &EyeScene,
    phi_grid: &[f64],
    theta_grid: &[f64],
    opts: &SweepOptions,
) -> Result<Vec<ExperimentRecord>> {
    if phi_grid.is_empty() || theta_grid.is_empty() {
        return Err(Error::InvalidScene("empty sweep grid".into()));
    }
    base.validate()?;
    let scenes: Vec<EyeScene> = phi_grid
        .iter()
        .flat_map(|&phi| {
            theta_grid.iter().map(move |&theta| EyeScene {
                phi,
                theta,
                ..base.clone()
            })
        })
        .collect();
    Ok(evaluate_all(&scenes, opts))
}

/// One record per `(radius, target)`, radius-major. The camera stays put
/// and aims where the base scene's pupil center is; the eye turns to each
/// fixation target.
pub fn run_pupil_size_sweep(
    base: &EyeScene,
    pupil_radii: &[f64],
    n_targets: usize,
    targets: &TargetCircle,
    opts: &SweepOptions,
) -> Result<Vec<ExperimentRecord>> {
    if pupil_radii.is_empty() || n_targets == 0 {
        return Err(Error::InvalidScene("need at least one radius and one target".into()));
    }
    base.validate()?;
    let aim = base.aim_point.unwrap_or_else(|| base.pupil_center());
    let gazes: Vec<_> = fixation_targets(n_targets, targets.radius, targets.center)
        .into_iter()
        .map(|t| (t - base.eyeball_center).normalize())
        .collect();
    let mut scenes = Vec::with_capacity(pupil_radii.len() * n_targets);
    for &r in pupil_radii {
        for g in &gazes {
            let s = EyeScene {
                pupil_radius: r,
                gaze_direction: *g,
                aim_point: Some(aim),
                ..base.clone()
            };
            s.validate()?;
            scenes.push(s);
        }
    }
    Ok(evaluate_all(&scenes, opts))
}

fn evaluate_all(scenes: &[EyeScene], opts: &SweepOptions) -> Vec<ExperimentRecord> {
    // Indexed parallel collect keeps grid order.
    scenes
        .par_iter()
        .enumerate()
        .map(|(i, s)| evaluate_cell(s, i as u64, opts))
        .collect()
}

/// Runs every selected estimator on one scene. Noise for cell `index` comes
/// from its own ChaCha stream, so results do not depend on evaluation order.
pub fn evaluate_cell(scene: &EyeScene, index: u64, opts: &SweepOptions) -> ExperimentRecord {
    let mut record = ExperimentRecord {
        phi_deg: scene.phi,
        theta_deg: scene.theta,
        pupil_radius_mm: scene.pupil_radius,
        gaze_angle_deg: scene.gaze_angle_deg(),
        err_ours: None,
        err_euclidean: None,
        err_fit: None,
    };
    let Ok(truth) = project_scene(scene) else {
        return record;
    };
    let dist = |p: Point2<f64>| (p - truth.true_center).norm();

    if opts.uses(Estimator::Euclidean) {
        record.err_euclidean = conic_to_ellipse(&truth.pupil_conic)
            .ok()
            .map(|e| dist(euclidean_center(&e)));
    }

    let needs_samples = opts.uses(Estimator::Fit) || (opts.uses(Estimator::Ours) && opts.ours_conics == ConicSource::Fitted);
    let samples = needs_samples.then(|| sample_cell(&truth, index, opts));
    let fitted = samples.as_ref().map(|(pupil, iris)| {
        (
            pupil.as_ref().ok().and_then(|s| fit_conic(s.points()).ok()),
            iris.as_ref().ok().and_then(|s| fit_conic(s.points()).ok()),
        )
    });

    if opts.uses(Estimator::Fit) {
        record.err_fit = fitted
            .as_ref()
            .and_then(|(pupil, _)| pupil.as_ref())
            .and_then(|q| conic_to_ellipse(q).ok())
            .map(|e| dist(euclidean_center(&e)));
    }

    if opts.uses(Estimator::Ours) {
        let conics: Option<(ConicMatrix, ConicMatrix)> = match opts.ours_conics {
            ConicSource::Exact => Some((truth.pupil_conic, truth.iris_conic)),
            ConicSource::Fitted => fitted.and_then(|(p, i)| p.zip(i)),
        };
        record.err_ours = conics
            .and_then(|(p, i)| concentric_center_ratio(&p, &i, opts.tolerance()).ok())
            .map(|cr| dist(cr.center));
    }
    record
}

fn sample_cell(
    truth: &SceneTruth,
    index: u64,
    opts: &SweepOptions,
) -> (Result<BoundarySample>, Result<BoundarySample>) {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index);
    let (pupil_seed, iris_seed): (u64, u64) = (rng.random(), rng.random());
    let b = &opts.boundary;
    let sample = |q: &ConicMatrix, n: usize, seed: u64, source: BoundarySource| {
        let e = conic_to_ellipse(q)?;
        sample_ellipse_boundary(&e, n, b.sigma, b.occlusion, seed).map(|s| s.with_source(source))
    };
    (
        sample(&truth.pupil_conic, b.pupil_points, pupil_seed, BoundarySource::Pupil),
        sample(&truth.iris_conic, b.iris_points, iris_seed, BoundarySource::Iris),
    )
}

/// Writes records with [`CSV_HEADER`]; missing errors are empty fields.
pub fn write_records_csv<W: Write>(records: &[ExperimentRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
    for r in records {
        w.write_record([
            format_number(r.phi_deg),
            format_number(r.theta_deg),
            format_number(r.pupil_radius_mm),
            format_number(r.gaze_angle_deg),
            opt(r.err_ours),
            opt(r.err_euclidean),
            opt(r.err_fit),
        ])?;
    }
    w.flush()
}

/// Shortest round-trip decimal, switching to exponent form for tiny values.
fn format_number(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Mean of the present values, `None` if there are none.
pub fn mean_of<I: IntoIterator<Item = Option<f64>>>(values: I) -> Option<f64> {
    let (sum, n) = values
        .into_iter()
        .flatten()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}
