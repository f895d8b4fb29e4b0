//! File formats: ellipse, conic and homography JSON, point CSV, sweep
//! configs and estimator output.

use std::path::Path;

use nalgebra::{Matrix3, Point2};
use serde::{Deserialize, Serialize};

use crate::concentric::CenterRatio;
use crate::conic::{ellipse_to_conic, ConicMatrix, EllipseGeom};
use crate::eyesim::{
    run_camera_sweep, run_pupil_size_sweep, Estimator, EyeScene, ExperimentRecord, SweepOptions, TargetCircle,
};
use crate::projective::Homography;

/// Malformed or invalid input file.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct InputError(pub String);

impl InputError {
    fn at(path: &Path, msg: impl std::fmt::Display) -> Self {
        Self(format!("{}: {msg}", path.display()))
    }
}

/// `{"cx", "cy", "a", "b", "theta"}`, theta in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipseJson {
    pub cx: f64,
    pub cy: f64,
    pub a: f64,
    pub b: f64,
    pub theta: f64,
}

impl From<&EllipseGeom> for EllipseJson {
    fn from(e: &EllipseGeom) -> Self {
        Self {
            cx: e.cx(),
            cy: e.cy(),
            a: e.a(),
            b: e.b(),
            theta: e.theta(),
        }
    }
}

/// `{"matrix": [[..3], [..3], [..3]]}`, row-major. Used for conics and
/// homographies alike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub matrix: [[f64; 3]; 3],
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.matrix[i][j])
    }

    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        Self {
            matrix: [0, 1, 2].map(|i| [0, 1, 2].map(|j| m[(i, j)])),
        }
    }
}

/// Either conic representation, wherever a conic is expected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConicJson {
    Ellipse(EllipseJson),
    Matrix(MatrixJson),
}

impl ConicJson {
    pub fn to_conic(&self) -> crate::Result<ConicMatrix> {
        match self {
            Self::Ellipse(e) => Ok(ellipse_to_conic(&EllipseGeom::new(e.cx, e.cy, e.a, e.b, e.theta)?)),
            Self::Matrix(m) => ConicMatrix::new(m.to_matrix()),
        }
    }
}

/// `{"center": [x, y], "ratio", "concentricity", "eigenvalues": [λ₁, λ₂, λ₃]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterRatioJson {
    pub center: [f64; 2],
    pub ratio: f64,
    pub concentricity: f64,
    pub eigenvalues: [f64; 3],
}

impl From<&CenterRatio> for CenterRatioJson {
    fn from(cr: &CenterRatio) -> Self {
        Self {
            center: [cr.center.x, cr.center.y],
            ratio: cr.ratio,
            concentricity: cr.concentricity,
            eigenvalues: cr.eigenvalues,
        }
    }
}

fn read_text(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError::at(path, e))
}

pub fn read_conic(path: &Path) -> Result<ConicMatrix, InputError> {
    let parsed: ConicJson = serde_json::from_str(&read_text(path)?)
        .map_err(|e| InputError::at(path, format!("expected ellipse or conic JSON ({e})")))?;
    parsed.to_conic().map_err(|e| InputError::at(path, e))
}

pub fn read_homography(path: &Path) -> Result<Homography, InputError> {
    let parsed: MatrixJson = serde_json::from_str(&read_text(path)?).map_err(|e| InputError::at(path, e))?;
    Homography::new(parsed.to_matrix()).map_err(|e| InputError::at(path, e))
}

/// Points from a CSV file with header `x,y`.
pub fn read_points_csv(path: &Path) -> Result<Vec<Point2<f64>>, InputError> {
    let file = std::fs::File::open(path).map_err(|e| InputError::at(path, e))?;
    parse_points_csv(file).map_err(|e| InputError::at(path, e))
}

pub fn parse_points_csv<R: std::io::Read>(input: R) -> Result<Vec<Point2<f64>>, InputError> {
    #[derive(Deserialize)]
    struct Row {
        x: f64,
        y: f64,
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers().map_err(|e| InputError(e.to_string()))?;
    if headers != vec!["x", "y"] {
        return Err(InputError(format!("expected header `x,y`, found `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    reader
        .deserialize::<Row>()
        .map(|row| {
            let row = row.map_err(|e| InputError(e.to_string()))?;
            if !(row.x.is_finite() && row.y.is_finite()) {
                return Err(InputError("non-finite coordinate".into()));
            }
            Ok(Point2::new(row.x, row.y))
        })
        .collect()
}

pub fn write_points_csv<W: std::io::Write>(points: &[Point2<f64>], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y"])?;
    for p in points {
        w.write_record([p.x.to_string(), p.y.to_string()])?;
    }
    w.flush()
}

/// Which sweep to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    /// Camera orbiting the eye over a `φ × θ` grid.
    Camera { phi_deg: Vec<f64>, theta_deg: Vec<f64> },
    /// Fixed camera, eye following targets, for several pupil radii.
    PupilSize {
        pupil_radii_mm: Vec<f64>,
        n_targets: usize,
        #[serde(default)]
        targets: TargetCircle,
    },
}

/// Sweep config file.
///
/// ```json
/// {
///   "experiment": {"kind": "camera", "phi_deg": [10, 20], "theta_deg": [30, 40]},
///   "scene": {"camera_distance": 30.0},
///   "options": {"seed": 7, "boundary": {"sigma": 0.25}}
/// }
/// ```
///
/// `scene` and `options` are optional and default field by field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub scene: EyeScene,
    #[serde(default)]
    pub options: SweepOptions,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, InputError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| InputError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self, InputError> {
        Self::from_json(&read_text(path)?).map_err(|e| InputError::at(path, e))
    }

    pub fn validate(&self) -> Result<(), InputError> {
        let bad = |msg: &str| Err(InputError(msg.into()));
        self.scene.validate().map_err(|e| InputError(e.to_string()))?;
        match &self.experiment {
            Experiment::Camera { phi_deg, theta_deg } => {
                if phi_deg.is_empty() || theta_deg.is_empty() {
                    return bad("phi_deg and theta_deg must be non-empty");
                }
                if !phi_deg.iter().chain(theta_deg).all(|v| v.is_finite()) {
                    return bad("grid angles must be finite");
                }
            }
            Experiment::PupilSize {
                pupil_radii_mm,
                n_targets,
                targets,
            } => {
                if pupil_radii_mm.is_empty() || *n_targets == 0 {
                    return bad("need at least one pupil radius and one target");
                }
                if !pupil_radii_mm.iter().all(|r| *r > 0.0 && *r < self.scene.iris_radius) {
                    return bad("pupil radii must lie in (0, iris_radius)");
                }
                if !(targets.radius >= 0.0 && targets.radius.is_finite() && targets.center.iter().all(|v| v.is_finite())) {
                    return bad("invalid target circle");
                }
            }
        }
        let o = &self.options;
        if o.estimators.is_empty() {
            return bad("no estimators selected");
        }
        if !(o.tolerance() > 0.0 && o.tolerance().is_finite()) {
            return bad("tolerance must be positive");
        }
        if !(o.boundary.sigma >= 0.0 && o.boundary.sigma.is_finite()) {
            return bad("boundary sigma must be non-negative");
        }
        let samples_needed = o.estimators.contains(&Estimator::Fit) || o.ours_conics == crate::eyesim::ConicSource::Fitted;
        if samples_needed && o.boundary.pupil_points.min(o.boundary.iris_points) < crate::fitting::MIN_POINTS {
            return bad("boundary point counts must be at least 6");
        }
        Ok(())
    }

    /// Runs the configured sweep.
    pub fn run(&self) -> crate::Result<Vec<ExperimentRecord>> {
        match &self.experiment {
            Experiment::Camera { phi_deg, theta_deg } => run_camera_sweep(&self.scene, phi_deg, theta_deg, &self.options),
            Experiment::PupilSize {
                pupil_radii_mm,
                n_targets,
                targets,
            } => run_pupil_size_sweep(&self.scene, pupil_radii_mm, *n_targets, targets, &self.options),
        }
    }
}
