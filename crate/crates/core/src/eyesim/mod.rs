//! Synthetic eye and camera: exact image conics of the pupil and iris, and
//! sweeps comparing pupil-center estimators against the true projection.

mod scene;
mod sweep;

pub use scene::{fixation_targets, gaze_from_angles, project_scene, EyeScene, SceneTruth, MAX_VIEW_ANGLE_DEG};
pub use sweep::{
    evaluate_cell, mean_of, run_camera_sweep, run_pupil_size_sweep, write_records_csv, BoundaryNoise,
    ConicSource, Estimator, ExperimentRecord, SweepOptions, TargetCircle, CSV_HEADER,
};
