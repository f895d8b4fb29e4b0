//! Synthetic eye scenes: exactness of the concentric estimator on projected
//! circles and symmetry of the plain-center bias.

use std::path::PathBuf;

use conic_center::concentric::EXACT_TOL;
use conic_center::eyesim::{
    evaluate_cell, fixation_targets, project_scene, Estimator, EyeScene, SweepOptions, TargetCircle,
};
use conic_center::io::{Experiment, SweepConfig};
use conic_center::concentric_center_ratio;
use nalgebra::Vector3;

fn bundled(name: &str) -> SweepConfig {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "configs", name].iter().collect();
    SweepConfig::read(&path).unwrap()
}

/// Every scene a bundled config evaluates, in sweep order.
fn scenes(cfg: &SweepConfig) -> Vec<EyeScene> {
    let base = &cfg.scene;
    match &cfg.experiment {
        Experiment::Camera { phi_deg, theta_deg } => phi_deg
            .iter()
            .flat_map(|&phi| theta_deg.iter().map(move |&theta| EyeScene { phi, theta, ..base.clone() }))
            .collect(),
        Experiment::PupilSize {
            pupil_radii_mm,
            n_targets,
            targets,
        } => {
            let aim = base.pupil_center();
            let targets = fixation_targets(*n_targets, targets.radius, targets.center);
            pupil_radii_mm
                .iter()
                .flat_map(|&r| {
                    targets.iter().map(move |t| EyeScene {
                        pupil_radius: r,
                        gaze_direction: (t - base.eyeball_center).normalize(),
                        aim_point: Some(aim),
                        ..base.clone()
                    })
                })
                .collect()
        }
    }
}

fn assert_exact(name: &str, expected_cells: usize) {
    let cfg = bundled(name);
    let scenes = scenes(&cfg);
    assert_eq!(scenes.len(), expected_cells);
    for s in &scenes {
        let truth = project_scene(s).unwrap();
        let cr = concentric_center_ratio(&truth.pupil_conic, &truth.iris_conic, EXACT_TOL).unwrap();
        assert!((cr.center - truth.true_center).norm() <= 1e-6, "{s:?}");
        let ratio = s.iris_radius / s.pupil_radius;
        assert!((cr.ratio / ratio - 1.0).abs() <= 1e-8, "{} vs {ratio}", cr.ratio);
    }
    // The sweep reports the same exactness per cell.
    for r in cfg.run().unwrap() {
        assert!(r.err_ours.unwrap() <= 1e-6, "{r:?}");
    }
}

#[test]
fn camera_sweep_is_exact_in_every_cell() {
    assert_exact("camera_sweep.json", 20);
}

#[test]
fn pupil_size_sweep_is_exact_in_every_cell() {
    assert_exact("pupil_size_sweep.json", 108);
}

#[test]
fn plain_center_error_is_mirror_symmetric() {
    // Camera in the vertical plane x = 0 and targets mirrored in x.
    let base = EyeScene {
        gaze_direction: Vector3::z(),
        phi: 20.0,
        theta: 0.0,
        ..EyeScene::default()
    };
    let opts = SweepOptions {
        estimators: vec![Estimator::Euclidean],
        ..SweepOptions::default()
    };
    let aim = base.pupil_center();
    // Smaller than the bundled circle so every view stays inside the frame.
    let circle = TargetCircle {
        radius: 50.0,
        ..TargetCircle::default()
    };
    let targets = fixation_targets(36, circle.radius, circle.center);
    let err = |t: nalgebra::Point3<f64>| {
        let s = EyeScene {
            gaze_direction: (t - base.eyeball_center).normalize(),
            aim_point: Some(aim),
            ..base.clone()
        };
        evaluate_cell(&s, 0, &opts).err_euclidean.unwrap()
    };
    for t in targets {
        let mirrored = nalgebra::Point3::new(2.0 * circle.center.x - t.x, t.y, t.z);
        let (a, b) = (err(t), err(mirrored));
        assert!((a - b).abs() <= 1e-9, "{t}: {a} vs {b}");
    }
}
