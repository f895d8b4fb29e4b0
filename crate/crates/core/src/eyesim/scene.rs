use nalgebra::{Matrix3, Point2, Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::conic::{conic_to_ellipse, ConicMatrix};
use crate::error::{Error, Result};
use crate::projective::{transform_conic, transform_point, Homography};

/// Views more oblique than this (angle between the iris-plane normal and the
/// direction to the camera) are rejected as edge-on.
pub const MAX_VIEW_ANGLE_DEG: f64 = 85.0;

/// Eye, camera and intrinsics of one synthetic frame.
///
/// World axes: `x` to the subject's side, `y` up, `z` forward out of the
/// face. The camera sits on a sphere of radius `camera_distance` around the
/// eyeball center in direction `(cos φ sin θ, −sin φ, cos φ cos θ)`, so `φ`
/// is the angle below the horizontal plane and `θ` the azimuth from straight
/// ahead. It looks at the pupil center unless `aim_point` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EyeScene {
    pub eyeball_center: Point3<f64>,
    pub eyeball_radius: f64,
    pub iris_radius: f64,
    pub pupil_radius: f64,
    pub gaze_direction: Vector3<f64>,
    pub camera_distance: f64,
    pub phi: f64,
    pub theta: f64,
    pub focal_length: f64,
    pub image_size: (f64, f64),
    pub principal_point: (f64, f64),
    pub aim_point: Option<Point3<f64>>,
}

impl Default for EyeScene {
    fn default() -> Self {
        Self {
            eyeball_center: Point3::origin(),
            eyeball_radius: 12.0,
            iris_radius: 6.0,
            pupil_radius: 2.0,
            gaze_direction: gaze_from_angles(10.0, 10.0),
            camera_distance: 30.0,
            phi: 20.0,
            theta: 30.0,
            focal_length: 600.0,
            image_size: (640.0, 480.0),
            principal_point: (320.0, 240.0),
            aim_point: None,
        }
    }
}

/// Unit gaze turned `yaw_deg` toward `+x` and `pitch_deg` downward from
/// straight ahead.
pub fn gaze_from_angles(yaw_deg: f64, pitch_deg: f64) -> Vector3<f64> {
    let (y, p) = (yaw_deg.to_radians(), pitch_deg.to_radians());
    Vector3::new(p.cos() * y.sin(), -p.sin(), p.cos() * y.cos())
}

impl EyeScene {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.eyeball_radius,
            self.iris_radius,
            self.pupil_radius,
            self.camera_distance,
            self.phi,
            self.theta,
            self.focal_length,
            self.image_size.0,
            self.image_size.1,
            self.principal_point.0,
            self.principal_point.1,
        ]
        .iter()
        .chain(self.eyeball_center.iter())
        .chain(self.gaze_direction.iter())
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidScene("non-finite parameter".into()));
        }
        if !(0.0 < self.pupil_radius && self.pupil_radius < self.iris_radius && self.iris_radius < self.eyeball_radius) {
            return Err(Error::InvalidScene(format!(
                "need 0 < pupil ({}) < iris ({}) < eyeball ({}) radius",
                self.pupil_radius, self.iris_radius, self.eyeball_radius
            )));
        }
        if (self.gaze_direction.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidScene("gaze direction must have unit norm".into()));
        }
        if !(self.camera_distance > self.eyeball_radius) {
            return Err(Error::InvalidScene("camera must be outside the eyeball".into()));
        }
        if !(self.focal_length > 0.0 && self.image_size.0 > 0.0 && self.image_size.1 > 0.0) {
            return Err(Error::InvalidScene("focal length and image size must be positive".into()));
        }
        Ok(())
    }

    /// Distance from the eyeball center to the iris plane.
    pub fn iris_plane_offset(&self) -> f64 {
        (self.eyeball_radius.powi(2) - self.iris_radius.powi(2)).sqrt()
    }

    pub fn pupil_center(&self) -> Point3<f64> {
        self.eyeball_center + self.gaze_direction * self.iris_plane_offset()
    }

    /// Unit direction from the eyeball center to the camera.
    pub fn camera_direction(&self) -> Vector3<f64> {
        let (p, t) = (self.phi.to_radians(), self.theta.to_radians());
        Vector3::new(p.cos() * t.sin(), -p.sin(), p.cos() * t.cos())
    }

    pub fn camera_center(&self) -> Point3<f64> {
        self.eyeball_center + self.camera_direction() * self.camera_distance
    }

    /// Angle between the gaze and the direction from the pupil to the camera.
    /// Positive when turning the camera direction into the gaze is a
    /// counter-clockwise turn about world `+y`.
    pub fn gaze_angle_deg(&self) -> f64 {
        let to_camera = (self.camera_center() - self.pupil_center()).normalize();
        let g = self.gaze_direction;
        let angle = g.dot(&to_camera).clamp(-1.0, 1.0).acos().to_degrees();
        if to_camera.cross(&g).y < 0.0 {
            -angle
        } else {
            angle
        }
    }

    /// World-to-camera rotation, rows are the camera axes. The image `y` axis
    /// points down.
    fn camera_rotation(&self) -> Result<Matrix3<f64>> {
        let c = self.camera_center();
        let target = self.aim_point.unwrap_or_else(|| self.pupil_center());
        let z = target - c;
        let down = -Vector3::y();
        let x = down.cross(&z);
        if !(z.norm() > 0.0 && x.norm() > 1e-9 * z.norm()) {
            return Err(Error::InvalidScene("camera looks straight up or down".into()));
        }
        let z = z.normalize();
        let x = x.normalize();
        let y = z.cross(&x);
        Ok(Matrix3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]))
    }

    /// Homography from iris-plane coordinates (mm, origin at the pupil
    /// center) to image pixels.
    pub fn plane_homography(&self) -> Result<Homography> {
        let g = self.gaze_direction;
        let u = Vector3::y().cross(&g);
        if !(u.norm() > 1e-9) {
            return Err(Error::InvalidScene("gaze is vertical".into()));
        }
        let u = u.normalize();
        let v = g.cross(&u);
        let offset = self.pupil_center() - self.camera_center();
        let k = Matrix3::new(
            self.focal_length,
            0.0,
            self.principal_point.0,
            0.0,
            self.focal_length,
            self.principal_point.1,
            0.0,
            0.0,
            1.0,
        );
        Homography::new(k * self.camera_rotation()? * Matrix3::from_columns(&[u, v, offset]))
    }
}

/// Exact image-space ground truth of a scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneTruth {
    pub pupil_conic: ConicMatrix,
    pub iris_conic: ConicMatrix,
    pub true_center: Point2<f64>,
}

/// Projects pupil and iris circles and the pupil center into the image.
pub fn project_scene(s: &EyeScene) -> Result<SceneTruth> {
    s.validate()?;
    let to_camera = (s.camera_center() - s.pupil_center()).normalize();
    let angle_deg = s.gaze_direction.dot(&to_camera).clamp(-1.0, 1.0).acos().to_degrees();
    if !(angle_deg < MAX_VIEW_ANGLE_DEG) {
        return Err(Error::DegenerateView { angle_deg });
    }

    let h = s.plane_homography()?;
    let circle = |r: f64| ConicMatrix::from_diagonal(1.0, 1.0, -r * r);
    let pupil_conic = transform_conic(&circle(s.pupil_radius)?, &h)?;
    let iris_conic = transform_conic(&circle(s.iris_radius)?, &h)?;
    let true_center = transform_point(&Point2::origin(), &h)?;

    let (w, hgt) = s.image_size;
    for q in [&pupil_conic, &iris_conic] {
        let e = conic_to_ellipse(q).map_err(|_| Error::DegenerateView { angle_deg })?;
        let (dx, dy) = e.half_extents();
        let inside = e.cx() - dx >= 0.0 && e.cx() + dx <= w && e.cy() - dy >= 0.0 && e.cy() + dy <= hgt;
        if !inside {
            return Err(Error::OutOfFrame);
        }
    }
    Ok(SceneTruth {
        pupil_conic,
        iris_conic,
        true_center,
    })
}

/// `n` targets evenly spaced on a circle in the vertical plane `z = const`
/// through `circle_center`, starting at `+x` and turning toward `+y`.
pub fn fixation_targets(n: usize, circle_radius: f64, circle_center: Point3<f64>) -> Vec<Point3<f64>> {
    (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            circle_center + Vector3::new(t.cos(), t.sin(), 0.0) * circle_radius
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concentric::{concentric_center_ratio, EXACT_TOL};
    use crate::fitting::euclidean_center;

    fn fronto_parallel() -> EyeScene {
        EyeScene {
            gaze_direction: Vector3::z(),
            phi: 0.0,
            theta: 0.0,
            ..EyeScene::default()
        }
    }

    #[test]
    fn default_scene_is_valid() {
        EyeScene::default().validate().unwrap();
        project_scene(&EyeScene::default()).unwrap();
    }

    #[test]
    fn fronto_parallel_view_is_symmetric() {
        let truth = project_scene(&fronto_parallel()).unwrap();
        assert!((truth.true_center - Point2::new(320.0, 240.0)).norm() < 1e-12);
        let pupil = conic_to_ellipse(&truth.pupil_conic).unwrap();
        assert!((euclidean_center(&pupil) - truth.true_center).norm() < 1e-9);
        assert!((pupil.a() - pupil.b()).abs() < 1e-9);
        // r · f / depth with depth = 30 − √108.
        let depth = 30.0 - 108f64.sqrt();
        assert!((pupil.a() - 2.0 * 600.0 / depth).abs() < 1e-9);
    }

    #[test]
    fn exact_recovery_on_default_scene() {
        let s = EyeScene::default();
        let truth = project_scene(&s).unwrap();
        assert!(truth.pupil_conic.eval(&truth.true_center) < 0.0);
        let cr = concentric_center_ratio(&truth.pupil_conic, &truth.iris_conic, EXACT_TOL).unwrap();
        assert!((cr.center - truth.true_center).norm() < 1e-6);
        assert!((cr.ratio - 3.0).abs() < 3e-8);
    }

    #[test]
    fn euclidean_gap_grows_with_pupil_radius() {
        // Straight-ahead gaze; bisect the camera azimuth until the camera axis
        // is 30° off the gaze.
        let scene_at = |theta: f64, r: f64| EyeScene {
            pupil_radius: r,
            gaze_direction: Vector3::z(),
            phi: 0.0,
            theta,
            ..EyeScene::default()
        };
        let (mut lo, mut hi) = (0.0, 60.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if scene_at(mid, 2.0).gaze_angle_deg().abs() < 30.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((scene_at(lo, 2.0).gaze_angle_deg().abs() - 30.0).abs() < 1e-9);
        let gaps: Vec<f64> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&r| {
                let truth = project_scene(&scene_at(lo, r)).unwrap();
                let e = conic_to_ellipse(&truth.pupil_conic).unwrap();
                (euclidean_center(&e) - truth.true_center).norm()
            })
            .collect();
        assert!(gaps[0] > 0.0);
        assert!(gaps.windows(2).all(|w| w[0] < w[1]), "{gaps:?}");
    }

    #[test]
    fn edge_on_and_out_of_frame() {
        let edge_on = EyeScene {
            gaze_direction: Vector3::z(),
            phi: 0.0,
            theta: 88.0,
            ..EyeScene::default()
        };
        assert!(matches!(project_scene(&edge_on), Err(Error::DegenerateView { .. })));

        let tiny_sensor = EyeScene {
            image_size: (100.0, 100.0),
            principal_point: (50.0, 50.0),
            ..fronto_parallel()
        };
        assert_eq!(project_scene(&tiny_sensor), Err(Error::OutOfFrame));
    }

    #[test]
    fn invalid_scenes() {
        let bad = EyeScene {
            pupil_radius: 7.0,
            ..EyeScene::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidScene(_))));
        let bad = EyeScene {
            gaze_direction: Vector3::new(0.0, 0.0, 2.0),
            ..EyeScene::default()
        };
        assert!(bad.validate().is_err());
        let bad = EyeScene {
            camera_distance: 10.0,
            ..EyeScene::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn fixation_target_spacing() {
        let four = fixation_targets(4, 1.0, Point3::origin());
        let want = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (p, (x, y)) in four.iter().zip(want) {
            assert!((p - Point3::new(x, y, 0.0)).norm() < 1e-15);
        }

        let many = fixation_targets(36, 1.0, Point3::origin());
        let angles: Vec<f64> = many.iter().map(|p| p.y.atan2(p.x).rem_euclid(std::f64::consts::TAU)).collect();
        for w in angles.windows(2) {
            assert!((w[1] - w[0] - 10f64.to_radians()).abs() < 1e-12);
        }

        let one = fixation_targets(1, 5.0, Point3::new(0.0, 0.0, 500.0));
        assert_eq!(one, vec![Point3::new(5.0, 0.0, 500.0)]);
    }
}
