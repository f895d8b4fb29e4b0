//! Pupil-center and radius-ratio recovery from the perspective images of two
//! concentric circles.
//!
//! Given the image conics of a pupil and an iris, the projected circle center
//! is the distinguished eigenvector direction of the pencil `Q₂ Q₁⁻¹`, and the
//! radius ratio follows from its eigenvalues. Neither depends on camera
//! intrinsics or pose.
//!
//! The crate is organized bottom-up:
//!
//! - [`conic`]: ellipse geometry, conic matrices, normalization
//! - [`projective`]: homographies acting on points and conics
//! - [`concentric`]: the center and ratio estimator
//! - [`fitting`]: direct least-squares ellipse fitting and boundary sampling
//! - [`eyesim`]: a synthetic eye and camera used to compare estimators
//! - [`io`] and [`cli`]: file formats and the `conic-center` command
//!
//! Each capability has a runnable example under `examples/`, e.g.
//! `cargo run --example estimate_center`.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod concentric;
pub mod conic;
pub mod eigen;
pub mod error;
pub mod eyesim;
pub mod fitting;
pub mod io;

pub use concentric::{concentric_center_ratio, concentricity_check, pencil_conic, CenterRatio};
pub use conic::{conic_to_ellipse, ellipse_to_conic, normalize_conic, ConicMatrix, EllipseGeom};
pub use error::{Error, Result};
pub use fitting::{euclidean_center, fit_ellipse, sample_ellipse_boundary, ArcInterval, BoundarySample};
pub use projective::{random_homography, transform_conic, transform_point, Homography};

pub mod projective;
