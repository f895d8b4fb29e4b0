//! Direct least-squares ellipse fit on noisy, partly occluded boundary points.
//!
//! `cargo run --example fit_ellipse`

use std::f64::consts::FRAC_PI_2;

use conic_center::{fit_ellipse, sample_ellipse_boundary, ArcInterval, EllipseGeom};

fn main() -> conic_center::Result<()> {
    let truth = EllipseGeom::new(0.0, 0.0, 3.0, 1.5, 0.4)?;
    println!("truth: {truth:?}");
    for (label, occlusion) in [("full boundary", None), ("90° arc occluded", Some(ArcInterval::new(0.0, FRAC_PI_2)))] {
        for sigma in [0.0, 0.1, 0.5] {
            let sample = sample_ellipse_boundary(&truth, 100, sigma, occlusion, 1)?;
            let fit = fit_ellipse(&sample)?;
            println!(
                "{label:<17} sigma {sigma:.1}: {} points, center error {:.3e}, a {:.4}, b {:.4}",
                sample.len(),
                (fit.center() - truth.center()).norm(),
                fit.a(),
                fit.b()
            );
        }
    }
    Ok(())
}
