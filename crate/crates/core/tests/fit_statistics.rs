//! Seeded Monte-Carlo checks of the ellipse-fit baseline.

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use conic_center::io::{parse_points_csv, write_points_csv};
use conic_center::{fit_ellipse, sample_ellipse_boundary, ArcInterval, EllipseGeom};

/// 99th percentile of the fitted-center error over seeds 0..1000 for 100
/// points of `truth()` with σ = 0.5, rounded up and frozen.
const CENTER_P99_FULL: f64 = 0.24;
/// Same with the arc `[0, π/2)` occluded.
const CENTER_P99_OCCLUDED: f64 = 0.48;

fn truth() -> EllipseGeom {
    EllipseGeom::new(0.0, 0.0, 3.0, 1.5, 0.4).unwrap()
}

fn quarter() -> Option<ArcInterval> {
    Some(ArcInterval::new(0.0, FRAC_PI_2))
}

fn center_error(n: usize, occlusion: Option<ArcInterval>, seed: u64) -> f64 {
    let s = sample_ellipse_boundary(&truth(), n, 0.5, occlusion, seed).unwrap();
    (fit_ellipse(&s).unwrap().center() - truth().center()).norm()
}

fn p99(occlusion: Option<ArcInterval>) -> f64 {
    let mut errs: Vec<f64> = (0..1000).map(|s| center_error(100, occlusion, s)).collect();
    errs.sort_by(f64::total_cmp);
    errs[989]
}

#[test]
fn frozen_bounds_match_the_monte_carlo_oracle() {
    let (full, occluded) = (p99(None), p99(quarter()));
    assert!(full <= CENTER_P99_FULL && full > 0.9 * CENTER_P99_FULL, "{full}");
    assert!(occluded <= CENTER_P99_OCCLUDED && occluded > 0.9 * CENTER_P99_OCCLUDED, "{occluded}");
}

#[test]
fn noisy_fit_seed_one_is_within_bound() {
    assert!(center_error(100, None, 1) <= CENTER_P99_FULL);
    assert!(center_error(100, quarter(), 1) <= CENTER_P99_OCCLUDED);
}

#[test]
fn occlusion_increases_fit_error() {
    // Dense sampling: with 100 points the gap between the two error
    // distributions is too small for a 95% per-seed win rate.
    let wins = (0..500)
        .filter(|&s| center_error(400, quarter(), s) > center_error(400, None, s))
        .count();
    assert!(wins >= 475, "{wins}/500");
}

#[test]
fn occluded_fixture_is_reproducible() {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", "occluded_seed1.csv"].iter().collect();
    let sample = sample_ellipse_boundary(&truth(), 100, 0.5, quarter(), 1).unwrap();
    let mut regenerated = Vec::new();
    write_points_csv(sample.points(), &mut regenerated).unwrap();
    if std::env::var_os("REGENERATE_FIXTURES").is_some() {
        std::fs::write(&path, &regenerated).unwrap();
    }
    let stored = std::fs::read(&path).expect("fixture; rerun with REGENERATE_FIXTURES=1");
    assert_eq!(stored, regenerated);
    assert_eq!(parse_points_csv(stored.as_slice()).unwrap(), sample.points());
}
