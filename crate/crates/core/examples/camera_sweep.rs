//! Camera orbiting the eye: pupil-center errors over the φ × θ grid.
//!
//! `cargo run --release --example camera_sweep [-- out.csv]`

use conic_center::eyesim::{mean_of, run_camera_sweep, write_records_csv, EyeScene, SweepOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let phi = [10.0, 20.0, 30.0, 40.0];
    let theta = [30.0, 40.0, 50.0, 60.0, 70.0];
    let records = run_camera_sweep(&EyeScene::default(), &phi, &theta, &SweepOptions::default())?;

    println!("theta  mean err_ours  mean err_euclidean  mean err_fit");
    for t in theta {
        let cells: Vec<_> = records.iter().filter(|r| r.theta_deg == t).collect();
        let mean = |f: fn(&&conic_center::eyesim::ExperimentRecord) -> Option<f64>| mean_of(cells.iter().map(f));
        println!(
            "{t:>5}  {:>13.2e}  {:>18.3}  {:>12.3}",
            mean(|r| r.err_ours).unwrap_or(f64::NAN),
            mean(|r| r.err_euclidean).unwrap_or(f64::NAN),
            mean(|r| r.err_fit).unwrap_or(f64::NAN),
        );
    }
    if let Some(path) = std::env::args().nth(1) {
        write_records_csv(&records, std::fs::File::create(&path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
