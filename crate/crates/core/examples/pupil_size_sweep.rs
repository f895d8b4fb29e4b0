//! Fixed camera, eye following 36 targets, for pupil radii of 1, 2 and 3 mm.
//!
//! `cargo run --release --example pupil_size_sweep [-- out.csv]`

use conic_center::eyesim::{
    mean_of, run_pupil_size_sweep, write_records_csv, EyeScene, SweepOptions, TargetCircle,
};
use nalgebra::Vector3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = EyeScene {
        gaze_direction: Vector3::z(),
        ..EyeScene::default()
    };
    let radii = [1.0, 2.0, 3.0];
    let records = run_pupil_size_sweep(&base, &radii, 36, &TargetCircle::default(), &SweepOptions::default())?;

    println!("radius  mean err_ours  mean err_euclidean  mean err_fit  ours <= euclidean");
    for r in radii {
        let cells: Vec<_> = records.iter().filter(|c| c.pupil_radius_mm == r).collect();
        let wins = cells
            .iter()
            .filter(|c| matches!((c.err_ours, c.err_euclidean), (Some(o), Some(e)) if o <= e))
            .count();
        println!(
            "{r:>6}  {:>13.2e}  {:>18.3}  {:>12.3}  {wins}/{}",
            mean_of(cells.iter().map(|c| c.err_ours)).unwrap_or(f64::NAN),
            mean_of(cells.iter().map(|c| c.err_euclidean)).unwrap_or(f64::NAN),
            mean_of(cells.iter().map(|c| c.err_fit)).unwrap_or(f64::NAN),
            cells.len()
        );
    }
    if let Some(path) = std::env::args().nth(1) {
        write_records_csv(&records, std::fs::File::create(&path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
