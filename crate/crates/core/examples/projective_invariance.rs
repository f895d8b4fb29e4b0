//! Concentric circles under random homographies: the recovered center tracks
//! the mapped true center and the ratio does not change.
//!
//! `cargo run --example projective_invariance`

use conic_center::concentric::EXACT_TOL;
use conic_center::{
    concentric_center_ratio, ellipse_to_conic, random_homography, transform_conic, transform_point, EllipseGeom,
};
use nalgebra::Point2;

fn main() -> conic_center::Result<()> {
    let center = Point2::new(2.5, -1.0);
    let (r, big_r) = (0.8, 3.2);
    let inner = ellipse_to_conic(&EllipseGeom::circle(center.x, center.y, r)?);
    let outer = ellipse_to_conic(&EllipseGeom::circle(center.x, center.y, big_r)?);

    println!("seed  cond(H)     center error  ratio");
    for seed in 0..8 {
        let h = random_homography(seed, 1e3);
        let cr = concentric_center_ratio(&transform_conic(&inner, &h)?, &transform_conic(&outer, &h)?, EXACT_TOL)?;
        let truth = transform_point(&center, &h)?;
        println!(
            "{seed:>4}  {:>9.2}  {:>12.2e}  {:.12}",
            h.condition_number(),
            (cr.center - truth).norm(),
            cr.ratio
        );
    }
    println!("constructed R/r = {}", big_r / r);
    Ok(())
}
