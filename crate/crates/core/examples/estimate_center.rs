//! Recover the pupil center and R/r from a pupil and an iris ellipse.
//!
//! `cargo run --example estimate_center`

use conic_center::concentric::FITTED_TOL;
use conic_center::eyesim::{project_scene, EyeScene};
use conic_center::{concentric_center_ratio, conic_to_ellipse, euclidean_center};

fn main() -> conic_center::Result<()> {
    let scene = EyeScene::default();
    let truth = project_scene(&scene)?;
    let pupil = conic_to_ellipse(&truth.pupil_conic)?;
    let iris = conic_to_ellipse(&truth.iris_conic)?;
    println!("pupil ellipse: {pupil:?}");
    println!("iris ellipse:  {iris:?}");

    let cr = concentric_center_ratio(&truth.pupil_conic, &truth.iris_conic, FITTED_TOL)?;
    let naive = euclidean_center(&pupil);
    println!("true center:      ({:.6}, {:.6})", truth.true_center.x, truth.true_center.y);
    println!("recovered center: ({:.6}, {:.6})", cr.center.x, cr.center.y);
    println!("ellipse center:   ({:.6}, {:.6})", naive.x, naive.y);
    println!(
        "ratio {:.9} (iris/pupil radius {}), concentricity {:.2e}",
        cr.ratio,
        scene.iris_radius / scene.pupil_radius,
        cr.concentricity
    );
    println!(
        "errors: recovered {:.2e} px, ellipse center {:.3} px",
        (cr.center - truth.true_center).norm(),
        (naive - truth.true_center).norm()
    );
    Ok(())
}
