//! The conic pencil −λQ₁ + Q₂ degenerates at the eigenvalues of Q₂Q₁⁻¹; the
//! distinguished member is the common center as a point conic.
//!
//! `cargo run --example pencil_degenerate`

use conic_center::concentric::{degenerate_point, pencil_eigenvalues};
use conic_center::{ellipse_to_conic, pencil_conic, random_homography, transform_conic, EllipseGeom};

fn main() -> conic_center::Result<()> {
    let h = random_homography(3, 100.0);
    let q1 = transform_conic(&ellipse_to_conic(&EllipseGeom::circle(1.0, 1.0, 1.0)?), &h)?;
    let q2 = transform_conic(&ellipse_to_conic(&EllipseGeom::circle(1.0, 1.0, 2.5)?), &h)?;

    let eig = pencil_eigenvalues(&q1, &q2)?;
    println!("eigenvalues of Q2 Q1^-1: {:?}", eig.values);
    println!("lambda3 / lambda1 = {:.12} (R^2/r^2 = 6.25)", eig.values[2] / eig.values[0]);
    for (i, &lambda) in eig.values.iter().enumerate() {
        let member = pencil_conic(&q1, &q2, lambda)?;
        println!("lambda{} = {lambda:+.9}: det = {:+.2e}", i + 1, member.determinant());
    }
    let point = degenerate_point(&pencil_conic(&q1, &q2, eig.values[2])?);
    println!("singular point of the distinguished member: ({:.9}, {:.9})", point.x / point.z, point.y / point.z);
    Ok(())
}
