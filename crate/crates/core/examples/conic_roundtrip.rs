//! Ellipse parameters to conic matrix and back.
//!
//! `cargo run --example conic_roundtrip`

use conic_center::conic::conic_is_degenerate;
use conic_center::{conic_to_ellipse, ellipse_to_conic, normalize_conic, EllipseGeom};

fn main() -> conic_center::Result<()> {
    let e = EllipseGeom::new(3.0, -2.0, 2.0, 1.0, 0.7)?;
    let q = ellipse_to_conic(&e);
    println!("ellipse:    {e:?}");
    println!("conic:      {:?}", q.coefficients());
    println!("normalized: {:?}", normalize_conic(&q).coefficients());
    println!("degenerate: {}", conic_is_degenerate(&q, 1e-10));
    let back = conic_to_ellipse(&q)?;
    println!("round trip: {back:?}");

    // Axes given in the wrong order are swapped and theta turned by 90°.
    println!("canonical:  {:?}", EllipseGeom::new(0.0, 0.0, 1.0, 2.0, 0.0)?);
    Ok(())
}
