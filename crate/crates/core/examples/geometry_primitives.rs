//! Discrete curvature, the wedge norm and the minimum-length chord bound.

use geoknot::geometry::{angle, chord_lower_bound, discrete_curvature, phi, wedge_norm};
use geoknot::Result;

fn main() -> Result<()> {
    let (x, y, z) = ([0.0, 0.0], [1.0, 0.0], [1.0, 1.0]);
    println!("right-angle corner: curv = {}", discrete_curvature(&x, &y, &z)?);
    println!("straight triple:    curv = {}", discrete_curvature(&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0])?);
    println!("acute turn:         curv = {}", discrete_curvature(&[0.0, 0.0], &[1.0, 0.0], &[0.2, 0.3])?);

    let u = [1.0, 0.0, 0.0];
    let v = [1.0, 1.0, 0.0];
    println!("|u ^ v| = {}, angle = {:.6} rad", wedge_norm(&u, &v), angle(&u, &v)?);

    for s in [0.5, 1.0, std::f64::consts::PI] {
        println!("arc {s:.4} on curvature <= 1: chord >= {:.6}", chord_lower_bound(1.0, s)?);
    }
    println!("phi(a=0.5, c=1, kappa=1) = {:.6}", phi(0.5, 1.0, 1.0)?);
    Ok(())
}
