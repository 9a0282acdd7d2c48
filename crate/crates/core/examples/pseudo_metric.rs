//! Distances between arbitrary points of the plane, routed through the
//! nearest sample points of a disk sample.

use geoknot::geometry::Curvature;
use geoknot::graph::{build_graph, GraphKind};
use geoknot::paths::{nearest_set, pseudo_metric};
use geoknot::surfaces::{sample_surface, SamplingMode, SurfaceSpec};
use geoknot::Result;

fn main() -> Result<()> {
    let sample = sample_surface(&SurfaceSpec::disk(1.0), SamplingMode::Grid, 400, 0)?;
    let g = build_graph(&sample, GraphKind::Ball { r: 0.25 })?;
    let pts = sample.points();
    let x = [-0.53, 0.12];
    let y = [0.61, -0.35];
    println!("nearest to x: {:?}, nearest to y: {:?}", nearest_set(pts, &x)?, nearest_set(pts, &y)?);
    println!("straight line      : {:.4}", geoknot::geometry::distance(&x, &y));
    println!("graph pseudo-metric: {:.4}", pseudo_metric(pts, &g, &x, &y, None)?);
    let k = Curvature::new(2.0)?;
    println!("with curvature <= 2: {:.4}", pseudo_metric(pts, &g, &x, &y, Some(k))?);
    // Both points share the nearest sample point, so their distance is 0.
    println!("x vs x + 1e-3      : {}", pseudo_metric(pts, &g, &x, &[x[0] + 1e-3, x[1]], None)?);
    Ok(())
}
