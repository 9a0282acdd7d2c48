//! Shortest paths under a bound on the discrete curvature.
//!
//! The sample is a ring of radius 1 plus a bent chord through its interior.
//! The chord is shorter but kinks sharply at its apex, so a tight bound
//! pushes the path onto the ring and a tighter one leaves no path at all.

use std::f64::consts::TAU;

use geoknot::geometry::{Curvature, Point};
use geoknot::graph::{build_graph_from_points, GraphKind};
use geoknot::paths::ConstrainedSolver;
use geoknot::Result;

fn main() -> Result<()> {
    let mut pts: Vec<Point> = (0..60)
        .map(|k| {
            let t = TAU * k as f64 / 60.0;
            Point::xy(t.cos(), t.sin())
        })
        .collect();
    pts.extend((1..20).map(|k| {
        let x = 1.0 - 0.1 * k as f64;
        Point::xy(x, 0.3 * (1.0 - x.abs()))
    }));
    let g = build_graph_from_points(&pts, GraphKind::Ball { r: 0.15 })?;
    let solver = ConstrainedSolver::new(&g, &pts)?;

    let (from, to) = (0, 30);
    for kappa in [f64::INFINITY, 10.0, 2.0, 0.5] {
        let k = Curvature::new(kappa)?;
        let res = solver.shortest(k, from, to)?;
        println!(
            "kappa = {:>5}: length {:>8.4}, {:>2} nodes, max curvature {:.3}, feasible {}",
            k.to_string(),
            res.length,
            res.nodes.len(),
            res.max_interior_curvature.value(),
            res.feasible
        );
    }
    Ok(())
}
