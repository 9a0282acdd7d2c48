//! Graph distances against exact great-circle distances on the unit sphere.

use geoknot::graph::{build_graph, GraphKind};
use geoknot::paths::dijkstra;
use geoknot::surfaces::{geodesic_oracle, hausdorff_epsilon, sample_surface, SamplingMode, SurfaceSpec};
use geoknot::Result;

fn main() -> Result<()> {
    let sphere = SurfaceSpec::sphere(1.0);
    for n in [500, 2000, 8000] {
        let sample = sample_surface(&sphere, SamplingMode::Grid, n, 0)?;
        let eps = hausdorff_epsilon(&sample, 10 * sample.len())?.epsilon;
        let r = 4.0 * eps;
        let g = build_graph(&sample, GraphKind::Ball { r })?;
        let field = dijkstra(&g, 0)?;
        let pts = sample.points();
        let worst = (1..sample.len())
            .filter(|&j| field.dist[j].is_finite())
            .map(|j| field.dist[j] / geodesic_oracle(&sphere, &pts[0], &pts[j]).unwrap())
            .fold(0.0, f64::max);
        println!(
            "N = {:>5}  eps = {eps:.4}  r = {r:.4}  max graph/geodesic = {worst:.4}  (bound {:.1})",
            sample.len(),
            1.0 + 4.0 * eps / r
        );
    }
    Ok(())
}
