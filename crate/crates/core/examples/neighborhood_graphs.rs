//! Ball and annulus graphs over a sphere sample, with degree statistics.

use geoknot::graph::{build_graph, graph_stats, GraphKind};
use geoknot::surfaces::{sample_surface, SamplingMode, SurfaceSpec};
use geoknot::Result;

fn main() -> Result<()> {
    let sample = sample_surface(&SurfaceSpec::sphere(1.0), SamplingMode::Uniform, 5000, 7)?;
    for kind in [
        GraphKind::Ball { r: 0.1 },
        GraphKind::Ball { r: 0.2 },
        GraphKind::Annulus { r: 0.2, alpha: 0.25 },
    ] {
        let g = build_graph(&sample, kind)?;
        let s = graph_stats(&g);
        println!(
            "{kind:?}: {} edges, degree {}..{} (mean {:.1}), {} component(s)",
            s.edges, s.min_degree, s.max_degree, s.mean_degree, s.components
        );
    }
    Ok(())
}
