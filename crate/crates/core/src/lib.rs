//! Geodesic distances on surfaces estimated from point samples through
//! neighbourhood graphs, with and without a bound on the discrete
//! curvature of paths, plus harnesses that check the approximation
//! bounds against surfaces whose geodesics are known in closed form.

pub mod error;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod paths;
pub mod surfaces;
pub mod validation;

pub use error::{Error, Result};
pub use geometry::{Curvature, Point};
pub use graph::{build_graph, graph_stats, GraphKind, NeighborhoodGraph};
pub use paths::{constrained_shortest, dijkstra, shortest_path, ConstrainedSolver, PathResult};
pub use surfaces::{sample_surface, SampleSet, SamplingMode, SurfaceSpec};
