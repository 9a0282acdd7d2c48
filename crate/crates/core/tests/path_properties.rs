use geoknot::geometry::{Curvature, Point};
use geoknot::graph::{build_graph, build_graph_from_points, GraphKind};
use geoknot::paths::{brute_force_constrained, dijkstra, pseudo_metric, ConstrainedSolver};
use geoknot::surfaces::{sample_surface, SamplingMode, SurfaceSpec};
use proptest::prelude::*;

fn curvature() -> impl Strategy<Value = Curvature> {
    prop_oneof![
        Just(Curvature::INFINITE),
        Just(Curvature::ZERO),
        (0.05f64..30.0).prop_map(|k| Curvature::new(k).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_state_search_matches_exhaustive_search(
        coords in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..=8),
        r in 0.2f64..1.2,
        k in curvature(),
    ) {
        let pts: Vec<Point> = coords.iter().map(|&(x, y)| Point::xy(x, y)).collect();
        let g = build_graph_from_points(&pts, GraphKind::Ball { r }).unwrap();
        let solver = ConstrainedSolver::new(&g, &pts).unwrap();
        let n = pts.len();
        for s in 0..n {
            for t in 0..n {
                let fast = solver.shortest(k, s, t).unwrap();
                let slow = brute_force_constrained(&g, &pts, k, s, t, n + 3).unwrap();
                prop_assert_eq!(fast.length, slow);
                prop_assert_eq!(fast.feasible, slow.is_finite());
            }
        }
    }

    #[test]
    fn ball_constrained_and_annulus_distances_are_ordered(
        seed in any::<u64>(),
        r in 0.25f64..0.6,
        alpha in 0.0f64..0.25,
        k in curvature(),
    ) {
        let sample = sample_surface(&SurfaceSpec::sphere(1.0), SamplingMode::Uniform, 150, seed).unwrap();
        let ball = build_graph(&sample, GraphKind::Ball { r }).unwrap();
        let annulus = build_graph(&sample, GraphKind::Annulus { r, alpha }).unwrap();
        let on_ball = ConstrainedSolver::new(&ball, sample.points()).unwrap();
        let on_annulus = ConstrainedSolver::new(&annulus, sample.points()).unwrap();
        let field = dijkstra(&ball, 0).unwrap();
        for t in (1..150).step_by(13) {
            let d_r = field.dist[t];
            let d_rk = on_ball.shortest(k, 0, t).unwrap().length;
            let d_rak = on_annulus.shortest(k, 0, t).unwrap().length;
            prop_assert!(d_r <= d_rk && d_rk <= d_rak, "{d_r} {d_rk} {d_rak}");
        }
    }

    #[test]
    fn pseudo_metric_is_zero_on_shared_nearest_point(seed in any::<u64>(), dx in -1e-3f64..1e-3) {
        let sample = sample_surface(&SurfaceSpec::disk(1.0), SamplingMode::Uniform, 100, seed).unwrap();
        let g = build_graph(&sample, GraphKind::Ball { r: 0.4 }).unwrap();
        let p = &sample.points()[3];
        let x = [p[0] + dx, p[1]];
        let y = [p[0], p[1] - dx];
        prop_assert_eq!(pseudo_metric(sample.points(), &g, &x, &y, None).unwrap(), 0.0);
    }
}
