//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use geoknot::geometry::{discrete_curvature, distance, Curvature, Point};
use geoknot::graph::{build_graph, build_graph_brute_force, build_graph_from_points, GraphKind};
use geoknot::paths::{brute_force_constrained, dijkstra, ConstrainedSolver};
use geoknot::surfaces::{sample_surface, SamplingMode, SurfaceSpec};
use geoknot::validation::{
    great_circle_point, random_great_circle, verify_constrained_lower, verify_constrained_upper,
    verify_curvature_consistency, verify_minlength, verify_unconstrained_lower, verify_unconstrained_upper,
    ConstrainedUpperParams, CurveSpec, EpsilonUse, RadiusRule, RunOptions, SampleConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sphere_cfg(n: usize) -> SampleConfig {
    SampleConfig::new(SurfaceSpec::sphere(1.0), SamplingMode::Grid, n, 42)
}

fn estimated(pairs: usize) -> RunOptions {
    RunOptions { pairs, pair_seed: 7, epsilon_use: EpsilonUse::Estimated, weight_factor: 1.0 }
}

fn kappa(v: f64) -> Curvature {
    Curvature::new(v).unwrap()
}

fn unconstrained_upper(elapsed: &dyn Fn() -> Duration) -> Outcome {
    let report = verify_unconstrained_upper(&sphere_cfg(2000), RadiusRule::EpsilonMultiple(4.0), &estimated(200))
        .expect("run");
    let info = &report.samples[0];
    let factor = 1.0 + 4.0 * info.epsilon.epsilon / info.r;
    let all_within = report.rows.iter().all(|r| r.graph <= factor * r.oracle);
    let secs = elapsed().as_secs_f64();
    outcome(
        report.passed() && all_within && report.summary.pairs == 200 && secs < 30.0,
        format!(
            "N={} eps={:.4} r={:.4} pairs={} violations={} max ratio {:.4} <= {:.4}, {secs:.1}s",
            info.n,
            info.epsilon.epsilon,
            info.r,
            report.summary.pairs,
            report.summary.violations,
            report.summary.max_ratio.unwrap_or(f64::NAN),
            factor
        ),
    )
}

fn unconstrained_lower(_: &dyn Fn() -> Duration) -> Outcome {
    let report = verify_unconstrained_lower(&sphere_cfg(2000), RadiusRule::Fixed(0.3), &estimated(200)).expect("run");
    let bound = 1.0 + PI * PI / 50.0 * 0.09;
    let connected = report.rows.iter().filter(|r| r.pass.is_some()).count();
    let all_within = report.rows.iter().filter(|r| r.graph.is_finite()).all(|r| r.oracle <= bound * r.graph);
    outcome(
        report.passed() && all_within && connected > 0,
        format!(
            "connected pairs={connected} violations={} min ratio {:.5}, factor {bound:.5}",
            report.summary.violations,
            report.summary.min_ratio.unwrap_or(f64::NAN)
        ),
    )
}

fn minimum_length(elapsed: &dyn Fn() -> Duration) -> Outcome {
    let arcs: Vec<f64> = (1..=50).map(|k| k as f64 * PI / 50.0).collect();
    let report = verify_minlength(1.0, &arcs, 0, 0).expect("run");
    let worst = report.rows.iter().map(|r| (r.chord - r.bound).abs()).fold(0.0, f64::max);
    let secs = elapsed().as_secs_f64();
    outcome(
        report.rows.len() == 50 && report.violations == 0 && worst <= 1e-12 && secs < 1.0,
        format!("50 arcs, max |chord - bound| = {worst:e}, {secs:.3}s"),
    )
}

fn curvature_consistency(_: &dyn Fn() -> Duration) -> Outcome {
    let hs = [1e-1, 1e-2, 1e-3];
    let circle = verify_curvature_consistency(CurveSpec::Circle { radius: 1.0 }, 0.7, &hs).expect("circle");
    let helix = verify_curvature_consistency(CurveSpec::Helix { radius: 1.0, pitch: 0.5 }, 1.0, &hs).expect("helix");
    let errs = |rows: &[geoknot::validation::CurvatureRow]| {
        rows.iter().map(|r| format!("{:.2e}", r.error)).collect::<Vec<_>>().join(" ")
    };
    let monotone = circle.rows.windows(2).all(|w| w[1].error < w[0].error);
    let circle_small = circle.rows[2].error < 1e-3;
    let helix_small = helix.rows[2].error < 1e-3;
    outcome(
        monotone && circle_small && helix_small,
        format!(
            "circle errors [{}] decreasing={monotone} small={circle_small}; helix errors [{}] small={helix_small}",
            errs(&circle.rows),
            errs(&helix.rows)
        ),
    )
}

fn oracle_equivalence(elapsed: &dyn Fn() -> Duration) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut queries = 0;
    let mut mismatches = Vec::new();
    for graph_id in 0..200 {
        let n = rng.random_range(2..=8);
        let dim = rng.random_range(2..=3);
        let pts: Vec<Point> = (0..n)
            .map(|_| Point::new((0..dim).map(|_| rng.random::<f64>()).collect()).unwrap())
            .collect();
        let r = rng.random_range(0.3..1.2);
        let g = build_graph_from_points(&pts, GraphKind::Ball { r }).unwrap();
        let k = match rng.random_range(0..10) {
            0 => Curvature::INFINITE,
            1 => Curvature::ZERO,
            _ => kappa(10f64.powf(rng.random_range(-1.0..1.5))),
        };
        let solver = ConstrainedSolver::new(&g, &pts).unwrap();
        for s in 0..n {
            for t in 0..n {
                let fast = solver.shortest(k, s, t).unwrap();
                let slow = brute_force_constrained(&g, &pts, k, s, t, n + 3).unwrap();
                queries += 1;
                if fast.length != slow || fast.feasible != slow.is_finite() {
                    mismatches.push(format!("graph {graph_id} ({s},{t}) k={k}: {} vs {slow}", fast.length));
                }
            }
        }
    }
    let secs = elapsed().as_secs_f64();
    outcome(
        mismatches.is_empty() && secs < 10.0,
        format!(
            "200 graphs, {queries} queries, {} mismatches{}, {secs:.2}s",
            mismatches.len(),
            mismatches.first().map_or(String::new(), |m| format!(" (first: {m})"))
        ),
    )
}

fn ordering(_: &dyn Fn() -> Duration) -> Outcome {
    let sphere = SurfaceSpec::sphere(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut failures = 0;
    let mut strict = 0;
    for inst in 0..50 {
        let sample = sample_surface(&sphere, SamplingMode::Uniform, 300, 1000 + inst).unwrap();
        let r = rng.random_range(0.25..0.5);
        let alpha = rng.random_range(0.0..0.25);
        let k = kappa(rng.random_range(0.5..10.0));
        let (i, j) = (rng.random_range(0..300), rng.random_range(0..300));
        let ball = build_graph(&sample, GraphKind::Ball { r }).unwrap();
        let annulus = build_graph(&sample, GraphKind::Annulus { r, alpha }).unwrap();
        let d_r = dijkstra(&ball, i).unwrap().dist[j];
        let d_rk = ConstrainedSolver::new(&ball, sample.points()).unwrap().shortest(k, i, j).unwrap().length;
        let d_rak = ConstrainedSolver::new(&annulus, sample.points()).unwrap().shortest(k, i, j).unwrap().length;
        if !(d_r <= d_rk && d_rk <= d_rak) {
            failures += 1;
        }
        if d_r < d_rk || d_rk < d_rak {
            strict += 1;
        }
    }
    outcome(failures == 0, format!("50 instances, {failures} violations, {strict} with a strict gap"))
}

fn constrained_upper(_: &dyn Fn() -> Duration) -> Outcome {
    let p = ConstrainedUpperParams::new(0.5, 0.25, kappa(1.0));
    let report = verify_constrained_upper(&sphere_cfg(1000), &[1000, 4000], &p, &estimated(20)).expect("run");
    let fitted: Vec<String> = report.summary.fitted.iter().map(|(k, v)| format!("{k}={v:.4}")).collect();
    let failed: Vec<&str> = report.summary.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    outcome(
        report.passed(),
        format!(
            "violations={} failed checks {:?}; {}",
            report.summary.violations,
            failed,
            fitted.join(" ")
        ),
    )
}

fn constrained_lower(_: &dyn Fn() -> Duration) -> Outcome {
    let report = verify_constrained_lower(
        &sphere_cfg(1000),
        &[1000, 4000, 16000],
        0.25,
        0.25,
        kappa(1.0),
        20.0,
        &estimated(50),
    )
    .expect("run");
    let all_finite = report.rows.iter().all(|r| r.ratio.is_finite());
    let fitted: Vec<String> = report.summary.fitted.iter().map(|(k, v)| format!("{k}={v:.4}")).collect();
    outcome(
        report.passed() && all_finite,
        format!("all curvatures finite={all_finite}; {}", fitted.join(" ")),
    )
}

fn shortest_arc(_: &dyn Fn() -> Duration) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for _ in 0..1000 {
        let (p, t) = random_great_circle(&mut rng);
        let mut s: [f64; 3] = [rng.random_range(0.0..=PI), rng.random_range(0.0..=PI), rng.random_range(0.0..=PI)];
        s.sort_by(f64::total_cmp);
        let [x, y, z] = s.map(|si| great_circle_point(&p, &t, si));
        if distance(&x, &z) > 2.0 {
            continue;
        }
        let c = discrete_curvature(&x, &y, &z).unwrap().value();
        worst = worst.max(c);
        if c > 1.0 + 1e-9 {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("1000 triples, {bad} above 1 + 1e-9, max curvature {worst:.12}"))
}

fn spatial_index(_: &dyn Fn() -> Duration) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut mismatches = 0;
    for _ in 0..100 {
        let n = rng.random_range(2..=1000);
        let dim = rng.random_range(2..=3);
        let pts: Vec<Point> = (0..n)
            .map(|_| Point::new((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap())
            .collect();
        let kind = if rng.random_bool(0.5) {
            GraphKind::Ball { r: rng.random_range(0.01..0.6) }
        } else {
            GraphKind::Annulus { r: rng.random_range(0.01..0.6), alpha: rng.random_range(0.0..0.9) }
        };
        let fast = build_graph_from_points(&pts, kind).unwrap();
        let slow = build_graph_brute_force(&pts, kind).unwrap();
        let a: Vec<_> = fast.edges().map(|(i, e)| (i, e.to)).collect();
        let b: Vec<_> = slow.edges().map(|(i, e)| (i, e.to)).collect();
        if a != b {
            mismatches += 1;
        }
    }
    let sample = sample_surface(&SurfaceSpec::sphere(1.0), SamplingMode::Uniform, 100_000, 5).unwrap();
    let t = Instant::now();
    let g = build_graph(&sample, GraphKind::Ball { r: 0.05 }).unwrap();
    let build = t.elapsed().as_secs_f64();
    let timing = if build < 5.0 { "within" } else { "over (soft)" };
    outcome(
        mismatches == 0,
        format!(
            "100 configurations, {mismatches} mismatched edge sets; 1e5-point sphere graph ({} edges) built in {build:.2}s, {timing} the 5 s threshold",
            g.edge_count()
        ),
    )
}

type Criterion = (&'static str, fn(&dyn Fn() -> Duration) -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("unconstrained upper bound", unconstrained_upper),
        ("unconstrained lower bound", unconstrained_lower),
        ("minimum length equality on the circle", minimum_length),
        ("discrete curvature consistency", curvature_consistency),
        ("constrained oracle equivalence", oracle_equivalence),
        ("distance ordering", ordering),
        ("constrained upper bound", constrained_upper),
        ("constrained lower bound behaviour", constrained_lower),
        ("shortest-arc curvature", shortest_arc),
        ("spatial index correctness", spatial_index),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let elapsed = || start.elapsed();
        let o = run(&elapsed);
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {}",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
