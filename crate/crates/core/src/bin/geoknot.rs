use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use geoknot::geometry::Curvature;
use geoknot::graph::{build_graph_from_points, GraphKind};
use geoknot::io::{read_graph, read_points, write_graph, write_sample};
use geoknot::paths::{shortest_path, ConstrainedSolver};
use geoknot::surfaces::{sample_surface, SamplingMode, SurfaceSpec};
use geoknot::validation::{
    verify_constrained_lower, verify_constrained_upper, verify_curvature_consistency, verify_minlength,
    verify_unconstrained_lower, verify_unconstrained_upper, ConstrainedUpperParams, CurveSpec, EpsilonUse,
    RadiusRule, RunOptions, SampleConfig,
};
use geoknot::{Error, Result};

#[derive(Parser)]
#[command(name = "geoknot", version, about = "Geodesic distances from neighbourhood graphs of surface samples")]
struct Cli {
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, env = "GEOKNOT_THREADS", default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a surface and write points plus a JSON sidecar.
    Sample(SampleArgs),
    /// Build a ball or annulus graph over a points file.
    Graph(GraphArgs),
    /// Shortest path between two sample points, printed as JSON.
    Dist(DistArgs),
    /// Run a validation experiment described by a JSON config.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SurfaceKind {
    Sphere,
    Disk,
    Cylinder,
    Circle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Grid,
    Uniform,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    surface: SurfaceKind,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Cylinder height.
    #[arg(long)]
    height: Option<f64>,
    /// Ambient dimension of the disk (2 or 3).
    #[arg(long, default_value_t = 2)]
    ambient_dim: usize,
    #[arg(long, value_enum, default_value = "grid")]
    mode: Mode,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ball,
    Annulus,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    src: usize,
    #[arg(long)]
    dst: usize,
    /// Curvature bound; `inf` or omitted for the unconstrained distance.
    #[arg(long)]
    kappa: Option<Curvature>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    kappa: Option<Curvature>,
    #[arg(long)]
    kappa_prime: Option<Curvature>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Self-test: shrink edge weights by (1 - p) in lower-bound experiments
    /// and stretch them by 1/(1 - p) in upper-bound ones.
    #[arg(long)]
    perturb_weights: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Experiment {
    UnconstrainedUpper,
    UnconstrainedLower,
    ConstrainedUpper,
    ConstrainedLower,
    Minlength,
    CurvatureConsistency,
}

impl Experiment {
    fn is_lower(self) -> bool {
        matches!(self, Experiment::UnconstrainedLower | Experiment::ConstrainedLower)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfig {
    experiment: Experiment,
    surface: Option<SurfaceSpec>,
    #[serde(default = "default_mode")]
    mode: SamplingMode,
    n: Option<usize>,
    n_sequence: Option<Vec<usize>>,
    r: Option<f64>,
    /// Alternative to `r`: the radius as a multiple of ε̂.
    r_epsilon_multiple: Option<f64>,
    alpha: Option<f64>,
    kappa: Option<Curvature>,
    kappa_prime: Option<Curvature>,
    #[serde(default = "default_pairs")]
    pairs: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_pair_seed")]
    pair_seed: u64,
    #[serde(default)]
    epsilon: EpsilonUse,
    #[serde(default = "default_c_emp")]
    c_emp: f64,
    #[serde(default = "default_c_gate")]
    c_gate: f64,
    #[serde(default = "default_reference_factor")]
    reference_factor: usize,
    arclengths: Option<Vec<f64>>,
    #[serde(default)]
    sphere_arcs: usize,
    curve: Option<CurveSpec>,
    s: Option<f64>,
    h_sequence: Option<Vec<f64>>,
    out_csv: Option<PathBuf>,
    out_json: Option<PathBuf>,
}

fn default_mode() -> SamplingMode {
    SamplingMode::Grid
}
fn default_pairs() -> usize {
    200
}
fn default_pair_seed() -> u64 {
    1
}
fn default_c_emp() -> f64 {
    8.0
}
fn default_c_gate() -> f64 {
    20.0
}
fn default_reference_factor() -> usize {
    10
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::Sample(a) => cmd_sample(a).map(|_| true),
        Command::Graph(a) => cmd_graph(a).map(|_| true),
        Command::Dist(a) => cmd_dist(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn cmd_sample(a: SampleArgs) -> Result<()> {
    let surface = match a.surface {
        SurfaceKind::Sphere => SurfaceSpec::Sphere { radius: a.radius },
        SurfaceKind::Disk => SurfaceSpec::Disk { radius: a.radius, ambient_dim: a.ambient_dim },
        SurfaceKind::Cylinder => SurfaceSpec::Cylinder {
            radius: a.radius,
            height: a.height.ok_or_else(|| Error::Invalid("cylinder needs --height".into()))?,
        },
        SurfaceKind::Circle => SurfaceSpec::Circle { radius: a.radius },
    };
    let mode = match a.mode {
        Mode::Grid => SamplingMode::Grid,
        Mode::Uniform => SamplingMode::Uniform,
    };
    let sample = sample_surface(&surface, mode, a.n, a.seed)?;
    write_sample(&a.out, &sample)
}

fn cmd_graph(a: GraphArgs) -> Result<()> {
    let kind = match (a.kind, a.alpha) {
        (Kind::Ball, None) => GraphKind::Ball { r: a.r },
        (Kind::Ball, Some(_)) => return Err(Error::Invalid("--alpha conflicts with --kind ball".into())),
        (Kind::Annulus, Some(alpha)) => GraphKind::Annulus { r: a.r, alpha },
        (Kind::Annulus, None) => return Err(Error::Invalid("--kind annulus needs --alpha".into())),
    };
    let points = read_points(&a.points)?;
    let g = build_graph_from_points(&points, kind)?;
    write_graph(&a.out, &g)
}

fn cmd_dist(a: DistArgs) -> Result<()> {
    let points = read_points(&a.points)?;
    let g = read_graph(&a.graph, points.len())?;
    let result = match a.kappa.filter(|k| k.is_finite()) {
        None => shortest_path(&g, &points, a.src, a.dst)?,
        Some(k) => ConstrainedSolver::new(&g, &points)?.shortest(k, a.src, a.dst)?,
    };
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    let text = std::fs::read_to_string(&a.config)?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&text)?;
    if let Some(n) = a.n {
        cfg.n = Some(n);
        cfg.n_sequence = None;
    }
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    if let Some(r) = a.r {
        cfg.r = Some(r);
        cfg.r_epsilon_multiple = None;
    }
    cfg.alpha = a.alpha.or(cfg.alpha);
    cfg.kappa = a.kappa.or(cfg.kappa);
    cfg.kappa_prime = a.kappa_prime.or(cfg.kappa_prime);
    cfg.pairs = a.pairs.unwrap_or(cfg.pairs);
    cfg.out_csv = a.out_csv.or(cfg.out_csv);
    cfg.out_json = a.out_json.or(cfg.out_json);

    let weight_factor = match a.perturb_weights {
        None => 1.0,
        Some(p) if (0.0..1.0).contains(&p) => {
            if cfg.experiment.is_lower() {
                1.0 - p
            } else {
                1.0 / (1.0 - p)
            }
        }
        Some(p) => return Err(Error::Invalid(format!("--perturb-weights must lie in [0, 1), got {p}"))),
    };
    for path in [&cfg.out_csv, &cfg.out_json].into_iter().flatten() {
        check_writable(path)?;
    }
    run_experiment(&cfg, weight_factor)
}

fn check_writable(path: &Path) -> Result<()> {
    File::create(path).map(|_| ()).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn require<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::Invalid(format!("config lacks `{name}`")))
}

fn run_experiment(cfg: &ExperimentConfig, weight_factor: f64) -> Result<bool> {
    let opts = RunOptions { pairs: cfg.pairs, pair_seed: cfg.pair_seed, epsilon_use: cfg.epsilon, weight_factor };
    let sample_cfg = |n: usize| -> Result<SampleConfig> {
        Ok(SampleConfig {
            surface: require(&cfg.surface, "surface")?,
            mode: cfg.mode,
            n,
            seed: cfg.seed,
            reference_factor: cfg.reference_factor,
        })
    };
    let sizes = || -> Result<Vec<usize>> {
        match (&cfg.n_sequence, cfg.n) {
            (Some(seq), _) if !seq.is_empty() => Ok(seq.clone()),
            (_, Some(n)) => Ok(vec![n]),
            _ => Err(Error::Invalid("config lacks `n` or `n_sequence`".into())),
        }
    };
    let radius = || -> Result<RadiusRule> {
        match (cfg.r, cfg.r_epsilon_multiple) {
            (Some(_), Some(_)) => Err(Error::Invalid("`r` and `r_epsilon_multiple` are exclusive".into())),
            (Some(r), None) => Ok(RadiusRule::Fixed(r)),
            (None, Some(m)) => Ok(RadiusRule::EpsilonMultiple(m)),
            (None, None) => Err(Error::Invalid("config lacks `r`".into())),
        }
    };
    if let (Some(alpha), Experiment::ConstrainedUpper | Experiment::ConstrainedLower) = (cfg.alpha, cfg.experiment) {
        if alpha > 0.25 {
            return Err(Error::Gate { gate: "alpha_le_quarter", detail: format!("alpha = {alpha} exceeds 1/4") });
        }
    }

    let report = match cfg.experiment {
        Experiment::UnconstrainedUpper => {
            verify_unconstrained_upper(&sample_cfg(sizes()?[0])?, radius()?, &opts)?
        }
        Experiment::UnconstrainedLower => {
            verify_unconstrained_lower(&sample_cfg(sizes()?[0])?, radius()?, &opts)?
        }
        Experiment::ConstrainedUpper => {
            let ns = sizes()?;
            let params = ConstrainedUpperParams {
                kappa_prime: cfg.kappa_prime,
                c_emp: cfg.c_emp,
                ..ConstrainedUpperParams::new(require(&cfg.r, "r")?, require(&cfg.alpha, "alpha")?, require(&cfg.kappa, "kappa")?)
            };
            verify_constrained_upper(&sample_cfg(ns[0])?, &ns, &params, &opts)?
        }
        Experiment::ConstrainedLower => {
            let ns = sizes()?;
            verify_constrained_lower(
                &sample_cfg(ns[0])?,
                &ns,
                require(&cfg.r, "r")?,
                require(&cfg.alpha, "alpha")?,
                require(&cfg.kappa, "kappa")?,
                cfg.c_gate,
                &opts,
            )?
        }
        Experiment::Minlength => {
            let kappa = require(&cfg.kappa, "kappa")?
                .finite()
                .filter(|k| *k > 0.0)
                .ok_or_else(|| Error::Invalid("kappa must be finite and > 0".into()))?;
            let arcs = require(&cfg.arclengths, "arclengths")?;
            let report = verify_minlength(kappa, &arcs, cfg.sphere_arcs, cfg.seed)?;
            if let Some(path) = &cfg.out_csv {
                write_rows(path, &report.rows)?;
            }
            return finish_json(cfg, &report, report.violations == 0);
        }
        Experiment::CurvatureConsistency => {
            let curve = require(&cfg.curve, "curve")?;
            let hs = require(&cfg.h_sequence, "h_sequence")?;
            let report = verify_curvature_consistency(curve, cfg.s.unwrap_or(0.0), &hs)?;
            if let Some(path) = &cfg.out_csv {
                write_rows(path, &report.rows)?;
            }
            return finish_json(cfg, &report, report.passed());
        }
    };
    if let Some(path) = &cfg.out_csv {
        report.write_csv(path)?;
    }
    if let Some(path) = &cfg.out_json {
        report.write_summary(path)?;
    }
    println!("{}", serde_json::to_string_pretty(&report.summary)?);
    Ok(report.passed())
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn finish_json<T: Serialize>(cfg: &ExperimentConfig, report: &T, passed: bool) -> Result<bool> {
    let text = serde_json::to_string_pretty(report)?;
    match &cfg.out_json {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(passed)
}
