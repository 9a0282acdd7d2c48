//! Test surfaces with exact geodesic distances, samplers, and the
//! one-sided Hausdorff estimate of sample density.

use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, dot, norm, wedge_norm, Curvature, Point};
use crate::graph::SpatialIndex;

/// Tolerance, relative to the surface scale, for "point lies on the surface".
pub const ON_SURFACE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceSpec {
    /// Sphere of the given radius centred at the origin of ℝ³.
    Sphere { radius: f64 },
    /// Closed disk centred at the origin, in ℝ² or in the `z = 0` plane of ℝ³.
    Disk {
        radius: f64,
        #[serde(default = "default_disk_dim")]
        ambient_dim: usize,
    },
    /// Lateral surface `x² + y² = R²`, `0 ≤ z ≤ height`.
    Cylinder { radius: f64, height: f64 },
    /// Circle of the given radius centred at the origin of ℝ².
    Circle { radius: f64 },
}

fn default_disk_dim() -> usize {
    2
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceSpec::Sphere { radius } => write!(f, "sphere(R={radius})"),
            SurfaceSpec::Disk { radius, ambient_dim } => {
                write!(f, "disk(rho={radius},D={ambient_dim})")
            }
            SurfaceSpec::Cylinder { radius, height } => {
                write!(f, "cylinder(R={radius},h={height})")
            }
            SurfaceSpec::Circle { radius } => write!(f, "circle(R={radius})"),
        }
    }
}

impl SurfaceSpec {
    pub fn sphere(radius: f64) -> Self {
        SurfaceSpec::Sphere { radius }
    }

    pub fn disk(radius: f64) -> Self {
        SurfaceSpec::Disk { radius, ambient_dim: 2 }
    }

    pub fn cylinder(radius: f64, height: f64) -> Self {
        SurfaceSpec::Cylinder { radius, height }
    }

    pub fn circle(radius: f64) -> Self {
        SurfaceSpec::Circle { radius }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        match *self {
            SurfaceSpec::Sphere { radius } | SurfaceSpec::Circle { radius } => {
                positive("radius", radius)
            }
            SurfaceSpec::Disk { radius, ambient_dim } => {
                positive("radius", radius)?;
                if ambient_dim == 2 || ambient_dim == 3 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("disk ambient_dim must be 2 or 3, got {ambient_dim}")))
                }
            }
            SurfaceSpec::Cylinder { radius, height } => {
                positive("radius", radius)?;
                positive("height", height)
            }
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match *self {
            SurfaceSpec::Sphere { .. } | SurfaceSpec::Cylinder { .. } => 3,
            SurfaceSpec::Disk { ambient_dim, .. } => ambient_dim,
            SurfaceSpec::Circle { .. } => 2,
        }
    }

    pub fn intrinsic_dim(&self) -> usize {
        match self {
            SurfaceSpec::Circle { .. } => 1,
            _ => 2,
        }
    }

    /// Bound on the curvature of shortest paths on the surface.
    pub fn curvature_bound(&self) -> f64 {
        match *self {
            SurfaceSpec::Sphere { radius }
            | SurfaceSpec::Cylinder { radius, .. }
            | SurfaceSpec::Circle { radius } => 1.0 / radius,
            SurfaceSpec::Disk { .. } => 0.0,
        }
    }

    /// Area (length for the circle).
    pub fn measure(&self) -> f64 {
        match *self {
            SurfaceSpec::Sphere { radius } => 4.0 * PI * radius * radius,
            SurfaceSpec::Disk { radius, .. } => PI * radius * radius,
            SurfaceSpec::Cylinder { radius, height } => TAU * radius * height,
            SurfaceSpec::Circle { radius } => TAU * radius,
        }
    }

    /// Largest intrinsic distance between two points of the surface.
    pub fn intrinsic_diameter(&self) -> f64 {
        match *self {
            SurfaceSpec::Sphere { radius } | SurfaceSpec::Circle { radius } => PI * radius,
            SurfaceSpec::Disk { radius, .. } => 2.0 * radius,
            SurfaceSpec::Cylinder { radius, height } => (height * height + (PI * radius).powi(2)).sqrt(),
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            SurfaceSpec::Sphere { radius }
            | SurfaceSpec::Disk { radius, .. }
            | SurfaceSpec::Circle { radius } => radius,
            SurfaceSpec::Cylinder { radius, height } => radius.max(height),
        }
    }

    /// Distance-like residual of `p` from the surface's defining equations.
    pub fn residual(&self, p: &[f64]) -> Result<f64> {
        if p.len() != self.ambient_dim() {
            return Err(Error::domain(format!(
                "point of dimension {} on a surface in R^{}",
                p.len(),
                self.ambient_dim()
            )));
        }
        Ok(match *self {
            SurfaceSpec::Sphere { radius } | SurfaceSpec::Circle { radius } => {
                (norm(p) - radius).abs()
            }
            SurfaceSpec::Disk { radius, ambient_dim } => {
                let planar = p[0].hypot(p[1]);
                let out = (planar - radius).max(0.0);
                if ambient_dim == 3 {
                    out.max(p[2].abs())
                } else {
                    out
                }
            }
            SurfaceSpec::Cylinder { radius, height } => {
                let radial = (p[0].hypot(p[1]) - radius).abs();
                let axial = (-p[2]).max(p[2] - height).max(0.0);
                radial.max(axial)
            }
        })
    }

    pub fn check_on_surface(&self, p: &[f64]) -> Result<()> {
        let res = self.residual(p)?;
        if res > ON_SURFACE_TOL * self.scale().max(1.0) {
            return Err(Error::domain(format!(
                "point {p:?} is {res:e} away from {self}"
            )));
        }
        Ok(())
    }

    /// Exact intrinsic distance between two points of the surface.
    pub fn geodesic(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_on_surface(x)?;
        self.check_on_surface(y)?;
        Ok(match *self {
            SurfaceSpec::Sphere { radius } | SurfaceSpec::Circle { radius } => {
                // atan2 keeps full precision near 0 and π, where arccos does not.
                radius * wedge_norm(x, y).atan2(dot(x, y))
            }
            SurfaceSpec::Disk { .. } => distance(x, y),
            SurfaceSpec::Cylinder { radius, .. } => {
                let dtheta = y[1].atan2(y[0]) - x[1].atan2(x[0]);
                let dz = y[2] - x[2];
                (-2..=2)
                    .map(|k| dz.hypot(radius * (dtheta + TAU * k as f64)))
                    .fold(f64::INFINITY, f64::min)
            }
        })
    }

    /// Curvature-constrained intrinsic distance, available only when
    /// `kappa` is at least the surface's curvature bound, where it equals
    /// the unconstrained distance. `Ok(None)` marks "no oracle".
    pub fn constrained_geodesic(&self, kappa: Curvature, x: &[f64], y: &[f64]) -> Result<Option<f64>> {
        let d = self.geodesic(x, y)?;
        Ok((kappa.value() >= self.curvature_bound()).then_some(d))
    }
}

/// Exact intrinsic distance on `spec`.
pub fn geodesic_oracle(spec: &SurfaceSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    spec.geodesic(x, y)
}

/// See [`SurfaceSpec::constrained_geodesic`].
pub fn constrained_oracle(
    spec: &SurfaceSpec,
    kappa: Curvature,
    x: &[f64],
    y: &[f64],
) -> Result<Option<f64>> {
    spec.constrained_geodesic(kappa, x, y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Deterministic near-uniform grid.
    Grid,
    /// Seeded i.i.d. draws, uniform w.r.t. the surface measure.
    #[serde(alias = "uniform-random", alias = "random")]
    Uniform,
}

impl std::str::FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(SamplingMode::Grid),
            "uniform" | "uniform-random" | "random" => Ok(SamplingMode::Uniform),
            _ => Err(Error::invalid(format!("unknown sampling mode {s:?}"))),
        }
    }
}

/// An ordered sample of surface points. Index `i` names point `i` for the
/// whole pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    points: Vec<Point>,
    surface: SurfaceSpec,
    seed: u64,
    mode: SamplingMode,
}

impl SampleSet {
    /// Assembles a sample, checking that every point lies on the surface.
    pub fn from_parts(points: Vec<Point>, surface: SurfaceSpec, seed: u64, mode: SamplingMode) -> Result<Self> {
        surface.validate()?;
        for p in &points {
            surface.check_on_surface(p)?;
        }
        Ok(SampleSet { points, surface, seed, mode })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn surface(&self) -> &SurfaceSpec {
        &self.surface
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.surface.ambient_dim()
    }

    /// A copy with extra points appended (all checked on the surface).
    pub fn extended(&self, extra: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut points = self.points.clone();
        points.extend(extra);
        SampleSet::from_parts(points, self.surface.clone(), self.seed, self.mode)
    }
}

/// Samples `n` points of `spec`.
///
/// Grid mode picks the grid resolution closest to `n` and returns that
/// grid, so its size is only approximately `n`:
/// * sphere: integer points of the octahedron `|a|+|b|+|c| = f` projected
///   radially, `4f² + 2` points (`f = 1` is the octahedron itself);
/// * disk: the `m × m` lattice on `[-ρ, ρ]²` intersected with the disk;
/// * cylinder: a `nθ × nz` lattice with both rims included;
/// * circle: `n` equally spaced points.
///
/// Uniform mode returns exactly `n` points, reproducible from `seed`.
pub fn sample_surface(spec: &SurfaceSpec, mode: SamplingMode, n: usize, seed: u64) -> Result<SampleSet> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::invalid(format!("sample size must be >= 2, got {n}")));
    }
    let points = match mode {
        SamplingMode::Grid => grid_points(spec, n),
        SamplingMode::Uniform => uniform_points(spec, n, seed),
    };
    let points = points
        .into_iter()
        .map(Point::new)
        .collect::<Result<Vec<_>>>()?;
    SampleSet::from_parts(points, spec.clone(), seed, mode)
}

fn grid_points(spec: &SurfaceSpec, n: usize) -> Vec<Vec<f64>> {
    match *spec {
        SurfaceSpec::Sphere { radius } => {
            let f = (((n as f64 - 2.0) / 4.0).max(1.0).sqrt().round() as i64).max(1);
            octahedral_grid(f, radius)
        }
        SurfaceSpec::Disk { radius, ambient_dim } => {
            let m = ((n as f64).sqrt().round() as usize).max(2);
            disk_lattice(m, radius, ambient_dim)
        }
        SurfaceSpec::Cylinder { radius, height } => {
            let spacing = (TAU * radius * height / n as f64).sqrt();
            let n_theta = ((TAU * radius / spacing).round() as usize).max(3);
            let n_z = ((height / spacing).round() as usize + 1).max(2);
            let mut pts = Vec::with_capacity(n_theta * n_z);
            for j in 0..n_z {
                let z = height * j as f64 / (n_z - 1) as f64;
                for i in 0..n_theta {
                    let t = TAU * i as f64 / n_theta as f64;
                    pts.push(vec![radius * t.cos(), radius * t.sin(), z]);
                }
            }
            pts
        }
        SurfaceSpec::Circle { radius } => (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                vec![radius * t.cos(), radius * t.sin()]
            })
            .collect(),
    }
}

fn octahedral_grid(f: i64, radius: f64) -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity((4 * f * f + 2) as usize);
    for a in -f..=f {
        let rest = f - a.abs();
        for b in -rest..=rest {
            let c = rest - b.abs();
            let cs: &[i64] = if c == 0 { &[0] } else { &[-c, c] };
            for &c in cs {
                let v = [a as f64, b as f64, c as f64];
                let l = norm(&v);
                pts.push(v.iter().map(|x| radius * x / l).collect());
            }
        }
    }
    pts
}

fn disk_lattice(m: usize, radius: f64, ambient_dim: usize) -> Vec<Vec<f64>> {
    let step = 2.0 * radius / (m - 1) as f64;
    let mut pts = Vec::new();
    for i in 0..m {
        let y = -radius + step * i as f64;
        for j in 0..m {
            let x = -radius + step * j as f64;
            if x * x + y * y <= radius * radius * (1.0 + 1e-12) {
                let mut p = vec![x, y];
                if ambient_dim == 3 {
                    p.push(0.0);
                }
                pts.push(p);
            }
        }
    }
    pts
}

fn uniform_points(spec: &SurfaceSpec, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| uniform_point(spec, &mut rng)).collect()
}

pub(crate) fn uniform_point<R: Rng + ?Sized>(spec: &SurfaceSpec, rng: &mut R) -> Vec<f64> {
    match *spec {
        SurfaceSpec::Sphere { radius } => loop {
            let g: [f64; 3] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let l = norm(&g);
            if l > 1e-12 {
                break g.iter().map(|x| radius * x / l).collect();
            }
        },
        SurfaceSpec::Disk { radius, ambient_dim } => {
            let rho = radius * rng.random::<f64>().sqrt();
            let t = TAU * rng.random::<f64>();
            let mut p = vec![rho * t.cos(), rho * t.sin()];
            if ambient_dim == 3 {
                p.push(0.0);
            }
            p
        }
        SurfaceSpec::Cylinder { radius, height } => {
            let t = TAU * rng.random::<f64>();
            let z = height * rng.random::<f64>();
            vec![radius * t.cos(), radius * t.sin(), z]
        }
        SurfaceSpec::Circle { radius } => {
            let t = TAU * rng.random::<f64>();
            vec![radius * t.cos(), radius * t.sin()]
        }
    }
}

/// Dense deterministic grid used as the stand-in for the whole surface
/// when estimating ε. For the disk the boundary circle is added, since
/// the lattice alone misses it.
pub fn reference_grid(spec: &SurfaceSpec, n: usize) -> Result<Vec<Point>> {
    spec.validate()?;
    let mut pts = grid_points(spec, n.max(2));
    if let SurfaceSpec::Disk { radius, ambient_dim } = *spec {
        let m = ((n as f64).sqrt().round() as usize).max(2);
        let ring = 2 * m;
        for i in 0..ring {
            let t = TAU * i as f64 / ring as f64;
            let mut p = vec![radius * t.cos(), radius * t.sin()];
            if ambient_dim == 3 {
                p.push(0.0);
            }
            pts.push(p);
        }
    }
    pts.into_iter().map(Point::new).collect()
}

/// Estimated sample density ε̂ = max over a reference grid of the distance
/// to the nearest sample point.
///
/// ε̂ underestimates ε = sup over the whole surface and converges to it
/// from below as the reference grid is refined. By the triangle
/// inequality ε ≤ ε̂ + (covering radius of the reference grid), and
/// `resolution` (the largest nearest-neighbour spacing within the grid)
/// stands in for that covering radius; [`EpsilonEstimate::inflated`]
/// adds it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonEstimate {
    #[serde(with = "crate::io::serde_inf")]
    pub epsilon: f64,
    pub reference_size: usize,
    pub resolution: f64,
}

impl EpsilonEstimate {
    pub fn inflated(&self) -> f64 {
        self.epsilon + self.resolution
    }
}

/// ε̂ for `sample` against a reference grid of about `reference_n` points;
/// `reference_n` must be at least ten times the sample size.
pub fn hausdorff_epsilon(sample: &SampleSet, reference_n: usize) -> Result<EpsilonEstimate> {
    if reference_n < 10 * sample.len() {
        return Err(Error::invalid(format!(
            "reference grid of {reference_n} points is below 10x the sample size {}",
            sample.len()
        )));
    }
    let reference = reference_grid(sample.surface(), reference_n)?;
    let epsilon = one_sided_hausdorff(&reference, sample.points());
    let resolution = max_nearest_spacing(&reference);
    Ok(EpsilonEstimate { epsilon, reference_size: reference.len(), resolution })
}

/// H(A | B) = max over a ∈ A of the distance from a to B, for finite sets.
/// An empty `b` gives `+∞`; an empty `a` gives 0.
pub fn one_sided_hausdorff<P: AsRef<[f64]> + Sync, Q: AsRef<[f64]> + Sync>(a: &[P], b: &[Q]) -> f64 {
    use rayon::prelude::*;
    if b.is_empty() {
        return f64::INFINITY;
    }
    if a.is_empty() {
        return 0.0;
    }
    let index = SpatialIndex::with_auto_cell(b);
    a.par_iter()
        .map(|p| index.nearest(b, p.as_ref()).map_or(f64::INFINITY, |(_, d)| d))
        .reduce(|| 0.0, f64::max)
}

fn max_nearest_spacing(points: &[Point]) -> f64 {
    use rayon::prelude::*;
    if points.len() < 2 {
        return 0.0;
    }
    let index = SpatialIndex::with_auto_cell(points);
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            index
                .nearest_excluding(points, &points[i], i)
                .map_or(0.0, |(_, d)| d)
        })
        .reduce(|| 0.0, f64::max)
}
