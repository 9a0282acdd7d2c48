//! Experiment runners that compare graph distances with exact surface
//! geodesics and check the approximation bounds pair by pair.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{chord_lower_bound, discrete_curvature, distance, Curvature, Point};
use crate::graph::{build_graph, GraphKind, NeighborhoodGraph};
use crate::io::fmt_f64;
use crate::paths::{dijkstra, ConstrainedSolver};
use crate::surfaces::{
    hausdorff_epsilon, sample_surface, uniform_point, EpsilonEstimate, SampleSet, SamplingMode, SurfaceSpec,
};

/// Constant of the lower bound factor `1 + c₀κ²r²`.
pub const C0: f64 = PI * PI / 50.0;

/// Relative slack granted to every pass/fail comparison for rounding.
pub const FLOAT_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub surface: SurfaceSpec,
    pub mode: SamplingMode,
    pub n: usize,
    pub seed: u64,
    /// The ε reference grid has `reference_factor · n` points (at least 10).
    pub reference_factor: usize,
}

impl SampleConfig {
    pub fn new(surface: SurfaceSpec, mode: SamplingMode, n: usize, seed: u64) -> Self {
        SampleConfig { surface, mode, n, seed, reference_factor: 10 }
    }

    pub fn with_n(&self, n: usize) -> Self {
        SampleConfig { n, ..self.clone() }
    }

    pub fn prepare(&self) -> Result<(SampleSet, EpsilonEstimate)> {
        let sample = sample_surface(&self.surface, self.mode, self.n, self.seed)?;
        let eps = hausdorff_epsilon(&sample, self.reference_factor.max(10) * sample.len())?;
        Ok((sample, eps))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusRule {
    Fixed(f64),
    /// `r = m · ε̂`.
    EpsilonMultiple(f64),
}

impl RadiusRule {
    pub fn resolve(self, eps: &EpsilonEstimate) -> Result<f64> {
        let r = match self {
            RadiusRule::Fixed(r) => r,
            RadiusRule::EpsilonMultiple(m) => m * eps.epsilon,
        };
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::invalid(format!("radius must be finite and > 0, got {r}")));
        }
        Ok(r)
    }
}

/// Which ε enters the factor of an upper bound. ε̂ never exceeds the true
/// ε, while ε̂ plus the reference-grid resolution bounds it from above.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonUse {
    Estimated,
    #[default]
    Inflated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub pairs: usize,
    pub pair_seed: u64,
    pub epsilon_use: EpsilonUse,
    /// Multiplier applied to every edge weight; 1 in normal runs.
    pub weight_factor: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { pairs: 200, pair_seed: 1, epsilon_use: EpsilonUse::Inflated, weight_factor: 1.0 }
    }
}

impl RunOptions {
    fn check(&self) -> Result<()> {
        if self.pairs == 0 {
            return Err(Error::invalid("at least one pair is required"));
        }
        if !(self.weight_factor.is_finite() && self.weight_factor > 0.0) {
            return Err(Error::invalid(format!("weight factor must be > 0, got {}", self.weight_factor)));
        }
        Ok(())
    }

    fn bound_epsilon(&self, eps: &EpsilonEstimate) -> f64 {
        match self.epsilon_use {
            EpsilonUse::Estimated => eps.epsilon,
            EpsilonUse::Inflated => eps.inflated(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub r: f64,
    pub alpha: Option<f64>,
    pub kappa: Option<Curvature>,
    pub kappa_prime: Option<Curvature>,
    pub epsilon: f64,
    pub pair_i: usize,
    pub pair_j: usize,
    pub oracle: f64,
    #[serde(with = "crate::io::serde_inf")]
    pub graph: f64,
    #[serde(with = "crate::io::serde_inf")]
    pub ratio: f64,
    #[serde(with = "crate::io::serde_inf")]
    pub bound: f64,
    /// `None` for rows excluded from the verdict (disconnected pairs).
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pairs: usize,
    pub violations: usize,
    pub disconnected: usize,
    pub max_ratio: Option<f64>,
    pub min_ratio: Option<f64>,
    pub fitted: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub runtime_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub experiment: String,
    pub surface: SurfaceSpec,
    pub mode: SamplingMode,
    pub seed: u64,
    /// Per-N sampling data: ε̂ and the reference-grid resolution.
    pub samples: Vec<SampleInfo>,
    pub notes: Vec<String>,
    pub summary: Summary,
    #[serde(skip)]
    pub rows: Vec<BoundRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleInfo {
    #[serde(rename = "N")]
    pub n: usize,
    pub epsilon: EpsilonEstimate,
    pub r: f64,
    pub edges: usize,
}

impl BoundReport {
    fn new(experiment: &str, cfg: &SampleConfig) -> Self {
        BoundReport {
            experiment: experiment.to_string(),
            surface: cfg.surface.clone(),
            mode: cfg.mode,
            seed: cfg.seed,
            samples: Vec::new(),
            notes: Vec::new(),
            summary: Summary::default(),
            rows: Vec::new(),
        }
    }

    /// Zero violations and every aggregate check satisfied.
    pub fn passed(&self) -> bool {
        self.summary.violations == 0 && self.summary.checks.iter().all(|c| c.pass)
    }

    fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.summary.checks.push(Check { name: name.to_string(), pass, detail });
    }

    fn finish(&mut self, started: Instant) {
        let s = &mut self.summary;
        s.pairs = self.rows.len();
        s.violations = self.rows.iter().filter(|r| r.pass == Some(false)).count();
        s.disconnected = self.rows.iter().filter(|r| r.pass.is_none()).count();
        let finite = self.rows.iter().map(|r| r.ratio).filter(|x| x.is_finite());
        s.max_ratio = finite.clone().reduce(f64::max);
        s.min_ratio = finite.reduce(f64::min);
        s.runtime_seconds = started.elapsed().as_secs_f64();
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "experiment", "surface", "N", "r", "alpha", "kappa", "kappa_prime", "epsilon", "pair_i", "pair_j",
            "oracle", "graph", "ratio", "bound", "pass",
        ])?;
        let surface = self.surface.to_string();
        let opt = |v: Option<f64>| v.map_or_else(String::new, fmt_f64);
        let curv = |v: Option<Curvature>| v.map_or_else(String::new, |k| fmt_f64(k.value()));
        for r in &self.rows {
            w.write_record([
                self.experiment.clone(),
                surface.clone(),
                r.n.to_string(),
                fmt_f64(r.r),
                opt(r.alpha),
                curv(r.kappa),
                curv(r.kappa_prime),
                fmt_f64(r.epsilon),
                r.pair_i.to_string(),
                r.pair_j.to_string(),
                fmt_f64(r.oracle),
                fmt_f64(r.graph),
                fmt_f64(r.ratio),
                fmt_f64(r.bound),
                match r.pass {
                    Some(true) => "true".into(),
                    Some(false) => "false".into(),
                    None => "na".into(),
                },
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_summary(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

fn gate(name: &'static str, ok: bool, detail: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Gate { gate: name, detail: detail() })
    }
}

/// Seeded pairs `(i, j)`, `i ≠ j`, whose geodesic distance lies in
/// `[3r, diameter/2]`, returned with that distance.
pub fn select_pairs(sample: &SampleSet, r: f64, count: usize, seed: u64) -> Result<Vec<(usize, usize, f64)>> {
    let spec = sample.surface();
    let (lo, hi) = (3.0 * r, spec.intrinsic_diameter() / 2.0);
    if lo > hi {
        return Err(Error::invalid(format!(
            "no pair distance fits in [3r, diameter/2] = [{lo}, {hi}]"
        )));
    }
    let n = sample.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let max_draws = 10_000 * count.max(1);
    for _ in 0..max_draws {
        if out.len() == count {
            break;
        }
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i == j {
            continue;
        }
        let d = spec.geodesic(&sample.points()[i], &sample.points()[j])?;
        if (lo..=hi).contains(&d) {
            out.push((i, j, d));
        }
    }
    if out.len() < count {
        return Err(Error::invalid(format!(
            "found only {} of {count} pairs with distance in [{lo}, {hi}]",
            out.len()
        )));
    }
    Ok(out)
}

/// Checks Δ_r ≤ (1 + 4ε/r)·δ_S on the r-ball graph, gated on ε̂ ≤ r/4.
pub fn verify_unconstrained_upper(cfg: &SampleConfig, radius: RadiusRule, opts: &RunOptions) -> Result<BoundReport> {
    let started = Instant::now();
    opts.check()?;
    let (sample, eps) = cfg.prepare()?;
    let r = radius.resolve(&eps)?;
    gate("epsilon_le_r_over_4", eps.epsilon <= r / 4.0, || {
        format!("estimated epsilon {} exceeds r/4 = {}", eps.epsilon, r / 4.0)
    })?;
    let kind = GraphKind::Ball { r };
    let g = build_graph(&sample, kind)?;
    let pairs = select_pairs(&sample, r, opts.pairs, opts.pair_seed)?;
    let e = opts.bound_epsilon(&eps);
    let bound = 1.0 + 4.0 * e / r;
    let graph = pair_distances(&g, &pairs, opts.weight_factor)?;

    let mut report = BoundReport::new("unconstrained_upper", cfg);
    report.samples.push(SampleInfo { n: sample.len(), epsilon: eps, r, edges: g.edge_count() });
    report.notes.push(epsilon_note(opts.epsilon_use));
    for (&(i, j, oracle), &d) in pairs.iter().zip(&graph) {
        let pass = d.is_finite().then_some(d <= bound * oracle * (1.0 + FLOAT_SLACK));
        report.rows.push(BoundRow {
            n: sample.len(),
            r,
            alpha: None,
            kappa: None,
            kappa_prime: None,
            epsilon: e,
            pair_i: i,
            pair_j: j,
            oracle,
            graph: d,
            ratio: d / oracle,
            bound,
            pass,
        });
    }
    report.finish(started);
    Ok(report)
}

/// Checks δ_S ≤ (1 + c₀κ_S²r²)·Δ_r on the r-ball graph, gated on
/// κ_S·r ≤ 1/3.
pub fn verify_unconstrained_lower(cfg: &SampleConfig, radius: RadiusRule, opts: &RunOptions) -> Result<BoundReport> {
    let started = Instant::now();
    opts.check()?;
    let (sample, eps) = cfg.prepare()?;
    let r = radius.resolve(&eps)?;
    let kappa_s = cfg.surface.curvature_bound();
    gate("kappa_r_le_one_third", kappa_s * r <= 1.0 / 3.0, || {
        format!("kappa_S * r = {} exceeds 1/3", kappa_s * r)
    })?;
    let g = build_graph(&sample, GraphKind::Ball { r })?;
    let pairs = select_pairs(&sample, r, opts.pairs, opts.pair_seed)?;
    let bound = 1.0 + C0 * kappa_s * kappa_s * r * r;
    let graph = pair_distances(&g, &pairs, opts.weight_factor)?;

    let mut report = BoundReport::new("unconstrained_lower", cfg);
    report.samples.push(SampleInfo { n: sample.len(), epsilon: eps, r, edges: g.edge_count() });
    report
        .notes
        .push("bound factor is 1 + c0 * kappa_S^2 * r^2 with c0 = pi^2/50".to_string());
    for (&(i, j, oracle), &d) in pairs.iter().zip(&graph) {
        let pass = d.is_finite().then_some(oracle <= bound * d * (1.0 + FLOAT_SLACK));
        report.rows.push(BoundRow {
            n: sample.len(),
            r,
            alpha: None,
            kappa: None,
            kappa_prime: None,
            epsilon: eps.epsilon,
            pair_i: i,
            pair_j: j,
            oracle,
            graph: d,
            ratio: d / oracle,
            bound,
            pass,
        });
    }
    report.finish(started);
    Ok(report)
}

fn epsilon_note(e: EpsilonUse) -> String {
    match e {
        EpsilonUse::Estimated => "bound uses the estimated epsilon".to_string(),
        EpsilonUse::Inflated => "bound uses epsilon estimate + reference-grid resolution".to_string(),
    }
}

/// Unconstrained graph distance for every pair, scaled by `factor`.
fn pair_distances(g: &NeighborhoodGraph, pairs: &[(usize, usize, f64)], factor: f64) -> Result<Vec<f64>> {
    pairs
        .par_iter()
        .map(|&(i, j, _)| Ok(dijkstra(g, i)?.dist[j] * factor))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedUpperParams {
    pub r: f64,
    pub alpha: f64,
    pub kappa: Curvature,
    /// Constraint checked row by row; defaults to κ + c_emp·(κ²r + ε̂/r²).
    pub kappa_prime: Option<Curvature>,
    pub c_emp: f64,
    /// Relative width at which the bisection over κ' stops.
    pub bisect_tol: f64,
}

impl ConstrainedUpperParams {
    pub fn new(r: f64, alpha: f64, kappa: Curvature) -> Self {
        ConstrainedUpperParams { r, alpha, kappa, kappa_prime: None, c_emp: 8.0, bisect_tol: 1e-2 }
    }
}

/// Checks Δ_{r,α,κ'} ≤ (1 + 6ε/r)·δ_{S,κ} on the annulus graph for each
/// sample size in `ns`, and bisects the smallest κ' at which every pair
/// passes. Reports `C_emp = (κ'_min − κ)/(κ²r + ε̂/r²)` per N and checks
/// that κ'_min does not increase along `ns`.
pub fn verify_constrained_upper(
    cfg: &SampleConfig,
    ns: &[usize],
    p: &ConstrainedUpperParams,
    opts: &RunOptions,
) -> Result<BoundReport> {
    let started = Instant::now();
    opts.check()?;
    let kappa = p.kappa;
    let kappa_s = cfg.surface.curvature_bound();
    gate("alpha_le_quarter", (0.0..=0.25).contains(&p.alpha), || {
        format!("alpha = {} must lie in [0, 1/4]", p.alpha)
    })?;
    gate("oracle_available", kappa.value() >= kappa_s, || {
        format!("kappa = {kappa} is below the surface bound {kappa_s}; no constrained oracle")
    })?;
    if ns.is_empty() {
        return Err(Error::invalid("empty sample-size sequence"));
    }
    let mut report = BoundReport::new("constrained_upper", cfg);
    report.notes.push(epsilon_note(opts.epsilon_use));
    let mut previous: Option<(usize, Curvature)> = None;
    for &n in ns {
        let (sample, eps) = cfg.with_n(n).prepare()?;
        let r = p.r;
        let k = kappa.value();
        let slack = k * k * r + eps.epsilon / (r * r);
        let kappa_prime = match p.kappa_prime {
            Some(kp) => {
                gate("kappa_prime_slack", kp.value() >= k + p.c_emp * slack, || {
                    format!("kappa' = {kp} is below kappa + C_emp (kappa^2 r + eps/r^2) = {}", k + p.c_emp * slack)
                })?;
                kp
            }
            None => Curvature::new(k + p.c_emp * slack)?,
        };
        let g = build_graph(&sample, GraphKind::Annulus { r, alpha: p.alpha })?;
        let solver = ConstrainedSolver::new(&g, sample.points())?;
        let pairs = select_pairs(&sample, r, opts.pairs, opts.pair_seed)?;
        let e = opts.bound_epsilon(&eps);
        let factor = 1.0 + 6.0 * e / r;
        let probe = Probe { solver: &solver, pairs: &pairs, factor, weight_factor: opts.weight_factor };

        let lengths = probe.lengths(kappa_prime)?;
        for (&(i, j, oracle), &d) in pairs.iter().zip(&lengths) {
            report.rows.push(BoundRow {
                n: sample.len(),
                r,
                alpha: Some(p.alpha),
                kappa: Some(kappa),
                kappa_prime: Some(kappa_prime),
                epsilon: e,
                pair_i: i,
                pair_j: j,
                oracle,
                graph: d,
                ratio: d / oracle,
                bound: factor,
                pass: Some(d <= factor * oracle * (1.0 + FLOAT_SLACK)),
            });
        }

        let minimal = probe.minimal_kappa_prime(k.max(1.0), p.bisect_tol)?;
        let tag = format!("N={}", sample.len());
        report.summary.fitted.insert(format!("kappa_prime_min[{tag}]"), minimal.value());
        report.summary.fitted.insert(format!("C_emp[{tag}]"), (minimal.value() - k) / slack);
        report.check(
            &format!("kappa_prime_min_finite[{tag}]"),
            minimal.is_finite(),
            format!("smallest passing kappa' = {minimal}"),
        );
        if let Some((prev_n, prev)) = previous {
            // κ'_min(N) ≤ κ'_min(prev) exactly when the previous minimum already passes here.
            let ok = prev.is_infinite() || probe.passes(prev)?;
            report.check(
                &format!("kappa_prime_min_nonincreasing[N={prev_n}->{}]", sample.len()),
                ok,
                format!("kappa'_min {prev} at N={prev_n}, {minimal} at N={}", sample.len()),
            );
        }
        previous = Some((sample.len(), minimal));
        report.samples.push(SampleInfo { n: sample.len(), epsilon: eps, r, edges: g.edge_count() });
    }
    report.finish(started);
    Ok(report)
}

/// Pass/fail probes of the constrained upper bound at a given κ'.
struct Probe<'a, 'p> {
    solver: &'a ConstrainedSolver<'a, Point>,
    pairs: &'p [(usize, usize, f64)],
    factor: f64,
    weight_factor: f64,
}

impl Probe<'_, '_> {
    fn budget(&self, oracle: f64) -> f64 {
        self.factor * oracle * (1.0 + FLOAT_SLACK) / self.weight_factor
    }

    /// Scaled constrained distance of every pair; exact below the budget,
    /// computed without pruning otherwise.
    fn lengths(&self, kappa: Curvature) -> Result<Vec<f64>> {
        self.pairs
            .par_iter()
            .map(|&(i, j, oracle)| {
                let budget = self.budget(oracle);
                let mut res = self.solver.within_budget(kappa, i, j, budget)?;
                if !res.feasible || res.length > budget {
                    res = self.solver.shortest(kappa, i, j)?;
                }
                Ok(res.length * self.weight_factor)
            })
            .collect()
    }

    fn passes(&self, kappa: Curvature) -> Result<bool> {
        for &(i, j, oracle) in self.pairs {
            let budget = self.budget(oracle);
            let res = self.solver.within_budget(kappa, i, j, budget)?;
            if !res.feasible || res.length > budget {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Smallest κ' (to relative width `tol`) at which every pair passes;
    /// infinite when even the unconstrained graph distance fails.
    fn minimal_kappa_prime(&self, start: f64, tol: f64) -> Result<Curvature> {
        if !self.passes(Curvature::INFINITE)? {
            return Ok(Curvature::INFINITE);
        }
        if self.passes(Curvature::ZERO)? {
            return Ok(Curvature::ZERO);
        }
        let mut lo = 0.0;
        let mut hi = start;
        while !self.passes(Curvature::new(hi)?)? {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() || hi > 1e12 {
                return Ok(Curvature::INFINITE);
            }
        }
        while hi - lo > tol * hi {
            let mid = 0.5 * (lo + hi);
            if self.passes(Curvature::new(mid)?)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Curvature::new(hi)
    }
}

/// Records the largest interior curvature of unconstrained shortest
/// paths on the (r, α)-annulus graph for each N in `ns`. Each row's
/// `ratio` is that curvature over κ and its `bound` is `+∞`: a row passes
/// when the curvature is finite, meaning no interior angle is acute.
///
/// The excess q̂ = max(curvature/κ − 1) must decrease along `ns`; the
/// fitted constant q̂·ακ²r³/ε̂ is reported per N. With
/// ε̂/(ακr²) ≤ 1/`c_gate` an infinite curvature is a hard failure.
pub fn verify_constrained_lower(
    cfg: &SampleConfig,
    ns: &[usize],
    r: f64,
    alpha: f64,
    kappa: Curvature,
    c_gate: f64,
    opts: &RunOptions,
) -> Result<BoundReport> {
    let started = Instant::now();
    opts.check()?;
    let kappa_s = cfg.surface.curvature_bound();
    gate("alpha_le_quarter", alpha > 0.0 && alpha <= 0.25, || {
        format!("alpha = {alpha} must lie in (0, 1/4]")
    })?;
    gate("kappa_r_le_one_third", kappa_s * r <= 1.0 / 3.0, || {
        format!("kappa_S * r = {} exceeds 1/3", kappa_s * r)
    })?;
    let k = kappa
        .finite()
        .filter(|&k| k > 0.0)
        .ok_or_else(|| Error::invalid(format!("kappa must be finite and > 0, got {kappa}")))?;
    if ns.is_empty() {
        return Err(Error::invalid("empty sample-size sequence"));
    }
    let mut report = BoundReport::new("constrained_lower", cfg);
    let mut previous: Option<(usize, f64)> = None;
    for &n in ns {
        let (sample, eps) = cfg.with_n(n).prepare()?;
        let g = build_graph(&sample, GraphKind::Annulus { r, alpha })?;
        let pairs = select_pairs(&sample, r, opts.pairs, opts.pair_seed)?;
        let pts = sample.points();
        let paths: Vec<(f64, Curvature)> = pairs
            .par_iter()
            .map(|&(i, j, _)| {
                let field = dijkstra(&g, i)?;
                let curv = match field.path_to(j) {
                    Some(nodes) => nodes
                        .windows(3)
                        .map(|w| discrete_curvature(&pts[w[0]], &pts[w[1]], &pts[w[2]]))
                        .collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .max()
                        .unwrap_or(Curvature::ZERO),
                    None => Curvature::ZERO,
                };
                Ok((field.dist[j] * opts.weight_factor, curv))
            })
            .collect::<Result<_>>()?;

        let mut q_hat = f64::NEG_INFINITY;
        for (&(i, j, oracle), &(d, curv)) in pairs.iter().zip(&paths) {
            let ratio = curv.value() / k;
            let pass = d.is_finite().then(|| curv.is_finite());
            if d.is_finite() {
                q_hat = q_hat.max(ratio - 1.0);
            }
            report.rows.push(BoundRow {
                n: sample.len(),
                r,
                alpha: Some(alpha),
                kappa: Some(kappa),
                kappa_prime: None,
                epsilon: eps.epsilon,
                pair_i: i,
                pair_j: j,
                oracle,
                graph: d,
                ratio,
                bound: f64::INFINITY,
                pass,
            });
        }
        let tag = format!("N={}", sample.len());
        let scale = alpha * k * k * r.powi(3) / eps.epsilon;
        report.summary.fitted.insert(format!("q_hat[{tag}]"), q_hat);
        report.summary.fitted.insert(format!("C_emp[{tag}]"), q_hat * scale);
        let regime = eps.epsilon / (alpha * k * r * r) <= 1.0 / c_gate;
        if regime {
            report.check(
                &format!("finite_curvature_in_small_epsilon_regime[{tag}]"),
                q_hat.is_finite(),
                format!("eps/(alpha kappa r^2) = {}", eps.epsilon / (alpha * k * r * r)),
            );
        }
        if let Some((prev_n, prev)) = previous {
            report.check(
                &format!("q_hat_decreasing[N={prev_n}->{}]", sample.len()),
                q_hat < prev,
                format!("q_hat {prev} at N={prev_n}, {q_hat} at N={}", sample.len()),
            );
        }
        previous = Some((sample.len(), q_hat));
        report.samples.push(SampleInfo { n: sample.len(), epsilon: eps, r, edges: g.edge_count() });
    }
    report.finish(started);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinLengthRow {
    pub shape: String,
    pub s: f64,
    pub chord: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinLengthReport {
    pub kappa: f64,
    pub rows: Vec<MinLengthRow>,
    pub violations: usize,
}

/// Tolerance of the chord comparisons in [`verify_minlength`].
pub const CHORD_TOL: f64 = 1e-12;

/// Chord length of arcs of length `s` against (2/κ)·sin(κs/2): equal on a
/// circle of radius 1/κ, and no smaller on great-circle arcs of a sphere
/// of that radius (`sphere_arcs` random arcs per length).
pub fn verify_minlength(kappa: f64, arclengths: &[f64], sphere_arcs: usize, seed: u64) -> Result<MinLengthReport> {
    let radius = 1.0 / kappa;
    let mut rows = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sphere = SurfaceSpec::sphere(radius);
    for &s in arclengths {
        let bound = chord_lower_bound(kappa, s)?;
        let t = kappa * s;
        let chord = distance(&[radius, 0.0], &[radius * t.cos(), radius * t.sin()]);
        rows.push(MinLengthRow {
            shape: "circle".into(),
            s,
            chord,
            bound,
            pass: (chord - bound).abs() <= CHORD_TOL,
        });
        for _ in 0..sphere_arcs {
            let p = uniform_point(&sphere, &mut rng);
            let x = Point::new(p.clone())?;
            let tangent = random_tangent(&p, &mut rng);
            let u: Vec<f64> = p.iter().map(|c| c / radius).collect();
            let y: Vec<f64> = (0..3).map(|d| radius * (t.cos() * u[d] + t.sin() * tangent[d])).collect();
            let chord = distance(&x, &y);
            rows.push(MinLengthRow {
                shape: "sphere_arc".into(),
                s,
                chord,
                bound,
                pass: chord >= bound - CHORD_TOL,
            });
        }
    }
    let violations = rows.iter().filter(|r| !r.pass).count();
    Ok(MinLengthReport { kappa, rows, violations })
}

/// Unit vector orthogonal to `p` (p ≠ 0), drawn uniformly.
fn random_tangent<R: Rng>(p: &[f64], rng: &mut R) -> Vec<f64> {
    let unit = uniform_point(&SurfaceSpec::sphere(1.0), rng);
    let np = crate::geometry::norm(p);
    let u: Vec<f64> = p.iter().map(|c| c / np).collect();
    let along = crate::geometry::dot(&unit, &u);
    let v: Vec<f64> = unit.iter().zip(&u).map(|(a, b)| a - along * b).collect();
    let nv = crate::geometry::norm(&v);
    if nv < 1e-6 {
        return random_tangent(p, rng);
    }
    v.iter().map(|c| c / nv).collect()
}

/// Points of great-circle arcs of the unit sphere: `(point, tangent)` pairs
/// give `γ(s) = cos(s)·point + sin(s)·tangent`.
pub fn random_great_circle<R: Rng>(rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let p = uniform_point(&SurfaceSpec::sphere(1.0), rng);
    let t = random_tangent(&p, rng);
    (p, t)
}

pub fn great_circle_point(p: &[f64], t: &[f64], s: f64) -> Point {
    let (c, sn) = (s.cos(), s.sin());
    Point::new(p.iter().zip(t).map(|(a, b)| c * a + sn * b).collect()).expect("finite coordinates")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveSpec {
    /// `t ↦ R(cos t, sin t)`.
    Circle { radius: f64 },
    /// `t ↦ (t, t/2)`.
    Line,
    /// `t ↦ (R cos t, R sin t, c·t)` with `c = pitch`.
    Helix { radius: f64, pitch: f64 },
}

impl CurveSpec {
    pub fn point(&self, t: f64) -> Point {
        let coords = match *self {
            CurveSpec::Circle { radius } => vec![radius * t.cos(), radius * t.sin()],
            CurveSpec::Line => vec![t, 0.5 * t],
            CurveSpec::Helix { radius, pitch } => vec![radius * t.cos(), radius * t.sin(), pitch * t],
        };
        Point::new(coords).expect("finite coordinates")
    }

    /// Curvature of the curve, constant along each of these curves.
    pub fn curvature(&self) -> f64 {
        match *self {
            CurveSpec::Circle { radius } => 1.0 / radius,
            CurveSpec::Line => 0.0,
            CurveSpec::Helix { radius, pitch } => radius / (radius * radius + pitch * pitch),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureRow {
    pub h: f64,
    pub discrete: f64,
    pub exact: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub curve: CurveSpec,
    pub s: f64,
    pub rows: Vec<CurvatureRow>,
    /// log(e_k/e_{k+1}) / log(h_k/h_{k+1}) for consecutive steps; `None`
    /// when an error is zero.
    pub orders: Vec<Option<f64>>,
    pub checks: Vec<Check>,
}

impl CurvatureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Largest error allowed at the smallest step.
pub const CURVATURE_TOL: f64 = 1e-3;

/// Discrete curvature of γ(s−h), γ(s), γ(s+h) against the curvature of
/// γ, for a decreasing sequence of steps. Checks that the error does not
/// increase as h decreases and is below [`CURVATURE_TOL`] at the smallest h.
pub fn verify_curvature_consistency(curve: CurveSpec, s: f64, hs: &[f64]) -> Result<CurvatureReport> {
    if hs.is_empty() {
        return Err(Error::invalid("empty step sequence"));
    }
    if hs.iter().any(|&h| !(h.is_finite() && h > 0.0)) || hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("steps must be positive and strictly decreasing"));
    }
    if let CurveSpec::Circle { radius } | CurveSpec::Helix { radius, .. } = curve {
        if hs[0] >= PI || radius.is_nan() || radius <= 0.0 {
            return Err(Error::invalid("steps must stay below half a turn on a curve of positive radius"));
        }
    }
    let exact = curve.curvature();
    let rows: Vec<CurvatureRow> = hs
        .iter()
        .map(|&h| {
            let k = discrete_curvature(&curve.point(s - h), &curve.point(s), &curve.point(s + h))?;
            Ok(CurvatureRow { h, discrete: k.value(), exact, error: (k.value() - exact).abs() })
        })
        .collect::<Result<_>>()?;
    let orders = rows
        .windows(2)
        .map(|w| {
            (w[0].error > 0.0 && w[1].error > 0.0)
                .then(|| (w[0].error / w[1].error).ln() / (w[0].h / w[1].h).ln())
        })
        .collect();
    let errors: Vec<String> = rows.iter().map(|r| format!("{:e}", r.error)).collect();
    let last = rows[rows.len() - 1].error;
    let checks = vec![
        Check {
            name: "error_nonincreasing".into(),
            pass: rows.windows(2).all(|w| w[1].error <= w[0].error),
            detail: format!("errors {}", errors.join(", ")),
        },
        Check {
            name: "error_small_at_smallest_h".into(),
            pass: last < CURVATURE_TOL,
            detail: format!("error {last:e} at h = {}", hs[hs.len() - 1]),
        },
    ];
    Ok(CurvatureReport { curve, s, rows, orders, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn disk_cfg(n: usize) -> SampleConfig {
        SampleConfig::new(SurfaceSpec::disk(1.0), SamplingMode::Grid, n, 0)
    }

    fn small_opts(pairs: usize) -> RunOptions {
        RunOptions { pairs, ..RunOptions::default() }
    }

    #[test]
    fn lower_bound_factor_at_r_03() {
        let factor = 1.0 + C0 * 0.09;
        assert_abs_diff_eq!(factor, 1.01777, epsilon = 1e-5);
    }

    #[test]
    fn pairs_respect_distance_window() {
        let (sample, _) = SampleConfig::new(SurfaceSpec::sphere(1.0), SamplingMode::Uniform, 400, 3)
            .prepare()
            .unwrap();
        let pairs = select_pairs(&sample, 0.2, 50, 9).unwrap();
        assert_eq!(pairs.len(), 50);
        for &(i, j, d) in &pairs {
            assert_ne!(i, j);
            assert!((0.6..=PI / 2.0).contains(&d));
        }
        assert_eq!(pairs, select_pairs(&sample, 0.2, 50, 9).unwrap());
        assert!(select_pairs(&sample, 1.0, 5, 0).is_err());
    }

    #[test]
    fn unconstrained_upper_on_disk_grid() {
        let report = verify_unconstrained_upper(&disk_cfg(900), RadiusRule::EpsilonMultiple(4.0), &small_opts(40)).unwrap();
        assert_eq!(report.summary.pairs, 40);
        assert!(report.passed(), "{:?}", report.summary);
        for row in &report.rows {
            assert!(row.ratio <= row.bound);
        }
    }

    #[test]
    fn upper_gate_names_the_condition() {
        let err = verify_unconstrained_upper(&disk_cfg(400), RadiusRule::EpsilonMultiple(2.0), &small_opts(5)).unwrap_err();
        assert!(matches!(err, Error::Gate { gate: "epsilon_le_r_over_4", .. }), "{err}");
    }

    #[test]
    fn unconstrained_lower_on_disk_is_triangle_inequality() {
        let report = verify_unconstrained_lower(&disk_cfg(900), RadiusRule::Fixed(0.2), &small_opts(40)).unwrap();
        assert!(report.passed());
        for row in &report.rows {
            assert_eq!(row.bound, 1.0);
            assert!(row.graph >= row.oracle * (1.0 - FLOAT_SLACK));
        }
    }

    #[test]
    fn shrunk_weights_violate_lower_bound() {
        let opts = RunOptions { weight_factor: 0.5, ..small_opts(20) };
        let report = verify_unconstrained_lower(&disk_cfg(900), RadiusRule::Fixed(0.2), &opts).unwrap();
        assert_eq!(report.summary.violations, 20);
        assert!(!report.passed());
    }

    #[test]
    fn lower_gate_on_kappa_r() {
        let cfg = SampleConfig::new(SurfaceSpec::sphere(1.0), SamplingMode::Grid, 200, 0);
        let err = verify_unconstrained_lower(&cfg, RadiusRule::Fixed(0.4), &small_opts(5)).unwrap_err();
        assert!(matches!(err, Error::Gate { gate: "kappa_r_le_one_third", .. }));
    }

    #[test]
    fn constrained_upper_gates() {
        let cfg = SampleConfig::new(SurfaceSpec::sphere(1.0), SamplingMode::Grid, 200, 0);
        let half = Curvature::new(0.5).unwrap();
        let p = ConstrainedUpperParams::new(0.5, 0.25, half);
        let err = verify_constrained_upper(&cfg, &[200], &p, &small_opts(5)).unwrap_err();
        assert!(matches!(err, Error::Gate { gate: "oracle_available", .. }));
        let p = ConstrainedUpperParams::new(0.5, 0.3, Curvature::new(1.0).unwrap());
        let err = verify_constrained_upper(&cfg, &[200], &p, &small_opts(5)).unwrap_err();
        assert!(matches!(err, Error::Gate { gate: "alpha_le_quarter", .. }));
    }

    #[test]
    fn constrained_upper_on_disk() {
        let kappa = Curvature::new(1.0).unwrap();
        let p = ConstrainedUpperParams::new(0.15, 0.25, kappa);
        let report = verify_constrained_upper(&disk_cfg(900), &[900], &p, &small_opts(20)).unwrap();
        assert!(report.passed(), "{:?}", report.summary);
        let kp = report.summary.fitted.keys().find(|k| k.starts_with("kappa_prime_min")).unwrap();
        assert!(report.summary.fitted[kp].is_finite());
    }

    #[test]
    fn constrained_lower_on_disk_reports_excess() {
        let kappa = Curvature::new(1.0).unwrap();
        let report = verify_constrained_lower(&disk_cfg(400), &[400, 1600], 0.15, 0.25, kappa, 20.0, &small_opts(20)).unwrap();
        assert_eq!(report.samples.len(), 2);
        assert_eq!(report.rows.len(), 40);
        assert!(report.summary.fitted.keys().any(|k| k.starts_with("q_hat")));
        assert!(report.rows.iter().all(|r| r.bound == f64::INFINITY));
    }

    #[test]
    fn report_csv_layout() {
        let report = verify_unconstrained_lower(&disk_cfg(400), RadiusRule::Fixed(0.2), &small_opts(3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("r.csv");
        let json_path = dir.path().join("r.json");
        report.write_csv(&csv_path).unwrap();
        report.write_summary(&json_path).unwrap();
        let text = std::fs::read_to_string(&csv_path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "experiment,surface,N,r,alpha,kappa,kappa_prime,epsilon,pair_i,pair_j,oracle,graph,ratio,bound,pass"
        );
        assert_eq!(lines.count(), 3);
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
        assert_eq!(json["summary"]["violations"], 0);
    }

    #[test]
    fn minlength_examples() {
        let report = verify_minlength(1.0, &[PI, PI / 2.0, 1.0], 5, 0).unwrap();
        assert_eq!(report.violations, 0);
        let circle: Vec<&MinLengthRow> = report.rows.iter().filter(|r| r.shape == "circle").collect();
        assert_abs_diff_eq!(circle[0].chord, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(circle[1].chord, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(circle[2].bound, 2.0 * 0.5f64.sin(), epsilon = 1e-15);
        assert!(verify_minlength(1.0, &[4.0], 0, 0).is_err());
    }

    #[test]
    fn curvature_consistency_examples() {
        let line = verify_curvature_consistency(CurveSpec::Line, 0.3, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(line.rows.iter().all(|r| r.error == 0.0));
        assert!(line.passed());

        let circle = verify_curvature_consistency(CurveSpec::Circle { radius: 1.0 }, 0.7, &[1e-2]).unwrap();
        assert!(circle.rows[0].error < 1e-2);

        let helix = CurveSpec::Helix { radius: 1.0, pitch: 0.5 };
        assert_abs_diff_eq!(helix.curvature(), 0.8, epsilon = 1e-15);
        let r = verify_curvature_consistency(helix, 1.0, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(r.rows.windows(2).all(|w| w[1].error < w[0].error));
        assert!(r.orders.iter().all(|o| o.is_some_and(|o| (o - 2.0).abs() < 0.1)));

        assert!(verify_curvature_consistency(CurveSpec::Line, 0.0, &[1e-3, 1e-2]).is_err());
    }

    #[test]
    fn great_circle_points_lie_on_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (p, t) = random_great_circle(&mut rng);
        assert_abs_diff_eq!(crate::geometry::dot(&p, &t), 0.0, epsilon = 1e-15);
        for s in [0.0, 0.5, 2.0] {
            assert_abs_diff_eq!(crate::geometry::norm(&great_circle_point(&p, &t, s)), 1.0, epsilon = 1e-15);
        }
    }
}
