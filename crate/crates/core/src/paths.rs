//! Shortest paths on neighbourhood graphs: plain Dijkstra, the
//! curvature-constrained search over directed-edge states, an exhaustive
//! reference search, and the extension to off-sample points.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, triple_curvature, Curvature};
use crate::graph::NeighborhoodGraph;

/// Heap key ordered by cost, then by id.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    pub source: usize,
    pub dist: Vec<f64>,
    pub pred: Vec<Option<usize>>,
}

impl DistanceField {
    /// Node sequence from the source to `target`, or `None` if unreachable.
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        if !self.dist.get(target)?.is_finite() {
            return None;
        }
        let mut nodes = vec![target];
        let mut v = target;
        while let Some(u) = self.pred[v] {
            nodes.push(u);
            v = u;
        }
        nodes.reverse();
        Some(nodes)
    }
}

fn check_node(g: &NeighborhoodGraph, i: usize) -> Result<()> {
    if i >= g.n() {
        return Err(Error::invalid(format!("node {i} out of range for {} nodes", g.n())));
    }
    Ok(())
}

/// Single-source distances. Among equally short routes the predecessor
/// with the smaller index wins.
pub fn dijkstra(g: &NeighborhoodGraph, source: usize) -> Result<DistanceField> {
    check_node(g, source)?;
    let n = g.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse(Key(0.0, source)));
    while let Some(Reverse(Key(d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for e in g.neighbors(u) {
            let v = e.to;
            if done[v] {
                continue;
            }
            let nd = d + e.weight;
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = Some(u);
                heap.push(Reverse(Key(nd, v)));
            } else if nd == dist[v] && pred[v].is_some_and(|p| u < p) {
                pred[v] = Some(u);
            }
        }
    }
    Ok(DistanceField { source, dist, pred })
}

/// A path query answer. `kappa` is `None` for unconstrained queries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub source: usize,
    pub target: usize,
    pub kappa: Option<Curvature>,
    #[serde(with = "crate::io::serde_inf")]
    pub length: f64,
    pub nodes: Vec<usize>,
    pub max_interior_curvature: Curvature,
    pub feasible: bool,
}

impl PathResult {
    fn infeasible(source: usize, target: usize, kappa: Option<Curvature>) -> Self {
        PathResult {
            source,
            target,
            kappa,
            length: f64::INFINITY,
            nodes: Vec::new(),
            max_interior_curvature: Curvature::ZERO,
            feasible: false,
        }
    }

    fn found<P: AsRef<[f64]>>(
        points: &[P],
        kappa: Option<Curvature>,
        nodes: Vec<usize>,
        length: f64,
    ) -> Self {
        PathResult {
            source: nodes[0],
            target: nodes[nodes.len() - 1],
            kappa,
            length,
            max_interior_curvature: node_path_curvature(points, &nodes),
            nodes,
            feasible: true,
        }
    }
}

/// Unconstrained shortest path between two nodes.
pub fn shortest_path<P: AsRef<[f64]>>(
    g: &NeighborhoodGraph,
    points: &[P],
    source: usize,
    target: usize,
) -> Result<PathResult> {
    check_points(g, points)?;
    check_node(g, target)?;
    let field = dijkstra(g, source)?;
    Ok(match field.path_to(target) {
        Some(nodes) => PathResult::found(points, None, nodes, field.dist[target]),
        None => PathResult::infeasible(source, target, None),
    })
}

fn check_points<P: AsRef<[f64]>>(g: &NeighborhoodGraph, points: &[P]) -> Result<()> {
    if points.len() != g.n() {
        return Err(Error::invalid(format!(
            "{} points for a graph over {} nodes",
            points.len(),
            g.n()
        )));
    }
    Ok(())
}

fn node_path_curvature<P: AsRef<[f64]>>(points: &[P], nodes: &[usize]) -> Curvature {
    nodes
        .windows(3)
        .map(|w| triple_curvature(points[w[0]].as_ref(), points[w[1]].as_ref(), points[w[2]].as_ref()))
        .max()
        .unwrap_or(Curvature::ZERO)
}

/// Largest discrete curvature over the interior vertices of a polyline;
/// zero for one or two points.
pub fn path_max_curvature<P: AsRef<[f64]>>(points: &[P]) -> Result<Curvature> {
    if points.is_empty() {
        return Err(Error::domain("path with no points"));
    }
    for w in points.windows(2) {
        if w[0].as_ref().len() != w[1].as_ref().len() {
            return Err(Error::domain("path points of mixed dimension"));
        }
        if w[0].as_ref() == w[1].as_ref() {
            return Err(Error::domain("path repeats a point consecutively"));
        }
    }
    Ok(points
        .windows(3)
        .map(|w| triple_curvature(w[0].as_ref(), w[1].as_ref(), w[2].as_ref()))
        .max()
        .unwrap_or(Curvature::ZERO))
}

/// Curvature-constrained search over directed-edge states.
///
/// A state is a directed edge `(i, j)`; the walk may continue to `(j, k)`
/// when the triple `(x_i, x_j, x_k)` has curvature at most κ. Any optimal
/// walk that repeats a directed edge contains a cycle whose removal keeps
/// every remaining triple, so searching states (rather than node
/// histories) loses nothing. Nodes may still be revisited.
pub struct ConstrainedSolver<'a, P> {
    g: &'a NeighborhoodGraph,
    points: &'a [P],
    offsets: Vec<usize>,
    tails: Vec<usize>,
}

impl<'a, P: AsRef<[f64]>> ConstrainedSolver<'a, P> {
    pub fn new(g: &'a NeighborhoodGraph, points: &'a [P]) -> Result<Self> {
        check_points(g, points)?;
        let mut offsets = Vec::with_capacity(g.n() + 1);
        let mut tails = Vec::new();
        offsets.push(0);
        for i in 0..g.n() {
            tails.extend(std::iter::repeat_n(i, g.degree(i)));
            offsets.push(tails.len());
        }
        Ok(ConstrainedSolver { g, points, offsets, tails })
    }

    pub fn state_count(&self) -> usize {
        self.tails.len()
    }

    fn head(&self, s: usize) -> usize {
        let i = self.tails[s];
        self.g.neighbors(i)[s - self.offsets[i]].to
    }

    /// Λ*_{r,κ}(source, target).
    pub fn shortest(&self, kappa: Curvature, source: usize, target: usize) -> Result<PathResult> {
        self.search(kappa, source, target, f64::INFINITY)
    }

    /// Like [`shortest`](Self::shortest), but abandons every state whose
    /// cost plus the straight-line distance to the target exceeds
    /// `budget`. The answer is exact whenever the optimum is within the
    /// budget; otherwise the result is infeasible or longer than `budget`.
    /// Relies on edge weights being Euclidean lengths.
    pub fn within_budget(&self, kappa: Curvature, source: usize, target: usize, budget: f64) -> Result<PathResult> {
        self.search(kappa, source, target, budget)
    }

    fn search(&self, kappa: Curvature, source: usize, target: usize, budget: f64) -> Result<PathResult> {
        check_node(self.g, source)?;
        check_node(self.g, target)?;
        let kq = Some(kappa);
        if source == target {
            return Ok(PathResult::found(self.points, kq, vec![source], 0.0));
        }
        let xt = self.points[target].as_ref();
        let pruned = |node: usize, cost: f64| {
            budget.is_finite() && cost + distance(self.points[node].as_ref(), xt) > budget
        };
        let m = self.state_count();
        let mut cost = vec![f64::INFINITY; m];
        let mut pred = vec![usize::MAX; m];
        let mut done = vec![false; m];
        let mut heap = BinaryHeap::new();
        for (k, e) in self.g.neighbors(source).iter().enumerate() {
            let s = self.offsets[source] + k;
            if !pruned(e.to, e.weight) {
                cost[s] = e.weight;
                heap.push(Reverse(Key(e.weight, s)));
            }
        }
        let unconstrained = kappa.is_infinite();
        while let Some(Reverse(Key(c, s))) = heap.pop() {
            if done[s] {
                continue;
            }
            done[s] = true;
            let (i, j) = (self.tails[s], self.head(s));
            if j == target {
                return Ok(PathResult::found(self.points, kq, self.unwind(&pred, s), c));
            }
            let (xi, xj) = (self.points[i].as_ref(), self.points[j].as_ref());
            for (k, e) in self.g.neighbors(j).iter().enumerate() {
                let t = self.offsets[j] + k;
                if done[t] {
                    continue;
                }
                let nc = c + e.weight;
                if nc >= cost[t] || pruned(e.to, nc) {
                    continue;
                }
                if !unconstrained && triple_curvature(xi, xj, self.points[e.to].as_ref()) > kappa {
                    continue;
                }
                cost[t] = nc;
                pred[t] = s;
                heap.push(Reverse(Key(nc, t)));
            }
        }
        Ok(PathResult::infeasible(source, target, kq))
    }

    fn unwind(&self, pred: &[usize], mut s: usize) -> Vec<usize> {
        let mut nodes = vec![self.head(s)];
        loop {
            nodes.push(self.tails[s]);
            if pred[s] == usize::MAX {
                break;
            }
            s = pred[s];
        }
        nodes.reverse();
        nodes
    }
}

/// One-off constrained query; build a [`ConstrainedSolver`] to reuse the
/// state layout across queries.
pub fn constrained_shortest<P: AsRef<[f64]>>(
    g: &NeighborhoodGraph,
    points: &[P],
    kappa: Curvature,
    source: usize,
    target: usize,
) -> Result<PathResult> {
    ConstrainedSolver::new(g, points)?.shortest(kappa, source, target)
}

pub const BRUTE_FORCE_MAX_NODES: usize = 12;

/// Exhaustive depth-first search over walks of at most `max_hops` edges
/// that never repeat a directed edge and satisfy the curvature constraint
/// at every interior vertex. Returns the shortest length found or `+∞`.
pub fn brute_force_constrained<P: AsRef<[f64]>>(
    g: &NeighborhoodGraph,
    points: &[P],
    kappa: Curvature,
    source: usize,
    target: usize,
    max_hops: usize,
) -> Result<f64> {
    check_points(g, points)?;
    check_node(g, source)?;
    check_node(g, target)?;
    let n = g.n();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(Error::Limit(format!(
            "exhaustive search is limited to {BRUTE_FORCE_MAX_NODES} nodes, got {n}"
        )));
    }
    if max_hops > n + 3 {
        return Err(Error::Limit(format!("max_hops {max_hops} exceeds n + 3 = {}", n + 3)));
    }
    if source == target {
        return Ok(0.0);
    }
    let mut search = Exhaustive {
        g,
        points,
        kappa,
        target,
        max_hops,
        used: vec![false; n * n],
        best: f64::INFINITY,
    };
    search.extend(None, source, 0.0, 0);
    Ok(search.best)
}

struct Exhaustive<'a, P> {
    g: &'a NeighborhoodGraph,
    points: &'a [P],
    kappa: Curvature,
    target: usize,
    max_hops: usize,
    used: Vec<bool>,
    best: f64,
}

impl<P: AsRef<[f64]>> Exhaustive<'_, P> {
    fn extend(&mut self, prev: Option<usize>, cur: usize, len: f64, hops: usize) {
        if hops == self.max_hops {
            return;
        }
        let n = self.g.n();
        for e in self.g.neighbors(cur) {
            let next = e.to;
            let slot = cur * n + next;
            if self.used[slot] {
                continue;
            }
            if let Some(p) = prev {
                let c = triple_curvature(
                    self.points[p].as_ref(),
                    self.points[cur].as_ref(),
                    self.points[next].as_ref(),
                );
                if c > self.kappa {
                    continue;
                }
            }
            let total = len + e.weight;
            if total >= self.best {
                continue;
            }
            if next == self.target {
                self.best = total;
            }
            self.used[slot] = true;
            self.extend(Some(cur), next, total, hops + 1);
            self.used[slot] = false;
        }
    }
}

/// Relative tolerance for ties in the nearest-sample set I(x).
pub const NEAREST_TIE_TOL: f64 = 1e-12;

/// Sample indices at minimal distance from `x`, ties within
/// [`NEAREST_TIE_TOL`] relative.
pub fn nearest_set<P: AsRef<[f64]>>(points: &[P], x: &[f64]) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::invalid("nearest sample of an empty sample"));
    }
    if let Some(p) = points.iter().find(|p| p.as_ref().len() != x.len()) {
        return Err(Error::domain(format!(
            "query of dimension {} against sample of dimension {}",
            x.len(),
            p.as_ref().len()
        )));
    }
    let d: Vec<f64> = points.iter().map(|p| distance(p.as_ref(), x)).collect();
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    let cut = min * (1.0 + NEAREST_TIE_TOL);
    Ok((0..points.len()).filter(|&i| d[i] <= cut).collect())
}

/// Extension of the graph distance to arbitrary points: the smallest
/// distance between a sample point nearest to `x` and one nearest to `y`.
/// With `kappa` the constrained graph distance is used.
pub fn pseudo_metric<P: AsRef<[f64]>>(
    points: &[P],
    g: &NeighborhoodGraph,
    x: &[f64],
    y: &[f64],
    kappa: Option<Curvature>,
) -> Result<f64> {
    check_points(g, points)?;
    let ix = nearest_set(points, x)?;
    let iy = nearest_set(points, y)?;
    let mut best = f64::INFINITY;
    match kappa {
        None => {
            for &i in &ix {
                let field = dijkstra(g, i)?;
                for &j in &iy {
                    best = best.min(field.dist[j]);
                }
            }
        }
        Some(k) => {
            let solver = ConstrainedSolver::new(g, points)?;
            for &i in &ix {
                for &j in &iy {
                    best = best.min(solver.shortest(k, i, j)?.length);
                }
            }
        }
    }
    Ok(best)
}
