//! r-ball and (r, α)-annulus neighbourhood graphs over a sample, built
//! through a uniform-grid spatial hash.

use std::collections::{HashMap, VecDeque};
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::distance;
use crate::surfaces::SampleSet;

pub const MAX_DIM: usize = 16;

/// Uniform grid over ℝ^D. Point indices are stored bucketed by cell, with
/// each occupied cell mapped to its slice of the bucket array.
#[derive(Clone, Debug)]
pub struct SpatialIndex {
    cell: f64,
    dim: usize,
    cells: HashMap<Box<[i64]>, Range<usize>>,
    order: Vec<usize>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl SpatialIndex {
    pub fn build<P: AsRef<[f64]>>(points: &[P], cell: f64) -> Result<Self> {
        if !(cell.is_finite() && cell > 0.0) {
            return Err(Error::invalid(format!("cell size must be finite and > 0, got {cell}")));
        }
        let dim = points.first().map_or(0, |p| p.as_ref().len());
        if dim > MAX_DIM {
            return Err(Error::invalid(format!("dimension {dim} exceeds {MAX_DIM}")));
        }
        if let Some(p) = points.iter().find(|p| p.as_ref().len() != dim) {
            return Err(Error::domain(format!(
                "mixed dimensions {} and {dim} in one index",
                p.as_ref().len()
            )));
        }
        let keys: Vec<Box<[i64]>> = points
            .iter()
            .map(|p| cell_key(p.as_ref(), cell).into_boxed_slice())
            .collect();
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));

        let mut cells = HashMap::new();
        let mut lo = vec![i64::MAX; dim];
        let mut hi = vec![i64::MIN; dim];
        let mut start = 0;
        while start < order.len() {
            let key = &keys[order[start]];
            let mut end = start + 1;
            while end < order.len() && keys[order[end]] == *key {
                end += 1;
            }
            for (d, &c) in key.iter().enumerate() {
                lo[d] = lo[d].min(c);
                hi[d] = hi[d].max(c);
            }
            cells.insert(key.clone(), start..end);
            start = end;
        }
        Ok(SpatialIndex { cell, dim, cells, order, lo, hi })
    }

    /// Index whose cell holds a handful of points on average, judged from
    /// the bounding box of the non-degenerate coordinates.
    pub fn with_auto_cell<P: AsRef<[f64]>>(points: &[P]) -> Self {
        let dim = points.first().map_or(0, |p| p.as_ref().len());
        let mut extents = Vec::new();
        for d in 0..dim {
            let (mn, mx) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                (a.min(p.as_ref()[d]), b.max(p.as_ref()[d]))
            });
            if mx > mn {
                extents.push(mx - mn);
            }
        }
        let cell = if extents.is_empty() {
            1.0
        } else {
            let k = extents.len() as f64;
            let volume: f64 = extents.iter().map(|e| e.ln()).sum::<f64>() / k;
            (volume.exp() / (points.len() as f64).powf(1.0 / k)).max(f64::MIN_POSITIVE)
        };
        SpatialIndex::build(points, cell).expect("auto cell size is positive and dimensions agree")
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    pub fn cell_of(&self, p: &[f64]) -> Vec<i64> {
        cell_key(p, self.cell)
    }

    /// Indices stored in the cell with the given integer coordinates.
    pub fn bucket(&self, key: &[i64]) -> &[usize] {
        self.cells.get(key).map_or(&[], |r| &self.order[r.clone()])
    }

    pub fn occupied_cells(&self) -> usize {
        self.cells.len()
    }

    /// Candidates for a radius query: every point in a cell within
    /// `ceil(radius / cell)` steps of the query's cell, a superset of the
    /// true neighbours.
    pub fn candidates(&self, q: &[f64], radius: f64, mut visit: impl FnMut(usize)) {
        let centre = cell_key(q, self.cell);
        let reach = (radius / self.cell).ceil().max(0.0) as i64;
        self.for_cells_in_box(&centre, reach, None, |ids| ids.iter().for_each(|&i| visit(i)));
    }

    /// Exact radius query: indices with `‖p − q‖ ≤ radius`, sorted.
    pub fn within<P: AsRef<[f64]>>(&self, points: &[P], q: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.candidates(q, radius, |i| {
            if distance(points[i].as_ref(), q) <= radius {
                out.push(i);
            }
        });
        out.sort_unstable();
        out
    }

    /// Nearest indexed point to `q`; ties go to the smaller index.
    pub fn nearest<P: AsRef<[f64]>>(&self, points: &[P], q: &[f64]) -> Option<(usize, f64)> {
        self.nearest_filtered(points, q, usize::MAX)
    }

    /// Nearest indexed point other than `skip`.
    pub fn nearest_excluding<P: AsRef<[f64]>>(&self, points: &[P], q: &[f64], skip: usize) -> Option<(usize, f64)> {
        self.nearest_filtered(points, q, skip)
    }

    fn nearest_filtered<P: AsRef<[f64]>>(&self, points: &[P], q: &[f64], skip: usize) -> Option<(usize, f64)> {
        if self.order.is_empty() || q.len() != self.dim {
            return None;
        }
        let centre = cell_key(q, self.cell);
        // Beyond this ring every occupied cell has been visited.
        let max_ring = (0..self.dim)
            .map(|d| (centre[d] - self.lo[d]).abs().max((self.hi[d] - centre[d]).abs()))
            .max()
            .unwrap_or(0);
        let mut best: Option<(usize, f64)> = None;
        for ring in 0..=max_ring {
            self.for_cells_in_box(&centre, ring, Some(ring), |ids| {
                for &i in ids {
                    if i == skip {
                        continue;
                    }
                    let d = distance(points[i].as_ref(), q);
                    match best {
                        Some((bi, bd)) if d > bd || (d == bd && i > bi) => {}
                        _ => best = Some((i, d)),
                    }
                }
            });
            // Unvisited points lie at least `ring` whole cells away.
            if let Some((_, bd)) = best {
                if bd <= ring as f64 * self.cell {
                    break;
                }
            }
        }
        best
    }

    /// Visits the buckets of the cells within Chebyshev distance `reach` of
    /// `centre`; with `shell = Some(k)` only those at distance exactly `k`.
    fn for_cells_in_box(&self, centre: &[i64], reach: i64, shell: Option<i64>, mut visit: impl FnMut(&[usize])) {
        let dim = centre.len();
        if dim == 0 {
            if let Some(r) = self.cells.get(centre) {
                visit(&self.order[r.clone()]);
            }
            return;
        }
        let mut key = [0i64; MAX_DIM];
        let mut off = [0i64; MAX_DIM];
        for o in off.iter_mut().take(dim) {
            *o = -reach;
        }
        loop {
            let on_shell = shell.is_none_or(|k| off[..dim].iter().any(|o| o.abs() == k));
            if on_shell {
                let mut in_range = true;
                for d in 0..dim {
                    key[d] = centre[d] + off[d];
                    if key[d] < self.lo[d] || key[d] > self.hi[d] {
                        in_range = false;
                        break;
                    }
                }
                if in_range {
                    if let Some(r) = self.cells.get(&key[..dim]) {
                        visit(&self.order[r.clone()]);
                    }
                }
            }
            let mut d = 0;
            loop {
                if d == dim {
                    return;
                }
                if off[d] < reach {
                    off[d] += 1;
                    break;
                }
                off[d] = -reach;
                d += 1;
            }
        }
    }
}

fn cell_key(p: &[f64], cell: f64) -> Vec<i64> {
    p.iter().map(|&c| (c / cell).floor() as i64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    /// `i ~ j` iff `‖x_i − x_j‖ ≤ r`.
    Ball { r: f64 },
    /// `i ~ j` iff `αr ≤ ‖x_i − x_j‖ ≤ r`.
    Annulus { r: f64, alpha: f64 },
}

impl GraphKind {
    pub fn validate(&self) -> Result<()> {
        let r = self.radius();
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::invalid(format!("graph radius must be finite and > 0, got {r}")));
        }
        if let GraphKind::Annulus { alpha, .. } = *self {
            if !(0.0..1.0).contains(&alpha) {
                return Err(Error::invalid(format!("annulus alpha must lie in [0, 1), got {alpha}")));
            }
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        match *self {
            GraphKind::Ball { r } | GraphKind::Annulus { r, .. } => r,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            GraphKind::Ball { .. } => None,
            GraphKind::Annulus { alpha, .. } => Some(alpha),
        }
    }

    /// Whether a pair at distance `d` is joined. Coincident points never are.
    pub fn admits(&self, d: f64) -> bool {
        match *self {
            GraphKind::Ball { r } => d > 0.0 && d <= r,
            GraphKind::Annulus { r, alpha } => d > 0.0 && d >= alpha * r && d <= r,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub to: usize,
    pub weight: f64,
}

/// Undirected weighted graph over sample indices `0..n`, stored as
/// neighbour lists sorted by index.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborhoodGraph {
    kind: GraphKind,
    adjacency: Vec<Vec<Edge>>,
}

impl NeighborhoodGraph {
    /// Assembles a graph from undirected edges `(i, Edge { to: j, .. })`,
    /// checking indices, weights against `kind`, and duplicates.
    pub fn from_edges(n: usize, kind: GraphKind, edges: Vec<(usize, Edge)>) -> Result<Self> {
        kind.validate()?;
        let mut adjacency = vec![Vec::new(); n];
        for (i, e) in edges {
            if i >= n || e.to >= n {
                return Err(Error::invalid(format!("edge {i},{} out of range for {n} nodes", e.to)));
            }
            if i == e.to {
                return Err(Error::invalid(format!("self-loop at node {i}")));
            }
            if !kind.admits(e.weight) {
                return Err(Error::invalid(format!(
                    "edge {i},{} weight {} violates {kind:?}",
                    e.to, e.weight
                )));
            }
            adjacency[i].push(e);
            adjacency[e.to].push(Edge { to: i, weight: e.weight });
        }
        for (i, list) in adjacency.iter_mut().enumerate() {
            list.sort_by_key(|e| e.to);
            if let Some(w) = list.windows(2).find(|w| w[0].to == w[1].to) {
                return Err(Error::invalid(format!("duplicate edge {i},{}", w[0].to)));
            }
        }
        Ok(NeighborhoodGraph { kind, adjacency })
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, i: usize) -> &[Edge] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let list = self.adjacency.get(i)?;
        list.binary_search_by_key(&j, |e| e.to).ok().map(|k| list[k].weight)
    }

    /// Each undirected edge once, as `(i, edge)` with `i < edge.to`, in
    /// lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, Edge)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |e| e.to > i).map(move |e| (i, *e)))
    }
}

pub fn build_graph(sample: &SampleSet, kind: GraphKind) -> Result<NeighborhoodGraph> {
    build_graph_from_points(sample.points(), kind)
}

/// Index-accelerated construction over raw points, with cell size `r`.
pub fn build_graph_from_points<P: AsRef<[f64]> + Sync>(points: &[P], kind: GraphKind) -> Result<NeighborhoodGraph> {
    check_build(points.len(), kind)?;
    let r = kind.radius();
    let index = SpatialIndex::build(points, r)?;
    let adjacency = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut list = Vec::new();
            index.candidates(points[i].as_ref(), r, |j| {
                if j != i {
                    let w = pair_weight(points, i, j);
                    if kind.admits(w) {
                        list.push(Edge { to: j, weight: w });
                    }
                }
            });
            list.sort_unstable_by_key(|e| e.to);
            list
        })
        .collect();
    Ok(NeighborhoodGraph { kind, adjacency })
}

pub const BRUTE_FORCE_LIMIT: usize = 2000;

/// All-pairs construction, kept as a reference for the indexed builder.
pub fn build_graph_brute_force<P: AsRef<[f64]>>(points: &[P], kind: GraphKind) -> Result<NeighborhoodGraph> {
    check_build(points.len(), kind)?;
    if points.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::Limit(format!(
            "all-pairs construction is limited to {BRUTE_FORCE_LIMIT} points, got {}",
            points.len()
        )));
    }
    let dim = points[0].as_ref().len();
    if points.iter().any(|p| p.as_ref().len() != dim) {
        return Err(Error::domain("mixed dimensions in one sample"));
    }
    let mut adjacency = vec![Vec::new(); points.len()];
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let w = pair_weight(points, i, j);
            if kind.admits(w) {
                adjacency[i].push(Edge { to: j, weight: w });
                adjacency[j].push(Edge { to: i, weight: w });
            }
        }
    }
    Ok(NeighborhoodGraph { kind, adjacency })
}

fn check_build(n: usize, kind: GraphKind) -> Result<()> {
    kind.validate()?;
    if n < 2 {
        return Err(Error::invalid(format!("a graph needs at least 2 points, got {n}")));
    }
    Ok(())
}

/// Weight of `{i, j}`, always evaluated in the same argument order.
fn pair_weight<P: AsRef<[f64]>>(points: &[P], i: usize, j: usize) -> f64 {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    distance(points[a].as_ref(), points[b].as_ref())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub mean_degree: f64,
    pub components: usize,
}

pub fn graph_stats(g: &NeighborhoodGraph) -> GraphStats {
    let n = g.n();
    let degrees = || (0..n).map(|i| g.degree(i));
    GraphStats {
        nodes: n,
        edges: g.edge_count(),
        min_degree: degrees().min().unwrap_or(0),
        max_degree: degrees().max().unwrap_or(0),
        mean_degree: if n == 0 { 0.0 } else { degrees().sum::<usize>() as f64 / n as f64 },
        components: component_labels(g).1,
    }
}

/// Component label per node (numbered in order of smallest member) and the
/// number of components.
pub fn component_labels(g: &NeighborhoodGraph) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; g.n()];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for s in 0..g.n() {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for e in g.neighbors(u) {
                if label[e.to] == usize::MAX {
                    label[e.to] = count;
                    queue.push_back(e.to);
                }
            }
        }
        count += 1;
    }
    (label, count)
}
