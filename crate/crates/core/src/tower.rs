//! Iterated chain metrics `d, d_{ε₁}, (d_{ε₁})_{ε₂}, …` on spaces too large
//! for dense matrices.
//!
//! Level `i` is the shortest-path metric of the graph `G_i` whose edges are
//! the pairs at level-`(i−1)` distance `≤ ε_i`. `G_1` is the ε-graph of the
//! space.
//!
//! Two evaluations are provided. [`ChainTower::new`] uses that level `i`
//! equals the chain metric at `min(ε₁, …, ε_i)`: a larger ε only adds
//! edges whose weights are already chain lengths of the level below, and a
//! smaller ε keeps exactly the pairs at base distance `≤ ε`, where the two
//! metrics agree. [`ChainTower::nested`] builds every `G_i` literally: the
//! level-`i` values up to `ε_{i+1}` are a Dijkstra ball of that radius in
//! `G_i`, stored as adjacency lists.

use crate::chains::par_map;
use crate::error::{Error, Result};
use crate::graph::{dijkstra, BoundedSearch, StepGraph};
use crate::matrix::DistanceMatrix;
use crate::neighbors::SpaceSteps;
use crate::space::{FiniteMetricSpace, PointId};

/// Default cap on stored neighbor entries across all levels.
pub const DEFAULT_ENTRY_CAP: usize = 150_000_000;

const CHUNK: usize = 2048;

/// Compressed adjacency lists.
struct Csr {
    start: Vec<usize>,
    target: Vec<u32>,
    weight: Vec<f64>,
}

impl StepGraph for Csr {
    fn node_count(&self) -> usize {
        self.start.len() - 1
    }

    fn for_each_step(&self, u: usize, f: &mut dyn FnMut(usize, f64)) {
        for k in self.start[u]..self.start[u + 1] {
            f(self.target[k] as usize, self.weight[k]);
        }
    }
}

enum LevelGraph<'a> {
    Steps(SpaceSteps<'a>),
    Lists(Csr),
}

impl LevelGraph<'_> {
    fn as_graph(&self) -> &dyn StepGraph {
        match self {
            LevelGraph::Steps(g) => g,
            LevelGraph::Lists(g) => g,
        }
    }
}

pub struct ChainTower<'a> {
    space: &'a FiniteMetricSpace,
    eps: Vec<f64>,
    /// `graphs[i]` is `G_{i+1}`.
    graphs: Vec<LevelGraph<'a>>,
}

fn check_levels(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one level is required".into(),
        ));
    }
    if let Some(&e) = eps.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {e}"
        )));
    }
    Ok(())
}

impl<'a> ChainTower<'a> {
    /// Levels `1..=eps.len()` as ε-graphs at the running minimum of ε.
    pub fn new(space: &'a FiniteMetricSpace, eps: &[f64]) -> Result<Self> {
        check_levels(eps)?;
        let mut graphs: Vec<LevelGraph<'a>> = Vec::with_capacity(eps.len());
        let mut running = f64::INFINITY;
        for &e in eps {
            running = running.min(e);
            graphs.push(LevelGraph::Steps(SpaceSteps::new(space, running)));
        }
        Ok(Self {
            space,
            eps: eps.to_vec(),
            graphs,
        })
    }

    /// Levels built literally from bounded searches one level down, storing
    /// at most `entry_cap` neighbor entries in total.
    pub fn nested(space: &'a FiniteMetricSpace, eps: &[f64], entry_cap: usize) -> Result<Self> {
        check_levels(eps)?;
        let n = space.len();
        let base = SpaceSteps::new(space, eps[0]);
        let mut upper: Vec<Csr> = Vec::new();
        let mut stored = 0usize;
        for &radius in &eps[1..] {
            let graph: &dyn StepGraph = match upper.last() {
                Some(g) => g,
                None => &base,
            };
            let chunks: Vec<usize> = (0..n.div_ceil(CHUNK)).collect();
            let parts = par_map(&chunks, |c| {
                let mut search = BoundedSearch::new(n);
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(n);
                (lo..hi)
                    .map(|u| search.ball(graph, u, radius))
                    .collect::<Vec<_>>()
            });
            let total: usize = parts.iter().flatten().map(Vec::len).sum();
            stored += total;
            if stored > entry_cap {
                return Err(Error::ResourceCap(format!(
                    "{stored} neighbor entries exceed {entry_cap}"
                )));
            }
            let mut start = Vec::with_capacity(n + 1);
            let mut target = Vec::with_capacity(total);
            let mut weight = Vec::with_capacity(total);
            start.push(0);
            for ball in parts.into_iter().flatten() {
                for (v, w) in ball {
                    target.push(v as u32);
                    weight.push(w);
                }
                start.push(target.len());
            }
            upper.push(Csr {
                start,
                target,
                weight,
            });
        }
        let graphs = std::iter::once(LevelGraph::Steps(base))
            .chain(upper.into_iter().map(LevelGraph::Lists))
            .collect();
        Ok(Self {
            space,
            eps: eps.to_vec(),
            graphs,
        })
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    /// Number of chain levels above the base metric.
    pub fn levels(&self) -> usize {
        self.eps.len()
    }

    fn graph(&self, level: usize) -> &dyn StepGraph {
        assert!((1..=self.levels()).contains(&level), "level out of range");
        self.graphs[level - 1].as_graph()
    }

    /// Level-`level` distances from each source (level 0 is the metric itself).
    pub fn rows(&self, level: usize, sources: &[PointId]) -> Vec<Vec<f64>> {
        if level == 0 {
            return par_map(sources, |s| {
                (0..self.space.len())
                    .map(|t| self.space.dist(s, t))
                    .collect()
            });
        }
        let g = self.graph(level);
        par_map(sources, |s| dijkstra(g, s))
    }

    pub fn distance(&self, level: usize, s: PointId, t: PointId) -> f64 {
        if level == 0 {
            return self.space.dist(s, t);
        }
        let g = self.graph(level);
        BoundedSearch::new(g.node_count()).distance(g, s, t)
    }

    /// Level metric restricted to `ids` (row/column order follows `ids`).
    pub fn restricted(&self, level: usize, ids: &[PointId]) -> Result<DistanceMatrix> {
        let rows = self.rows(level, ids);
        DistanceMatrix::from_fn(ids.len(), |i, j| rows[i][ids[j]].min(rows[j][ids[i]]))
    }

    /// Stored neighbor entries of graph `G_level` (0 for implicit ε-graphs).
    pub fn stored_entries(&self, level: usize) -> usize {
        match self.graphs.get(level.wrapping_sub(1)) {
            Some(LevelGraph::Lists(g)) => g.target.len(),
            _ => 0,
        }
    }
}
