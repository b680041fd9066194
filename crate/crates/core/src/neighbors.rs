//! ε-neighbor enumeration.
//!
//! Coordinate spaces are bucketed by support signature (the set of nonzero
//! coordinate indices). A query only visits buckets whose missing
//! coordinates are already within ε of zero, and inside a bucket a uniform
//! grid of cell size ε over the signature coordinates narrows candidates to
//! adjacent cells. In the spider-like spaces this keeps cross-piece
//! candidates to the few places where pieces actually come close.

use std::collections::HashMap;
use std::sync::Arc;

use crate::graph::StepGraph;
use crate::point::SparsePoint;
use crate::space::{FiniteMetricSpace, Metric, PointId};
use crate::spaces::glue::GluedMetric;

/// Buckets up to this many signature coordinates use grid cells.
const GRID_DIMS: usize = 3;

type Cell = [i64; GRID_DIMS];

struct Bucket {
    signature: Vec<u32>,
    /// Members grouped by grid cell (only for low-dimensional signatures).
    cells: HashMap<Cell, Vec<u32>>,
    members: Vec<u32>,
}

/// Range-query index over a coordinate space, built for one ε.
pub struct NeighborIndex {
    eps: f64,
    buckets: Vec<Bucket>,
}

fn cell_of(v: f64, eps: f64) -> i64 {
    (v / eps).floor() as i64
}

impl NeighborIndex {
    pub fn new(points: &[SparsePoint], eps: f64) -> Self {
        assert!(eps > 0.0);
        let mut by_sig: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut buckets: Vec<Bucket> = Vec::new();
        for (id, p) in points.iter().enumerate() {
            let sig: Vec<u32> = p.support().collect();
            let b = *by_sig.entry(sig.clone()).or_insert_with(|| {
                buckets.push(Bucket {
                    signature: sig,
                    cells: HashMap::new(),
                    members: Vec::new(),
                });
                buckets.len() - 1
            });
            let bucket = &mut buckets[b];
            bucket.members.push(id as u32);
            if bucket.signature.len() <= GRID_DIMS {
                let mut cell = [0i64; GRID_DIMS];
                for (k, &(_, v)) in p.coords().iter().enumerate() {
                    cell[k] = cell_of(v, eps);
                }
                bucket.cells.entry(cell).or_default().push(id as u32);
            }
        }
        Self { eps, buckets }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Calls `f(id)` for every candidate that may lie within ε of `x`
    /// (a superset; callers filter by exact distance).
    pub fn for_each_candidate(&self, x: &SparsePoint, f: &mut dyn FnMut(u32)) {
        let eps = self.eps;
        for bucket in &self.buckets {
            let sig = &bucket.signature;
            // coordinates of x the bucket lacks must be within eps of zero
            let outside_ok = x
                .coords()
                .iter()
                .all(|&(i, v)| v.abs() <= eps || sig.binary_search(&i).is_ok());
            if !outside_ok {
                continue;
            }
            if sig.len() > GRID_DIMS {
                bucket.members.iter().for_each(|&id| f(id));
                continue;
            }
            let mut lo = [0i64; GRID_DIMS];
            let mut hi = [0i64; GRID_DIMS];
            for (k, &i) in sig.iter().enumerate() {
                let v = x.get(i);
                lo[k] = cell_of(v - eps, eps);
                hi[k] = cell_of(v + eps, eps);
            }
            let mut cell = lo;
            loop {
                if let Some(ids) = bucket.cells.get(&cell) {
                    ids.iter().for_each(|&id| f(id));
                }
                // odometer increment over the signature dimensions
                let mut k = 0;
                loop {
                    if k == sig.len() {
                        break;
                    }
                    if cell[k] < hi[k] {
                        cell[k] += 1;
                        break;
                    }
                    cell[k] = lo[k];
                    k += 1;
                }
                if k == sig.len() {
                    break;
                }
            }
        }
    }
}

/// The ε-graph of a space: edges join distinct points at distance `≤ ε`,
/// weighted by that distance. For glued spaces only within-piece edges are
/// generated; every cross-piece step factors through a glue point into
/// within-piece steps of no greater size, so shortest chains are unchanged.
pub struct SpaceSteps<'a> {
    space: &'a FiniteMetricSpace,
    eps: f64,
    kind: StepKind,
}

enum StepKind {
    Coords(NeighborIndex),
    Matrix,
    Glued(Vec<ClassSteps>),
}

/// Steps of one (prototype, scale) class of glued leaves.
struct ClassSteps {
    proto: Arc<FiniteMetricSpace>,
    local_eps: f64,
    index: Option<NeighborIndex>,
}

impl ClassSteps {
    fn for_each(&self, local: usize, f: &mut dyn FnMut(usize, f64)) {
        for_each_coord_or_matrix(&self.proto, self.index.as_ref(), self.local_eps, local, f);
    }
}

fn for_each_coord_or_matrix(
    space: &FiniteMetricSpace,
    index: Option<&NeighborIndex>,
    eps: f64,
    u: usize,
    f: &mut dyn FnMut(usize, f64),
) {
    match (space.metric(), index) {
        (Metric::Sup | Metric::Euclidean, Some(index)) => {
            index.for_each_candidate(space.point(u), &mut |v| {
                let v = v as usize;
                if v != u {
                    let d = space.dist(u, v);
                    if d <= eps {
                        f(v, d);
                    }
                }
            });
        }
        (Metric::Matrix(m), _) => {
            for v in 0..m.len() {
                if v != u {
                    let d = m.get(u, v);
                    if d <= eps {
                        f(v, d);
                    }
                }
            }
        }
        _ => unreachable!("prototype spaces carry coordinates or a matrix"),
    }
}

impl<'a> SpaceSteps<'a> {
    pub fn new(space: &'a FiniteMetricSpace, eps: f64) -> Self {
        assert!(eps > 0.0, "eps must be positive");
        let kind = match space.metric() {
            Metric::Sup | Metric::Euclidean => {
                StepKind::Coords(NeighborIndex::new(space.points(), eps))
            }
            Metric::Matrix(_) => StepKind::Matrix,
            Metric::Glued(g) => StepKind::Glued(class_steps(g, eps)),
        };
        Self { space, eps, kind }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn space(&self) -> &'a FiniteMetricSpace {
        self.space
    }
}

fn class_steps(g: &GluedMetric, eps: f64) -> Vec<ClassSteps> {
    g.classes()
        .iter()
        .map(|c| {
            let proto = g.protos()[c.proto].clone();
            let local_eps = eps / c.scale;
            let index = match proto.metric() {
                Metric::Sup | Metric::Euclidean => {
                    Some(NeighborIndex::new(proto.points(), local_eps))
                }
                _ => None,
            };
            ClassSteps {
                proto,
                local_eps,
                index,
            }
        })
        .collect()
}

impl StepGraph for SpaceSteps<'_> {
    fn node_count(&self) -> usize {
        self.space.len()
    }

    fn for_each_step(&self, u: usize, f: &mut dyn FnMut(usize, f64)) {
        match &self.kind {
            StepKind::Coords(index) => {
                for_each_coord_or_matrix(self.space, Some(index), self.eps, u, f)
            }
            StepKind::Matrix => for_each_coord_or_matrix(self.space, None, self.eps, u, f),
            StepKind::Glued(classes) => {
                let Metric::Glued(g) = self.space.metric() else {
                    unreachable!()
                };
                for &(leaf, local) in g.memberships(u) {
                    let leaf = &g.leaves()[leaf as usize];
                    let scale = g.classes()[leaf.class].scale;
                    classes[leaf.class].for_each(local as usize, &mut |v, w| {
                        f(leaf.ids[v] as usize, w * scale)
                    });
                }
            }
        }
    }
}

/// Exactly the points `y != x` with `d(x, y) ≤ eps`, ascending by id.
pub fn epsilon_neighbors(space: &FiniteMetricSpace, x: PointId, eps: f64) -> Vec<(PointId, f64)> {
    assert!(eps > 0.0, "eps must be positive");
    let mut out = Vec::new();
    match space.metric() {
        Metric::Sup | Metric::Euclidean => {
            let index = NeighborIndex::new(space.points(), eps);
            for_each_coord_or_matrix(space, Some(&index), eps, x, &mut |v, d| out.push((v, d)));
        }
        Metric::Matrix(_) => {
            for_each_coord_or_matrix(space, None, eps, x, &mut |v, d| out.push((v, d)))
        }
        Metric::Glued(_) => {
            for v in 0..space.len() {
                if v != x {
                    let d = space.dist(x, v);
                    if d <= eps {
                        out.push((v, d));
                    }
                }
            }
        }
    }
    out.sort_unstable_by_key(|e| e.0);
    out
}
