//! Path lengths as partition sums, dyadic refinement for parametrized
//! paths, and chain metrics restricted to path-like steps.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chains::ChainGraph;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::point::{euclidean_distance_f64, sup_distance_f64, SparsePoint};
use crate::space::{FiniteMetricSpace, PointId};
use crate::spaces::slit_crossing;
use crate::spaces::x::GAMMA_SEGMENT;

/// Deepest dyadic level evaluated by [`refine_length`].
pub const MAX_REFINE_DEPTH: u32 = 24;

/// Metric used for free (coordinate) polylines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathMetric {
    Sup,
    Euclidean,
}

impl PathMetric {
    pub fn dist(self, a: &SparsePoint, b: &SparsePoint) -> f64 {
        match self {
            PathMetric::Sup => sup_distance_f64(a, b),
            PathMetric::Euclidean => euclidean_distance_f64(a, b),
        }
    }
}

/// A polyline given by its vertices, either free coordinates or ids in a
/// space file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolylinePath {
    InSpace {
        space: String,
        ids: Vec<PointId>,
    },
    Free {
        metric: PathMetric,
        vertices: Vec<SparsePoint>,
    },
}

/// Sum of consecutive distances (the partition sum at the vertices).
pub fn polyline_length(vertices: &[SparsePoint], metric: PathMetric) -> Result<ExtReal> {
    if vertices.is_empty() {
        return Err(Error::InvalidParameter(
            "a polyline needs at least one vertex".into(),
        ));
    }
    ExtReal::new(vertices.windows(2).map(|w| metric.dist(&w[0], &w[1])).sum())
}

/// Length of the polyline through the given points of `space`.
pub fn path_length(space: &FiniteMetricSpace, ids: &[PointId]) -> Result<ExtReal> {
    if ids.is_empty() {
        return Err(Error::InvalidParameter(
            "a polyline needs at least one vertex".into(),
        ));
    }
    if let Some(&bad) = ids.iter().find(|&&i| i >= space.len()) {
        return Err(Error::InvalidParameter(format!(
            "point id {bad} out of range"
        )));
    }
    Ok(ExtReal::from_f64_unchecked(
        ids.windows(2).map(|w| space.dist(w[0], w[1])).sum(),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineReport {
    /// Partition sum at the final depth (a lower bound for the length).
    pub length: f64,
    /// Number of intervals in the final partition.
    pub partitions: u64,
    pub depth: u32,
    /// Whether the last doubling increased the sum by at most `tol`.
    pub converged: bool,
}

/// Partition sums of `sampler` on dyadic partitions of `[0, 1]`, doubling
/// until the increase is at most `tol` or `max_depth` is reached.
pub fn refine_length(
    sampler: &dyn Fn(f64) -> SparsePoint,
    metric: PathMetric,
    tol: f64,
    max_depth: u32,
) -> Result<RefineReport> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol must be nonnegative, got {tol}"
        )));
    }
    let max_depth = max_depth.min(MAX_REFINE_DEPTH);
    let sum_at = |depth: u32| -> f64 {
        let n = 1u64 << depth;
        let mut prev = sampler(0.0);
        let mut total = 0.0;
        for i in 1..=n {
            let cur = sampler(i as f64 / n as f64);
            total += metric.dist(&prev, &cur);
            prev = cur;
        }
        total
    };
    let mut length = sum_at(0);
    for depth in 1..=max_depth {
        let next = sum_at(depth);
        let increase = next - length;
        length = length.max(next);
        if increase <= tol {
            return Ok(RefineReport {
                length,
                partitions: 1 << depth,
                depth,
                converged: true,
            });
        }
    }
    Ok(RefineReport {
        length,
        partitions: 1 << max_depth,
        depth: max_depth,
        converged: false,
    })
}

type PredFn = dyn Fn(&FiniteMetricSpace, PointId, PointId) -> bool + Send + Sync;

/// A symmetric rule deciding which chain steps count as path-like.
#[derive(Clone)]
pub struct AdmissibilityPredicate {
    name: String,
    f: Arc<PredFn>,
}

impl std::fmt::Debug for AdmissibilityPredicate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_tuple("AdmissibilityPredicate")
            .field(&self.name)
            .finish()
    }
}

impl AdmissibilityPredicate {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&FiniteMetricSpace, PointId, PointId) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn admissible(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> bool {
        a == b || (self.f)(space, a, b)
    }

    pub fn always() -> Self {
        Self::new("always", |_, _, _| true)
    }

    /// Steps whose segment misses the slit.
    pub fn not_slit_crossing() -> Self {
        Self::new("not-slit-crossing", |s, a, b| {
            !slit_crossing(s.point(a), s.point(b))
        })
    }

    /// Steps within one spine or one curve of the spider, or touching `q`.
    pub fn spider_pieces() -> Self {
        Self::new("same-piece-or-q", |s, a, b| {
            let q = s.landmark("q").ok();
            if q == Some(a) || q == Some(b) {
                return true;
            }
            let p = s.landmark("p").ok();
            let (Some(ma), Some(mb)) = (s.meta(a), s.meta(b)) else {
                return false;
            };
            let curve = |m: crate::space::PointMeta| m.segment == GAMMA_SEGMENT;
            let foot = |m: crate::space::PointMeta| m.segment == 3 && m.t == 1.0;
            match (curve(ma), curve(mb)) {
                (false, false) => ma.piece == mb.piece && ma.piece >= 2,
                (true, true) => ma.piece == mb.piece,
                (true, false) => p == Some(b) || (mb.piece == ma.piece && foot(mb)),
                (false, true) => p == Some(a) || (ma.piece == mb.piece && foot(ma)),
            }
        })
    }

    /// Steps along one tooth (same `x`) or along the base (`y = 0`).
    pub fn comb_lines() -> Self {
        Self::new("same-tooth-or-base", |s, a, b| {
            let (pa, pb) = (s.point(a), s.point(b));
            pa.get(1) == pb.get(1) || (pa.get(2) == 0.0 && pb.get(2) == 0.0)
        })
    }

    /// No step is path-like (totally path-disconnected samples).
    pub fn never() -> Self {
        Self::new("never", |_, _, _| false)
    }
}

/// The predicate a generator supplies for estimating `d̄`, if any.
pub fn predicate_for(space: &FiniteMetricSpace) -> Option<AdmissibilityPredicate> {
    Some(match space.generator.as_str() {
        "slit-plane" => AdmissibilityPredicate::not_slit_crossing(),
        "y-spider" | "x-rectifiable" => AdmissibilityPredicate::spider_pieces(),
        "comb" => AdmissibilityPredicate::comb_lines(),
        "rational-grid" => AdmissibilityPredicate::never(),
        "multi-edge-graph" => AdmissibilityPredicate::always(),
        _ => return None,
    })
}

/// Rows of the chain metric using only admissible steps.
pub fn constrained_chain_metric(
    space: &FiniteMetricSpace,
    eps: f64,
    pred: &AdmissibilityPredicate,
    sources: &[PointId],
) -> Result<Vec<Vec<f64>>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    Ok(ChainGraph::constrained(space, eps, pred.clone()).rows(sources))
}
