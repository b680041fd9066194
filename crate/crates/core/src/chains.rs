//! Chain metrics: shortest ε-chains on sampled spaces, the chain operator on
//! explicit matrices, `d₀` estimation over shrinking ε, iterates and
//! waypoint extraction along minimizing chains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::{ExtReal, EXACT_TOL};
use crate::graph::{dijkstra, BoundedSearch, StepGraph};
use crate::length::AdmissibilityPredicate;
use crate::matrix::{validate_metric, DistanceMatrix};
use crate::neighbors::SpaceSteps;
use crate::space::{FiniteMetricSpace, PointId};

/// Triples sampled when validating large inputs to the chain operator.
pub const OPERATOR_VALIDATION_BUDGET: u64 = 200_000;

/// Largest space for which all-pairs chain metrics are materialized.
pub const ALL_PAIRS_CAP: usize = 20_000;

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
/// Output order always matches input order.
pub(crate) fn par_map<T: Send>(items: &[usize], f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(|&i| f(i)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(|&i| f(i)).collect()
    }
}

/// A witness ε-chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub points: Vec<PointId>,
    pub eps: f64,
    pub length: ExtReal,
}

impl Chain {
    /// Checks the step bound and recomputes the length in `space`.
    pub fn verify(&self, space: &FiniteMetricSpace) -> bool {
        let mut total = 0.0;
        for w in self.points.windows(2) {
            let d = space.dist(w[0], w[1]);
            if d > self.eps {
                return false;
            }
            total += d;
        }
        ExtReal::from_f64_unchecked(total).approx_eq(self.length, EXACT_TOL)
    }

    pub fn hops(&self) -> usize {
        self.points.len().saturating_sub(1)
    }
}

/// The ε-graph of a space, optionally restricted to admissible steps.
pub struct ChainGraph<'a> {
    steps: SpaceSteps<'a>,
    pred: Option<AdmissibilityPredicate>,
}

impl<'a> ChainGraph<'a> {
    pub fn new(space: &'a FiniteMetricSpace, eps: f64) -> Self {
        Self {
            steps: SpaceSteps::new(space, eps),
            pred: None,
        }
    }

    pub fn constrained(
        space: &'a FiniteMetricSpace,
        eps: f64,
        pred: AdmissibilityPredicate,
    ) -> Self {
        Self {
            steps: SpaceSteps::new(space, eps),
            pred: Some(pred),
        }
    }

    pub fn space(&self) -> &'a FiniteMetricSpace {
        self.steps.space()
    }

    pub fn eps(&self) -> f64 {
        self.steps.eps()
    }

    /// Chain distances from each source to every point.
    pub fn rows(&self, sources: &[PointId]) -> Vec<Vec<f64>> {
        par_map(sources, |s| dijkstra(self, s))
    }

    /// Chain distance between two points (`∞` if no chain exists).
    pub fn distance(&self, s: PointId, t: PointId) -> f64 {
        BoundedSearch::new(self.node_count()).distance(self, s, t)
    }

    /// Full chain metric; only for spaces up to [`ALL_PAIRS_CAP`] points.
    pub fn matrix(&self) -> Result<DistanceMatrix> {
        let n = self.node_count();
        if n > ALL_PAIRS_CAP {
            return Err(Error::ResourceCap(format!(
                "all-pairs chain metric on {n} points"
            )));
        }
        let ids: Vec<usize> = (0..n).collect();
        let rows = self.rows(&ids);
        DistanceMatrix::from_fn(n, |i, j| rows[i][j].min(rows[j][i]))
    }

    /// Shortest ε-chain from `s` to `t`; among equally short chains the
    /// lexicographically smallest id sequence.
    pub fn minimizing_chain(&self, s: PointId, t: PointId) -> Result<Chain> {
        let eps = self.eps();
        if s == t {
            return Ok(Chain {
                points: vec![s],
                eps,
                length: ExtReal::ZERO,
            });
        }
        let to_t = dijkstra(self, t);
        let total = to_t[s];
        if total.is_infinite() {
            return Err(Error::Unreachable {
                source_id: s,
                target: t,
                eps,
            });
        }
        let tol = EXACT_TOL * total.max(1.0);
        let space = self.space();
        let mut points = vec![s];
        let mut cur = s;
        let mut length = 0.0;
        while cur != t {
            let mut next: Option<(usize, f64)> = None;
            self.for_each_step(cur, &mut |v, w| {
                if to_t[v] < to_t[cur]
                    && to_t[v] + w <= to_t[cur] + tol
                    && next.is_none_or(|(b, _)| v < b)
                {
                    next = Some((v, w));
                }
            });
            let (v, _) = next.expect("a shortest-path successor exists");
            length += space.dist(cur, v);
            points.push(v);
            cur = v;
        }
        Ok(Chain {
            points,
            eps,
            length: ExtReal::from_f64_unchecked(length),
        })
    }

    /// Waypoints at arc multiples of `delta` along the minimizing chain.
    pub fn waypoints(&self, s: PointId, t: PointId, delta: f64) -> Result<Waypoints> {
        let eps = self.eps();
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive, got {delta}"
            )));
        }
        if eps > delta / 4.0 {
            return Err(Error::InvalidParameter(format!(
                "eps {eps} exceeds delta/4 = {}",
                delta / 4.0
            )));
        }
        let chain = self.minimizing_chain(s, t)?;
        let total = chain.length.value();
        if delta >= total {
            return Err(Error::InvalidParameter(format!(
                "delta {delta} is not below the chain distance {total}"
            )));
        }
        let space = self.space();
        let mut arc = vec![0.0];
        for w in chain.points.windows(2) {
            arc.push(arc.last().unwrap() + space.dist(w[0], w[1]));
        }
        let n = (total / delta).floor() as usize;
        let mut picks = Vec::with_capacity(n);
        let mut i = 0;
        for k in 1..=n {
            let target = k as f64 * delta - EXACT_TOL * total;
            while arc[i] < target {
                i += 1;
            }
            picks.push(i);
        }
        let waypoints: Vec<PointId> = picks.iter().map(|&i| chain.points[i]).collect();
        let arc_positions = picks.iter().map(|&i| arc[i]).collect();
        let mut search = BoundedSearch::new(self.node_count());
        let mut legs = Vec::with_capacity(n + 1);
        let mut prev = s;
        for &w in waypoints.iter().chain(std::iter::once(&t)) {
            legs.push(search.distance(self, prev, w));
            prev = w;
        }
        let residual = (legs.iter().sum::<f64>() - total).abs();
        Ok(Waypoints {
            eps,
            delta,
            total,
            waypoints,
            arc_positions,
            legs,
            residual,
            residual_bound: 2.0 * n as f64 * eps,
            chain,
        })
    }
}

impl StepGraph for ChainGraph<'_> {
    fn node_count(&self) -> usize {
        self.steps.node_count()
    }

    fn for_each_step(&self, u: usize, f: &mut dyn FnMut(usize, f64)) {
        match &self.pred {
            None => self.steps.for_each_step(u, f),
            Some(pred) => {
                let space = self.steps.space();
                self.steps.for_each_step(u, &mut |v, w| {
                    if pred.admissible(space, u, v) {
                        f(v, w)
                    }
                })
            }
        }
    }
}

/// Result of [`extract_waypoints`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Waypoints {
    pub eps: f64,
    pub delta: f64,
    /// Chain distance between the endpoints.
    pub total: f64,
    pub waypoints: Vec<PointId>,
    /// Arc position of each waypoint along the chain.
    pub arc_positions: Vec<f64>,
    /// Chain distances `s → w₁ → … → w_N → t`; the last entry is the final leg.
    pub legs: Vec<f64>,
    /// `|Σ legs − total|`.
    pub residual: f64,
    /// `2·N·ε`.
    pub residual_bound: f64,
    pub chain: Chain,
}

/// Rows of `d_ε` for the given sources.
pub fn chain_metric_rows(
    space: &FiniteMetricSpace,
    eps: f64,
    sources: &[PointId],
) -> Vec<Vec<f64>> {
    ChainGraph::new(space, eps).rows(sources)
}

/// All-pairs `d_ε` as a matrix.
pub fn chain_metric(space: &FiniteMetricSpace, eps: f64) -> Result<DistanceMatrix> {
    check_eps(eps)?;
    ChainGraph::new(space, eps).matrix()
}

pub fn minimizing_chain(
    space: &FiniteMetricSpace,
    eps: f64,
    s: PointId,
    t: PointId,
) -> Result<Chain> {
    check_eps(eps)?;
    ChainGraph::new(space, eps).minimizing_chain(s, t)
}

pub fn extract_waypoints(
    space: &FiniteMetricSpace,
    eps: f64,
    s: PointId,
    t: PointId,
    delta: f64,
) -> Result<Waypoints> {
    check_eps(eps)?;
    ChainGraph::new(space, eps).waypoints(s, t, delta)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && !eps.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )))
    }
}

/// Dense single-source shortest paths on the graph with edges
/// `{(i, j) : m[i][j] ≤ eps}` weighted by `m`.
fn threshold_row(m: &DistanceMatrix, eps: f64, s: usize) -> Vec<f64> {
    let n = m.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[s] = 0.0;
    loop {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for v in 0..n {
            if !done[v] && dist[v] < best {
                best = dist[v];
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        for v in 0..n {
            let w = m.get(u, v);
            if !done[v] && w <= eps {
                let c = best + w;
                if c < dist[v] {
                    dist[v] = c;
                }
            }
        }
    }
    dist
}

/// `m_ε`: shortest ε-chains measured in the metric `m`.
pub fn chain_operator(m: &DistanceMatrix, eps: f64) -> Result<DistanceMatrix> {
    check_eps(eps)?;
    let report = validate_metric(m, OPERATOR_VALIDATION_BUDGET);
    if !report.is_valid() {
        return Err(Error::InvalidMatrix(format!(
            "input is not a metric ({} triangle violations, symmetric: {}, zero diagonal: {})",
            report.triangle_violation_count, report.symmetric, report.zero_diagonal
        )));
    }
    Ok(apply_threshold(m, eps))
}

fn apply_threshold(m: &DistanceMatrix, eps: f64) -> DistanceMatrix {
    let n = m.len();
    let ids: Vec<usize> = (0..n).collect();
    let rows = par_map(&ids, |s| threshold_row(m, eps, s));
    DistanceMatrix::from_fn(n, |i, j| rows[i][j].min(rows[j][i]))
        .expect("shortest paths are valid entries")
}

/// Levels `m, m_{ε₁}, (m_{ε₁})_{ε₂}, …`.
#[derive(Clone, Debug)]
pub struct IterateReport {
    pub eps: Vec<f64>,
    pub levels: Vec<DistanceMatrix>,
    /// First `i` with level `i` equal to level `i + 1` (within 1e-12).
    pub stabilized_at: Option<usize>,
}

pub fn iterate_chain(m: &DistanceMatrix, eps: &[f64]) -> Result<IterateReport> {
    for &e in eps {
        check_eps(e)?;
    }
    let mut levels = vec![m.clone()];
    for &e in eps {
        let next = chain_operator(levels.last().unwrap(), e)?;
        levels.push(next);
    }
    let stabilized_at =
        (0..levels.len().saturating_sub(1)).find(|&i| matrices_equal(&levels[i], &levels[i + 1]));
    Ok(IterateReport {
        eps: eps.to_vec(),
        levels,
        stabilized_at,
    })
}

/// Entrywise equality within the global tolerance.
pub fn matrices_equal(a: &DistanceMatrix, b: &DistanceMatrix) -> bool {
    a.len() == b.len()
        && (0..a.len())
            .all(|i| (i + 1..a.len()).all(|j| a.ext(i, j).approx_eq(b.ext(i, j), EXACT_TOL)))
}

/// Strictly decreasing ε values, all at or above a floor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsSchedule {
    values: Vec<f64>,
    floor: f64,
}

impl EpsSchedule {
    pub fn new(values: Vec<f64>, floor: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty schedule".into()));
        }
        for &v in &values {
            check_eps(v)?;
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter(
                "schedule must be strictly decreasing".into(),
            ));
        }
        if let Some(&v) = values.iter().find(|&&v| v < floor * (1.0 - EXACT_TOL)) {
            return Err(Error::InvalidParameter(format!(
                "schedule value {v} is below the floor {floor}"
            )));
        }
        Ok(Self { values, floor })
    }

    /// `start, start·ratio, …` down to the floor, at most `max_len` values.
    pub fn geometric(start: f64, ratio: f64, max_len: usize, floor: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "ratio must lie in (0, 1), got {ratio}"
            )));
        }
        let mut values = Vec::new();
        let mut v = start;
        while values.len() < max_len && v >= floor * (1.0 - EXACT_TOL) {
            values.push(v);
            v *= ratio;
        }
        Self::new(values, floor)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }
}

/// Smallest ε used for estimates on a space of sample spacing `h`.
pub fn eps_floor(space: &FiniteMetricSpace) -> f64 {
    3.0 * space.resolution
}

/// Default relative tolerance for convergence.
pub const DEFAULT_RTOL: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub schedule: Vec<f64>,
    pub estimates: Vec<ExtReal>,
    /// Per step `i ≥ 1`: whether `estimates[i] ≥ estimates[i−1]` (within 1e-12).
    pub monotone: Vec<bool>,
    pub converged: bool,
    #[serde(rename = "final")]
    pub final_estimate: ExtReal,
    /// Schedule values at which the pair is not joined by any chain.
    pub disconnected_at: Vec<f64>,
}

/// Evaluates `d̂_ε(s, t)` along the schedule.
pub fn estimate_d0(
    space: &FiniteMetricSpace,
    s: PointId,
    t: PointId,
    schedule: &EpsSchedule,
    rtol: f64,
) -> Result<ConvergenceReport> {
    estimate_pair(space, s, t, schedule, rtol, None)
}

/// [`estimate_d0`], optionally restricted to admissible steps.
pub fn estimate_pair(
    space: &FiniteMetricSpace,
    s: PointId,
    t: PointId,
    schedule: &EpsSchedule,
    rtol: f64,
    pred: Option<&AdmissibilityPredicate>,
) -> Result<ConvergenceReport> {
    let floor = eps_floor(space);
    if let Some(&v) = schedule
        .values()
        .iter()
        .find(|&&v| v < floor * (1.0 - EXACT_TOL))
    {
        return Err(Error::InvalidParameter(format!(
            "eps {v} is below the floor 3h = {floor}"
        )));
    }
    if !(rtol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rtol must be nonnegative, got {rtol}"
        )));
    }
    let estimates: Vec<ExtReal> = schedule
        .values()
        .iter()
        .map(|&eps| {
            let g = match pred {
                Some(p) => ChainGraph::constrained(space, eps, p.clone()),
                None => ChainGraph::new(space, eps),
            };
            ExtReal::from_f64_unchecked(g.distance(s, t))
        })
        .collect();
    Ok(convergence(schedule.values().to_vec(), estimates, rtol))
}

pub(crate) fn convergence(
    schedule: Vec<f64>,
    estimates: Vec<ExtReal>,
    rtol: f64,
) -> ConvergenceReport {
    let monotone = estimates
        .windows(2)
        .map(|w| w[1].value() >= w[0].value() - EXACT_TOL * w[0].value().max(1.0))
        .collect();
    let converged = match estimates.as_slice() {
        [.., a, b] if a.is_infinite() && b.is_infinite() => true,
        [.., a, b] => (b.value() - a.value()).abs() <= rtol * b.value().max(1.0),
        _ => false,
    };
    let disconnected_at = schedule
        .iter()
        .zip(&estimates)
        .filter(|(_, e)| e.is_infinite())
        .map(|(&s, _)| s)
        .collect();
    ConvergenceReport {
        final_estimate: *estimates.last().expect("nonempty schedule"),
        schedule,
        estimates,
        monotone,
        converged,
        disconnected_at,
    }
}
