//! Two vertices `p`, `q` joined by arcs of lengths `1 + 1/k`, `k = 1..=K`,
//! with the arc-length (graph) metric.

use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::space::{FiniteMetricSpace, Metric, PointMeta};

use super::{lerp, steps_for};

/// Distances from an arc point to `p` and `q`.
fn to_ends(arc_len: f64, s: f64, other: f64) -> (f64, f64) {
    ((s).min(arc_len - s + other), (arc_len - s).min(s + other))
}

/// Ids: `p = 0`, `q = 1`, then interior samples of arc 1, arc 2, …
/// Meta: `(k, 1, s / length)`.
pub fn generate_multi_edge(k: u32, h: f64) -> Result<FiniteMetricSpace> {
    if k < 1 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    if !(h > 0.0 && h <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "h must lie in (0, 1/2], got {h}"
        )));
    }
    let lens: Vec<f64> = (1..=k).map(|i| 1.0 + 1.0 / i as f64).collect();
    // shortest arc other than arc i
    let other = |i: usize| {
        lens.iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &l)| l)
            .fold(f64::INFINITY, f64::min)
    };
    let shortest = lens.iter().copied().fold(f64::INFINITY, f64::min);
    // (arc index or None for p/q, position, dist to p, dist to q)
    let mut nodes: Vec<(Option<usize>, f64, f64, f64)> =
        vec![(None, 0.0, 0.0, shortest), (None, 0.0, shortest, 0.0)];
    let mut meta = vec![
        PointMeta {
            piece: 0,
            segment: 0,
            t: 0.0,
        },
        PointMeta {
            piece: 0,
            segment: 0,
            t: 1.0,
        },
    ];
    for (i, &len) in lens.iter().enumerate() {
        let n = steps_for(len, h);
        let o = other(i);
        for j in 1..n {
            let s = lerp(0.0, len, j, n);
            let (dp, dq) = to_ends(len, s, o);
            nodes.push((Some(i), s, dp, dq));
            meta.push(PointMeta {
                piece: i as u32 + 1,
                segment: 1,
                t: j as f64 / n as f64,
            });
        }
    }
    let matrix = DistanceMatrix::from_fn(nodes.len(), |a, b| {
        let (ia, sa, pa, qa) = nodes[a];
        let (ib, sb, pb, qb) = nodes[b];
        let through_ends = (pa + pb).min(qa + qb);
        match (ia, ib) {
            (Some(x), Some(y)) if x == y => (sa - sb).abs().min(through_ends),
            _ => through_ends,
        }
    })?;
    let mut space =
        FiniteMetricSpace::abstract_points("multi-edge-graph", Metric::Matrix(matrix), h);
    for (id, m) in meta.into_iter().enumerate() {
        space.set_meta(id, m);
    }
    space.set_landmark("p", 0);
    space.set_landmark("q", 1);
    Ok(space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{dijkstra, AdjacencyGraph};
    use crate::matrix::validate_metric;

    #[test]
    fn single_arc_path() {
        let g = generate_multi_edge(1, 0.5).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.dist(0, 1), 2.0);
    }

    #[test]
    fn matches_graph_shortest_paths() {
        let (k, h) = (4, 0.25);
        let g = generate_multi_edge(k, h).unwrap();
        // rebuild the path graph from meta and compare with Dijkstra
        let mut adj = vec![Vec::new(); g.len()];
        let mut link = |a: usize, b: usize, w: f64| {
            adj[a].push((b, w));
            adj[b].push((a, w));
        };
        let mut id = 2;
        for i in 1..=k {
            let len = 1.0 + 1.0 / i as f64;
            let n = steps_for(len, h);
            let step = len / n as f64;
            let ids: Vec<usize> = std::iter::once(0)
                .chain(id..id + n - 1)
                .chain(std::iter::once(1))
                .collect();
            for w in ids.windows(2) {
                link(w[0], w[1], step);
            }
            id += n - 1;
        }
        let graph = AdjacencyGraph { adj };
        for s in 0..g.len() {
            let d = dijkstra(&graph, s);
            for t in 0..g.len() {
                assert!((d[t] - g.dist(s, t)).abs() < 1e-12, "{s} {t}");
            }
        }
        assert!(validate_metric(&g.to_matrix(), 0).is_valid());
        assert_eq!(g.dist(0, 1), 1.25);
    }
}
