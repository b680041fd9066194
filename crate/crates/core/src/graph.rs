//! Shortest paths over implicit step graphs whose edges are generated on demand.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// A weighted undirected graph given by its neighbor enumeration.
pub trait StepGraph: Sync {
    fn node_count(&self) -> usize;

    /// Calls `f(v, w)` for every neighbor `v != u` with edge weight `w`.
    fn for_each_step(&self, u: usize, f: &mut dyn FnMut(usize, f64));
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    cost: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost, ties to the smaller id
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source distances; `f64::INFINITY` for unreachable nodes.
pub fn dijkstra(g: &dyn StepGraph, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(State {
        cost: 0.0,
        node: source,
    });
    while let Some(State { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        g.for_each_step(node, &mut |next, w| {
            let c = cost + w;
            if c < dist[next] {
                dist[next] = c;
                heap.push(State {
                    cost: c,
                    node: next,
                });
            }
        });
    }
    dist
}

/// Distance from `source` to `target`, stopping once `target` is settled.
pub fn dijkstra_pair(g: &dyn StepGraph, source: usize, target: usize) -> f64 {
    if source == target {
        return 0.0;
    }
    BoundedSearch::new(g.node_count()).distance(g, source, target)
}

/// Reusable buffers for many bounded searches on the same graph.
pub struct BoundedSearch {
    dist: Vec<f64>,
    touched: Vec<usize>,
    heap: BinaryHeap<State>,
}

impl BoundedSearch {
    pub fn new(n: usize) -> Self {
        Self {
            dist: vec![f64::INFINITY; n],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    /// Distance from `source` to `target`, stopping once `target` is settled.
    pub fn distance(&mut self, g: &dyn StepGraph, source: usize, target: usize) -> f64 {
        let dist = &mut self.dist;
        let touched = &mut self.touched;
        let heap = &mut self.heap;
        let mut found = f64::INFINITY;
        dist[source] = 0.0;
        touched.push(source);
        heap.push(State {
            cost: 0.0,
            node: source,
        });
        while let Some(State { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            if node == target {
                found = cost;
                break;
            }
            g.for_each_step(node, &mut |next, w| {
                let c = cost + w;
                if c < dist[next] {
                    if dist[next].is_infinite() {
                        touched.push(next);
                    }
                    dist[next] = c;
                    heap.push(State {
                        cost: c,
                        node: next,
                    });
                }
            });
        }
        heap.clear();
        for &v in touched.iter() {
            dist[v] = f64::INFINITY;
        }
        touched.clear();
        found
    }

    /// All nodes `v != source` at graph distance `≤ radius`, sorted by id.
    pub fn ball(&mut self, g: &dyn StepGraph, source: usize, radius: f64) -> Vec<(usize, f64)> {
        let dist = &mut self.dist;
        let touched = &mut self.touched;
        let heap = &mut self.heap;
        let mut out = Vec::new();
        dist[source] = 0.0;
        touched.push(source);
        heap.push(State {
            cost: 0.0,
            node: source,
        });
        while let Some(State { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            if node != source {
                out.push((node, cost));
            }
            g.for_each_step(node, &mut |next, w| {
                let c = cost + w;
                if c <= radius && c < dist[next] {
                    if dist[next].is_infinite() {
                        touched.push(next);
                    }
                    dist[next] = c;
                    heap.push(State {
                        cost: c,
                        node: next,
                    });
                }
            });
        }
        for &v in touched.iter() {
            dist[v] = f64::INFINITY;
        }
        touched.clear();
        out.sort_unstable_by_key(|e| e.0);
        out
    }
}

/// Explicit adjacency lists.
#[derive(Clone, Debug, Default)]
pub struct AdjacencyGraph {
    pub adj: Vec<Vec<(usize, f64)>>,
}

impl StepGraph for AdjacencyGraph {
    fn node_count(&self) -> usize {
        self.adj.len()
    }

    fn for_each_step(&self, u: usize, f: &mut dyn FnMut(usize, f64)) {
        for &(v, w) in &self.adj[u] {
            f(v, w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph() -> AdjacencyGraph {
        // 0 -1- 1 -1- 2 -5- 3, plus 0 -3- 2
        let mut adj = vec![Vec::new(); 4];
        for &(a, b, w) in &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 5.0), (0, 2, 3.0)] {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        AdjacencyGraph { adj }
    }

    #[test]
    fn distances_on_small_graph() {
        assert_eq!(dijkstra(&path_graph(), 0), vec![0.0, 1.0, 2.0, 7.0]);
    }

    #[test]
    fn ball_respects_radius_and_resets() {
        let g = path_graph();
        let mut search = BoundedSearch::new(4);
        assert_eq!(search.ball(&g, 0, 2.0), vec![(1, 1.0), (2, 2.0)]);
        assert_eq!(search.ball(&g, 3, 5.0), vec![(2, 5.0)]);
        assert_eq!(search.ball(&g, 3, 4.9), vec![]);
    }

    #[test]
    fn pair_distance_matches_full_search() {
        let g = path_graph();
        let mut search = BoundedSearch::new(4);
        for s in 0..4 {
            let full = dijkstra(&g, s);
            for t in 0..4 {
                assert_eq!(search.distance(&g, s, t), full[t]);
                assert_eq!(dijkstra_pair(&g, s, t), full[t]);
            }
        }
    }
}
