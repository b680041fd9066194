use std::sync::Arc;

use chainmetric::chains::{chain_metric, chain_operator, matrices_equal, ChainGraph};
use chainmetric::matrix::{compare_metrics, Relation};
use chainmetric::spaces::glue::glue_with_ids;
use chainmetric::spaces::{build_yn, generate_y, GluingSpec};
use chainmetric::tower::ChainTower;
use chainmetric::{DistanceMatrix, FiniteMetricSpace, Metric, SparsePoint};
use proptest::prelude::*;

/// Shortest chains with steps `≤ eps`, by repeated relaxation.
fn bellman_ford(m: &DistanceMatrix, eps: f64, s: usize) -> Vec<f64> {
    let n = m.len();
    let mut d = vec![f64::INFINITY; n];
    d[s] = 0.0;
    for _ in 0..n {
        for i in 0..n {
            for j in 0..n {
                let w = m.get(i, j);
                if w <= eps && d[i] + w < d[j] {
                    d[j] = d[i] + w;
                }
            }
        }
    }
    d
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(1.0)
}

fn cloud() -> impl Strategy<Value = (Vec<Vec<f64>>, bool, f64)> {
    (
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 2..9),
        any::<bool>(),
        0.05f64..1.5,
    )
}

fn space_of(pts: &[Vec<f64>], sup: bool) -> FiniteMetricSpace {
    let pts = pts.iter().map(|c| SparsePoint::from_dense(c)).collect();
    let metric = if sup { Metric::Sup } else { Metric::Euclidean };
    FiniteMetricSpace::from_points("cloud", pts, metric, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn matches_relaxation((pts, sup, eps) in cloud()) {
        let s = space_of(&pts, sup);
        let got = chain_metric(&s, eps).unwrap();
        let d = s.to_matrix();
        for i in 0..s.len() {
            let want = bellman_ford(&d, eps, i);
            for j in 0..s.len() {
                prop_assert!(close(got.get(i, j), want[j]), "{i} {j}: {} vs {}", got.get(i, j), want[j]);
            }
        }
    }

    #[test]
    fn collapse_identity((pts, sup, e1) in cloud(), e2 in 0.05f64..1.5) {
        let d = space_of(&pts, sup).to_matrix();
        let nested = chain_operator(&chain_operator(&d, e1).unwrap(), e2).unwrap();
        let direct = chain_operator(&d, e1.min(e2)).unwrap();
        prop_assert!(matrices_equal(&nested, &direct));
    }

    #[test]
    fn chain_metric_dominates((pts, sup, eps) in cloud()) {
        let s = space_of(&pts, sup);
        let d = s.to_matrix();
        let c = chain_metric(&s, eps).unwrap();
        let rel = compare_metrics(&d, &c).unwrap().relation;
        prop_assert!(matches!(rel, Relation::Equal | Relation::Leq | Relation::LeqStrict), "{rel:?}");
    }

    #[test]
    fn witness_chain_is_valid((pts, sup, eps) in cloud()) {
        let s = space_of(&pts, sup);
        let g = ChainGraph::new(&s, eps);
        let t = s.len() - 1;
        if let Ok(c) = g.minimizing_chain(0, t) {
            prop_assert!(c.verify(&s));
            prop_assert!(close(c.length.value(), g.distance(0, t)));
        } else {
            prop_assert!(g.distance(0, t).is_infinite());
        }
    }

    #[test]
    fn matrix_files_round_trip((pts, sup, eps) in cloud()) {
        let m = chain_metric(&space_of(&pts, sup), eps).unwrap();
        let mut dmx = Vec::new();
        m.write_dmx(&mut dmx).unwrap();
        prop_assert!(matrices_equal(&DistanceMatrix::read_dmx(&dmx[..]).unwrap(), &m));
        let mut csv = Vec::new();
        m.write_csv(&mut csv).unwrap();
        prop_assert!(matrices_equal(&DistanceMatrix::read_csv(&csv[..]).unwrap(), &m));
    }
}

#[test]
fn half_scale_copies_glue_end_to_end() {
    let y = Arc::new(generate_y(4, 1.0 / 16.0).unwrap());
    let (p, q) = (y.landmark("p").unwrap(), y.landmark("q").unwrap());
    let mut spec = GluingSpec::default();
    let a = spec.piece(y.clone(), 0.5);
    let b = spec.piece(y.clone(), 0.5);
    spec.identify(a, "q", b, "p");
    let (g, ids) = glue_with_ids(&spec).unwrap();
    assert_eq!(g.len(), 2 * y.len() - 1);
    assert_eq!(ids[a][q], ids[b][p]);
    assert_eq!(g.dist(ids[a][p], ids[b][q]), 1.0);
    // a spine tip of the second copy: 1/2 to its own p, plus 1/2 across the first copy
    let tip = y.find_meta(2, 1, 1.0).unwrap();
    assert_eq!(g.dist(ids[a][p], ids[b][tip]), 1.0);
}

#[test]
fn running_min_tower_matches_literal_iteration() {
    let y2 = build_yn(2, 4, 3, 1.0 / 16.0, 1_000_000).unwrap();
    let eps = [0.25, 0.5, 0.1875];
    let fast = ChainTower::new(&y2, &eps).unwrap();
    let slow = ChainTower::nested(&y2, &eps, 50_000_000).unwrap();
    let ids: Vec<usize> = (0..y2.len()).step_by(7).collect();
    for level in 0..=eps.len() {
        let a = fast.restricted(level, &ids).unwrap();
        let b = slow.restricted(level, &ids).unwrap();
        assert!(matrices_equal(&a, &b), "level {level}");
    }
}

#[test]
fn literal_iteration_from_the_matrix() {
    let y2 = build_yn(2, 4, 3, 1.0 / 16.0, 1_000_000).unwrap();
    let (p, q) = (y2.landmark("p").unwrap(), y2.landmark("q").unwrap());
    let m1 = chain_operator(&y2.to_matrix(), 0.25).unwrap();
    let m2 = chain_operator(&m1, 0.5).unwrap();
    let tower = ChainTower::new(&y2, &[0.25, 0.5]).unwrap();
    assert!(close(tower.distance(1, p, q), m1.get(p, q)));
    assert!(close(tower.distance(2, p, q), m2.get(p, q)));
    assert!(close(m1.get(p, q), m2.get(p, q)));
}
