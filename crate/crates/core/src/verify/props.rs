//! Property checks over a seeded corpus of small spaces, and a
//! Floyd–Warshall reference for the chain metric.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chains::{chain_metric, chain_operator, matrices_equal, ChainGraph};
use crate::error::Result;
use crate::ext::{ExtReal, EXACT_TOL};
use crate::length::AdmissibilityPredicate;
use crate::matrix::{compare_metrics, DistanceMatrix, Relation};
use crate::point::SparsePoint;
use crate::space::{FiniteMetricSpace, Metric};
use crate::spaces::{oracle_for, SpaceSpec};

use super::claims::record;
use super::{ClaimRecord, Expected, PresetParams};

/// All-pairs shortest paths on the graph `{(i, j) : m[i][j] ≤ eps}`.
pub fn floyd_warshall(m: &DistanceMatrix, eps: f64) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut d: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let w = m.get(i, j);
                    if i == j {
                        0.0
                    } else if w <= eps {
                        w
                    } else {
                        f64::INFINITY
                    }
                })
                .collect()
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// `cases` spaces of five random points in the unit cube, alternating the
/// sup and Euclidean metrics, each with an ε drawn from `[0.05, 1.2)`.
pub fn random_corpus(cases: usize, seed: u64) -> Vec<(FiniteMetricSpace, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cases)
        .map(|i| {
            let pts = (0..5)
                .map(|_| SparsePoint::from_dense(&[rng.gen(), rng.gen(), rng.gen()]))
                .collect();
            let metric = if i % 2 == 0 {
                Metric::Sup
            } else {
                Metric::Euclidean
            };
            let eps = rng.gen_range(0.05..1.2);
            (
                FiniteMetricSpace::from_points("random", pts, metric, 0.0),
                eps,
            )
        })
        .collect()
}

fn same(a: f64, b: f64) -> bool {
    ExtReal::from_f64_unchecked(a).approx_eq(ExtReal::from_f64_unchecked(b), EXACT_TOL)
}

/// `a ≤ b` entrywise up to tolerance.
fn below(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<bool> {
    Ok(matches!(
        compare_metrics(a, b)?.relation,
        Relation::Equal | Relation::Leq | Relation::LeqStrict
    ))
}

/// Stretches the first coordinate by `s ≥ 1`, which can only grow distances.
fn stretched(space: &FiniteMetricSpace, s: f64) -> FiniteMetricSpace {
    let pts = space
        .points()
        .iter()
        .map(|p| SparsePoint::from_dense(&[s * p.get(1), p.get(2), p.get(3)]))
        .collect();
    FiniteMetricSpace::from_points("random", pts, space.metric().clone(), 0.0)
}

/// Small instances of every generator, with the slack allowed above `d̄`.
fn sandwich_spaces() -> Vec<(SpaceSpec, f64)> {
    vec![
        (SpaceSpec::YSpider { k: 3, h: 1.0 / 8.0 }, 0.0),
        (
            SpaceSpec::XRectifiable {
                k: 2,
                h: 1.0 / 16.0,
            },
            0.0,
        ),
        (SpaceSpec::Comb { h: 0.25 }, 0.0),
        // grid chains only approximate straight segments: allow 2% plus 2ε
        (
            SpaceSpec::SlitPlane {
                h: 0.125,
                extent: 1.5,
            },
            0.02,
        ),
        (SpaceSpec::RationalGrid { d: 16 }, 0.0),
        (SpaceSpec::MultiEdgeGraph { k: 4, h: 0.125 }, 0.0),
        (
            SpaceSpec::YnTower {
                n: 2,
                m: 3,
                k: 2,
                h: 0.125,
            },
            0.0,
        ),
    ]
}

/// Pairs violating `d ≤ d̂_ε ≤ d̄` at `ε = 3h` on one generated space.
fn sandwich_violations(spec: &SpaceSpec, rel_slack: f64) -> Result<usize> {
    let s = spec.build()?;
    let eps = 3.0 * s.resolution;
    let oracle = oracle_for(&s).expect("generated spaces have oracles");
    let ids: Vec<usize> = (0..s.len()).collect();
    let rows = ChainGraph::new(&s, eps).rows(&ids);
    let mut bad = 0;
    for a in 0..s.len() {
        for b in 0..s.len() {
            let (d, est) = (s.dist(a, b), rows[a][b]);
            if est < d - EXACT_TOL * d.max(1.0) {
                bad += 1;
                continue;
            }
            if let Some(dbar) = oracle.dbar(&s, a, b) {
                let dbar = dbar.value();
                let slack = if rel_slack > 0.0 {
                    rel_slack * dbar + 2.0 * eps
                } else {
                    EXACT_TOL * dbar.max(1.0)
                };
                if est > dbar + slack {
                    bad += 1;
                }
            }
        }
    }
    Ok(bad)
}

pub(super) fn property_claims(p: &PresetParams) -> Result<Vec<ClaimRecord>> {
    let corpus = random_corpus(p.corpus, 2024);
    let (mut fw_bad, mut idem_bad, mut eps_bad, mut metric_bad, mut small_bad) = (0, 0, 0, 0, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (space, eps) in &corpus {
        let d = space.to_matrix();
        let de = chain_metric(space, *eps)?;
        let fw = floyd_warshall(&d, *eps);
        let n = space.len();
        if (0..n).any(|i| (0..n).any(|j| !same(de.get(i, j), fw[i][j]))) {
            fw_bad += 1;
        }
        if !matrices_equal(&chain_operator(&de, *eps)?, &de) {
            idem_bad += 1;
        }
        let smaller = eps * rng.gen_range(0.2..1.0);
        if !below(&de, &chain_metric(space, smaller)?)? {
            eps_bad += 1;
        }
        let wider = stretched(space, rng.gen_range(1.0..2.0));
        if !below(&de, &chain_metric(&wider, *eps)?)? {
            metric_bad += 1;
        }
        if (0..n).any(|i| (0..n).any(|j| d.get(i, j) <= *eps && !same(de.get(i, j), d.get(i, j)))) {
            small_bad += 1;
        }
    }
    let mut sandwich_bad = 0;
    let mut sandwich_names = Vec::new();
    for (spec, slack) in sandwich_spaces() {
        sandwich_bad += sandwich_violations(&spec, slack)?;
        sandwich_names.push(spec.name());
    }
    let (wp_bad, wp_detail) = waypoint_residuals(p)?;
    let corpus_json = serde_json::json!({ "generator": "random", "points": 5, "cases": p.corpus });
    let cases = format!("{} random 5-point spaces", p.corpus);
    let src = "property";
    let zero = Expected::exactly(0.0);
    Ok(vec![
        record(
            "9a",
            corpus_json.clone(),
            "cases where the chain metric differs from Floyd–Warshall",
            zero,
            src,
            fw_bad as f64,
            cases.clone(),
        ),
        record(
            "9b",
            corpus_json.clone(),
            "cases where a second pass at the same eps changes the metric",
            zero,
            src,
            idem_bad as f64,
            cases.clone(),
        ),
        record(
            "9c",
            corpus_json.clone(),
            "cases where a smaller eps gives a smaller distance",
            zero,
            src,
            eps_bad as f64,
            cases.clone(),
        ),
        record(
            "9d",
            corpus_json.clone(),
            "cases where a larger metric gives a smaller chain metric",
            zero,
            src,
            metric_bad as f64,
            cases.clone(),
        ),
        record(
            "9e",
            corpus_json,
            "cases where distances at most eps are changed",
            zero,
            src,
            small_bad as f64,
            cases,
        ),
        record(
            "9f",
            serde_json::json!(sandwich_names),
            "pairs violating d ≤ chain distance ≤ d̄ at eps = 3h",
            zero,
            src,
            sandwich_bad as f64,
            "small instance of every generator, all pairs".into(),
        ),
        record(
            "9g",
            serde_json::json!(["y-spider", "slit-plane"]),
            "waypoint splittings with residual above 2Nε",
            zero,
            src,
            wp_bad as f64,
            wp_detail,
        ),
    ])
}

fn waypoint_residuals(p: &PresetParams) -> Result<(usize, String)> {
    let y = SpaceSpec::YSpider { k: p.y_k, h: p.y_h }.build()?;
    let s = SpaceSpec::SlitPlane {
        h: p.slit_h,
        extent: 1.5,
    }
    .build()?;
    let runs = [
        (ChainGraph::new(&y, p.y_eps), "Y"),
        (
            ChainGraph::constrained(
                &s,
                3.0 * p.slit_h,
                AdmissibilityPredicate::not_slit_crossing(),
            ),
            "slit",
        ),
    ];
    let mut bad = 0;
    let mut detail = Vec::new();
    for (g, name) in &runs {
        let sp = g.space();
        let w = g.waypoints(sp.landmark("p")?, sp.landmark("q")?, p.waypoint_delta)?;
        if w.residual > w.residual_bound + EXACT_TOL {
            bad += 1;
        }
        detail.push(format!(
            "{name}: N = {}, residual {:e} ≤ {}",
            w.waypoints.len(),
            w.residual,
            w.residual_bound
        ));
    }
    Ok((bad, detail.join("; ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floyd_warshall_on_a_path() {
        let pts = [0.0, 0.5, 1.0, 3.0]
            .iter()
            .map(|&x| SparsePoint::from_dense(&[x]))
            .collect();
        let s = FiniteMetricSpace::from_points("line", pts, Metric::Sup, 0.0);
        let d = floyd_warshall(&s.to_matrix(), 0.5);
        assert_eq!(d[0][2], 1.0);
        assert!(d[0][3].is_infinite());
    }

    #[test]
    fn corpus_is_seeded() {
        let a = random_corpus(3, 1);
        let b = random_corpus(3, 1);
        for ((x, e), (y, f)) in a.iter().zip(&b) {
            assert_eq!(x.points(), y.points());
            assert_eq!(e, f);
        }
    }
}
