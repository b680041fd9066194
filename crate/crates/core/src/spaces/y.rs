//! The spider `Y`: the point `p` plus spines `S_k`, each a three-segment
//! route from `q = e₁` up along `e_k`, across to `(1/k, e_k)` and down to
//! the foot `(1/k, 0, …)`.

use crate::error::{Error, Result};
use crate::point::SparsePoint;
use crate::space::{FiniteMetricSpace, Metric, PointMeta};

use super::{lerp, steps_for};

/// Sample point of spine `k`, segment `seg` at arc parameter `t`.
pub fn spine_point(k: u32, seg: u32, t: f64) -> SparsePoint {
    let kk = k as f64;
    let coords = match seg {
        1 => vec![(1, 1.0), (k, t)],
        2 if t == 1.0 => vec![(1, 1.0 / kk), (k, 1.0)],
        2 => vec![(1, 1.0 - t * (1.0 - 1.0 / kk)), (k, 1.0)],
        _ => vec![(1, 1.0 / kk), (k, 1.0 - t)],
    };
    SparsePoint::new(coords.into_iter().filter(|e| e.1 != 0.0).collect())
        .expect("valid spine point")
}

/// Arc length of spine `k` from `q` to the point at `(seg, t)`.
pub fn spine_arc(k: u32, seg: u32, t: f64) -> f64 {
    let across = 1.0 - 1.0 / k as f64;
    match seg {
        1 => t,
        2 => 1.0 + t * across,
        _ => 1.0 + across + t,
    }
}

pub(crate) fn check_spider(k: u32, h: f64) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "K must be at least 2, got {k}"
        )));
    }
    if !(h > 0.0 && h <= 1.0 / (k as f64 + 1.0)) {
        return Err(Error::InvalidParameter(format!(
            "h must lie in (0, 1/(K+1)], got {h}"
        )));
    }
    Ok(())
}

/// Appends the sampled spines `k = 2..=K+1` to `points`/`meta`.
pub(crate) fn push_spines(
    points: &mut Vec<SparsePoint>,
    meta: &mut Vec<PointMeta>,
    k_max: u32,
    h: f64,
) {
    for k in 2..=k_max + 1 {
        let kk = k as f64;
        let lengths = [1.0, 1.0 - 1.0 / kk, 1.0];
        for (s, &len) in lengths.iter().enumerate() {
            let seg = s as u32 + 1;
            let n = steps_for(len, h);
            // t = 0 is shared with the previous segment (or q) and skipped
            for i in 1..=n {
                let t = lerp(0.0, 1.0, i, n);
                let p = match seg {
                    1 => SparsePoint::new(vec![(1, 1.0), (k, t)]),
                    2 => SparsePoint::new(vec![(1, lerp(1.0, 1.0 / kk, i, n)), (k, 1.0)]),
                    _ => {
                        let y = lerp(1.0, 0.0, i, n);
                        let mut c = vec![(1, 1.0 / kk)];
                        if y != 0.0 {
                            c.push((k, y));
                        }
                        SparsePoint::new(c)
                    }
                };
                points.push(p.expect("valid spine point"));
                meta.push(PointMeta {
                    piece: k,
                    segment: seg,
                    t,
                });
            }
        }
    }
}

/// Samples `Y` truncated to spines `2..=K+1` at arc spacing `≤ h`.
///
/// Ids: `p = 0`, `q = 1`, then spines in order of `(k, segment, t)`.
pub fn generate_y(k: u32, h: f64) -> Result<FiniteMetricSpace> {
    check_spider(k, h)?;
    let mut points = vec![SparsePoint::origin(), SparsePoint::new(vec![(1, 1.0)])?];
    let mut meta = vec![
        PointMeta {
            piece: 0,
            segment: 0,
            t: 0.0,
        },
        PointMeta {
            piece: 1,
            segment: 0,
            t: 0.0,
        },
    ];
    push_spines(&mut points, &mut meta, k, h);
    Ok(finish("y-spider", points, meta, h))
}

pub(crate) fn finish(
    generator: &str,
    points: Vec<SparsePoint>,
    meta: Vec<PointMeta>,
    h: f64,
) -> FiniteMetricSpace {
    let mut space = FiniteMetricSpace::from_points(generator, points, Metric::Sup, h);
    for (id, m) in meta.into_iter().enumerate() {
        space.set_meta(id, m);
    }
    space.set_landmark("p", 0);
    space.set_landmark("q", 1);
    space
}
