//! `X = Y ∪ ⋃ γ_k`: each curve `γ_k` runs straight from `p` to
//! `(1/(k+1), 1/(k+1)·e_k)` and then along the graph of a zigzag `f_k`
//! (in coordinate `k`) down to the foot `(1/k, 0, …)`.

use crate::error::{Error, Result};
use crate::point::{sup_distance_f64, SparsePoint};
use crate::space::{FiniteMetricSpace, PointMeta};

use super::y::{finish, push_spines};
use super::{lerp, steps_for};

/// Segment id used in point meta for samples of `γ_k`.
pub const GAMMA_SEGMENT: u32 = 4;

fn point2(k: u32, t: f64, f: f64) -> SparsePoint {
    let mut c = Vec::with_capacity(2);
    if t != 0.0 {
        c.push((1, t));
    }
    if f != 0.0 {
        c.push((k, f));
    }
    SparsePoint::new(c).expect("valid curve point")
}

/// Vertices `(t, f)` of `γ_k`: the start `p = (0, 0)`, then the zigzag
/// breakpoints ending at `(1/k, 0)`.
///
/// With `a = 1/(k+1)` the zigzag visits `a, −b, b, −b, …, ±b, 0` at equally
/// spaced `t`. Its sup-length is `a + 2nb`, so `b = (3 + 1/k − 2a)/(2n)`
/// with the smallest `n` giving `b ≤ a/2`.
pub fn gamma_vertices(k: u32) -> Vec<(f64, f64)> {
    let kk = k as f64;
    let a = 1.0 / (kk + 1.0);
    let zig = 3.0 + 1.0 / kk - 2.0 * a;
    let n = (zig / a).ceil() as usize;
    let b = zig / (2.0 * n as f64);
    let mut v = vec![(0.0, 0.0), (a, a)];
    let t1 = 1.0 / kk;
    for i in 1..=n {
        let sign = if i % 2 == 1 { -1.0 } else { 1.0 };
        v.push((lerp(a, t1, i, n + 1), sign * b));
    }
    v.push((t1, 0.0));
    v
}

/// Sup-length of the polyline through `gamma_vertices(k)`.
pub fn gamma_length(k: u32) -> f64 {
    let v = gamma_vertices(k);
    v.windows(2)
        .map(|w| sup_distance_f64(&point2(k, w[0].0, w[0].1), &point2(k, w[1].0, w[1].1)))
        .sum()
}

/// Samples `X` truncated to `k = 2..=K+1` at arc spacing `≤ h`.
///
/// Ids follow `generate_y`; curve samples come last, `γ_k` in order of `k`
/// with meta `(k, 4, arc fraction)`. The endpoints `p` and the foot are
/// shared with `Y` and not repeated.
pub fn generate_x(k: u32, h: f64) -> Result<FiniteMetricSpace> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "K must be at least 2, got {k}"
        )));
    }
    let bound = 1.0 / ((k as f64 + 1.0) * (k as f64 + 1.0));
    if !(h > 0.0 && h <= bound) {
        return Err(Error::InvalidParameter(format!(
            "h must lie in (0, 1/(K+1)²], got {h}"
        )));
    }
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
    for kk in 2..=k + 1 {
        let total = gamma_length(kk);
        let target = 3.0 + 1.0 / kk as f64;
        if (total - target).abs() > 1e-9 {
            return Err(Error::Calibration(format!(
                "curve {kk} has length {total}, expected {target}"
            )));
        }
        let v = gamma_vertices(kk);
        let mut arc = 0.0;
        let last = v.len() - 1;
        for (j, w) in v.windows(2).enumerate() {
            let (t0, f0) = w[0];
            let (t1, f1) = w[1];
            let len = (t1 - t0).abs().max((f1 - f0).abs());
            let n = steps_for(len, h);
            // the start of each piece is the end of the previous one
            let end = if j + 1 == last { n - 1 } else { n };
            for i in 1..=end {
                let t = lerp(t0, t1, i, n);
                let f = lerp(f0, f1, i, n);
                points.push(point2(kk, t, f));
                let s = arc + len * (i as f64 / n as f64);
                meta.push(PointMeta {
                    piece: kk,
                    segment: GAMMA_SEGMENT,
                    t: (s / total).min(1.0),
                });
            }
            arc += len;
        }
    }
    Ok(finish("x-rectifiable", points, meta, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_are_calibrated() {
        for k in 2..40 {
            assert!(
                (gamma_length(k) - (3.0 + 1.0 / k as f64)).abs() <= 1e-9,
                "k = {k}"
            );
            let v = gamma_vertices(k);
            assert_eq!(*v.last().unwrap(), (1.0 / k as f64, 0.0));
            for &(t, f) in &v {
                assert!(f.abs() <= t + 1e-15);
            }
        }
    }

    #[test]
    fn samples_respect_envelope_and_spacing() {
        let k_max = 3;
        let h = 1.0 / 64.0;
        let x = generate_x(k_max, h).unwrap();
        let first = (0..x.len())
            .find(|&i| x.meta(i).unwrap().segment == GAMMA_SEGMENT)
            .unwrap();
        let mut prev = x.landmark("p").unwrap();
        let mut piece = 2;
        for id in first..x.len() {
            let m = x.meta(id).unwrap();
            if m.piece != piece {
                piece = m.piece;
                prev = x.landmark("p").unwrap();
            }
            let pt = x.point(id);
            assert!(pt.get(m.piece).abs() <= pt.get(1) + 1e-15);
            assert!(x.dist(prev, id) <= h + 1e-12);
            prev = id;
        }
        assert!(generate_x(3, 1.0 / 8.0).is_err());
    }
}
