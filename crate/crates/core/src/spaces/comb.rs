//! The comb: the base `[0,1]×{0}` with unit teeth at `x = 0` and `x = 1/k`.

use crate::error::{Error, Result};
use crate::point::SparsePoint;
use crate::space::{FiniteMetricSpace, Metric, PointMeta};

use super::{lerp, steps_for};

fn plane(x: f64, y: f64) -> SparsePoint {
    let mut c = Vec::with_capacity(2);
    if x != 0.0 {
        c.push((1, x));
    }
    if y != 0.0 {
        c.push((2, y));
    }
    SparsePoint::new(c).expect("valid plane point")
}

/// Tooth positions: `0` and every `1/k ≥ h`, ascending.
pub fn tooth_positions(h: f64) -> Vec<f64> {
    let mut xs = vec![0.0];
    let mut k = (1.0 / h).floor() as u64;
    while k >= 1 {
        let x = 1.0 / k as f64;
        if x >= h {
            xs.push(x);
        }
        k -= 1;
    }
    xs
}

/// Samples the comb with Euclidean metric.
///
/// Meta: base points have piece 0 (`t = x`); the tooth at position
/// `tooth_positions(h)[i]` has piece `i + 1` (`t = height`). Landmarks:
/// `p = (0,0)`, `tip = (0,1)`.
pub fn generate_comb(h: f64) -> Result<FiniteMetricSpace> {
    if !(h > 0.0 && h <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "h must lie in (0, 1/2], got {h}"
        )));
    }
    let teeth = tooth_positions(h);
    let n = steps_for(1.0, h);
    let mut base: Vec<f64> = (0..=n)
        .map(|i| lerp(0.0, 1.0, i, n))
        .chain(teeth.iter().copied())
        .collect();
    base.sort_by(f64::total_cmp);
    base.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    let mut points = Vec::new();
    let mut meta = Vec::new();
    for &x in &base {
        points.push(plane(x, 0.0));
        meta.push(PointMeta {
            piece: 0,
            segment: 1,
            t: x,
        });
    }
    let mut tip = 0;
    for (i, &x) in teeth.iter().enumerate() {
        // snap to the base sample so the foot is shared exactly
        let x = base
            .iter()
            .copied()
            .find(|b| (b - x).abs() <= 1e-12)
            .unwrap_or(x);
        for j in 1..=n {
            let y = lerp(0.0, 1.0, j, n);
            if i == 0 && j == n {
                tip = points.len();
            }
            points.push(plane(x, y));
            meta.push(PointMeta {
                piece: i as u32 + 1,
                segment: 1,
                t: y,
            });
        }
    }
    let mut space = FiniteMetricSpace::from_points("comb", points, Metric::Euclidean, h);
    for (id, m) in meta.into_iter().enumerate() {
        space.set_meta(id, m);
    }
    space.set_landmark("p", 0);
    space.set_landmark("tip", tip);
    Ok(space)
}

/// Length-metric distance in the comb between two of its points.
pub fn comb_path_distance(a: &SparsePoint, b: &SparsePoint) -> f64 {
    let (xa, ya) = (a.get(1), a.get(2));
    let (xb, yb) = (b.get(1), b.get(2));
    if xa == xb {
        (ya - yb).abs()
    } else {
        ya + (xa - xb).abs() + yb
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarsest_comb() {
        let c = generate_comb(0.5).unwrap();
        assert_eq!(tooth_positions(0.5), vec![0.0, 0.5, 1.0]);
        // base {0, 1/2, 1} and three teeth with heights 1/2, 1
        assert_eq!(c.len(), 3 + 3 * 2);
        let tip = c.landmark("tip").unwrap();
        assert_eq!(*c.point(tip), plane(0.0, 1.0));
    }

    #[test]
    fn count_at_quarter() {
        let c = generate_comb(0.25).unwrap();
        // base 0, 1/4, 1/3, 1/2, 3/4, 1 and teeth at 0, 1/4, 1/3, 1/2, 1
        assert_eq!(c.len(), 6 + 5 * 4);
    }

    #[test]
    fn tip_to_tip_route() {
        for k in 1..5 {
            let d = comb_path_distance(&plane(0.0, 1.0), &plane(1.0 / k as f64, 1.0));
            assert!((d - (2.0 + 1.0 / k as f64)).abs() < 1e-15);
        }
        assert!(generate_comb(0.6).is_err());
    }
}
