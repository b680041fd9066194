//! The slit plane `ℝ² ∖ ({0}×[−1,1])`, sampled on a square grid.

use crate::error::{Error, Result};
use crate::point::SparsePoint;
use crate::space::{FiniteMetricSpace, Metric};

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

/// Whether the open segment `ab` meets the closed slit `{0}×[−1,1]`.
pub fn slit_crossing(a: &SparsePoint, b: &SparsePoint) -> bool {
    let (ax, ay) = (a.get(1), a.get(2));
    let (bx, by) = (b.get(1), b.get(2));
    if ax == 0.0 && bx == 0.0 {
        // segment along the slit line: open interval against [−1, 1]
        let (lo, hi) = if ay < by { (ay, by) } else { (by, ay) };
        return lo < hi && lo < 1.0 && hi > -1.0;
    }
    if ax == 0.0 || bx == 0.0 || (ax > 0.0) == (bx > 0.0) {
        return false;
    }
    let s = ax / (ax - bx);
    let y = ay + s * (by - ay);
    y.abs() <= 1.0
}

/// Grid of spacing `h = 1/D` over `[−extent, extent]²` minus the slit.
/// Points are ordered by `x`, then `y`. Landmarks `p = (−1,0)`, `q = (1,0)`.
pub fn generate_slit_plane(h: f64, extent: f64) -> Result<FiniteMetricSpace> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "h must be positive, got {h}"
        )));
    }
    if !(extent >= 1.5) {
        return Err(Error::InvalidParameter(format!(
            "extent must be at least 1.5, got {extent}"
        )));
    }
    let d = (1.0 / h).round();
    if d < 1.0 || ((1.0 / h) - d).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "h must divide 1 so p and q lie on the grid, got {h}"
        )));
    }
    let d = d as i64;
    let r = (extent * d as f64 + 1e-9).floor() as i64;
    let mut points = Vec::with_capacity(((2 * r + 1) * (2 * r + 1)) as usize);
    let (mut p, mut q) = (0, 0);
    for i in -r..=r {
        for j in -r..=r {
            if i == 0 && j.abs() <= d {
                continue;
            }
            if j == 0 && i == -d {
                p = points.len();
            }
            if j == 0 && i == d {
                q = points.len();
            }
            points.push(plane(i as f64 / d as f64, j as f64 / d as f64));
        }
    }
    let mut space = FiniteMetricSpace::from_points("slit-plane", points, Metric::Euclidean, h);
    space.set_landmark("p", p);
    space.set_landmark("q", q);
    Ok(space)
}

/// Length-metric distance between two points of the slit plane: straight
/// when the segment misses the slit, otherwise around the nearer tip.
pub fn slit_path_distance(a: &SparsePoint, b: &SparsePoint) -> f64 {
    let e = |u: &SparsePoint, x: f64, y: f64| (u.get(1) - x).hypot(u.get(2) - y);
    if !slit_crossing(a, b) {
        return e(a, b.get(1), b.get(2));
    }
    [1.0, -1.0]
        .iter()
        .map(|&ty| e(a, 0.0, ty) + e(b, 0.0, ty))
        .fold(f64::INFINITY, f64::min)
}
