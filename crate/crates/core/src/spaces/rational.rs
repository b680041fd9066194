//! Dyadic-style rational grid `{j/D : 0 ≤ j ≤ D}` on the line.

use crate::error::{Error, Result};
use crate::point::SparsePoint;
use crate::space::{FiniteMetricSpace, Metric};

/// Landmarks `p = 0`, `q = 1`; ids in increasing order of position.
pub fn generate_rational_grid(d: u32) -> Result<FiniteMetricSpace> {
    if d == 0 {
        return Err(Error::InvalidParameter("D must be at least 1".into()));
    }
    let points = (0..=d)
        .map(|j| SparsePoint::from_dense(&[j as f64 / d as f64]))
        .collect();
    let mut space =
        FiniteMetricSpace::from_points("rational-grid", points, Metric::Sup, 1.0 / d as f64);
    space.set_landmark("p", 0);
    space.set_landmark("q", d as usize);
    Ok(space)
}
