//! Closed-form `d`, `d₀` and `d̄` for the generated spaces, addressed by
//! point meta and landmarks. `None` means "no closed form here".

use crate::ext::ExtReal;
use crate::space::{FiniteMetricSpace, PointId};

use super::comb::comb_path_distance;
use super::slit::slit_path_distance;
use super::x::GAMMA_SEGMENT;
use super::y::spine_arc;

pub trait AnalyticOracle: Send + Sync {
    fn d(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        Some(space.distance(a, b))
    }
    fn d0(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal>;
    fn dbar(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal>;
}

/// The oracle matching the space's generator, if there is one.
pub fn oracle_for(space: &FiniteMetricSpace) -> Option<Box<dyn AnalyticOracle>> {
    Some(match space.generator.as_str() {
        "y-spider" => Box::new(SpiderOracle),
        "x-rectifiable" => Box::new(CurveOracle),
        "comb" => Box::new(CombOracle),
        "slit-plane" => Box::new(SlitOracle),
        "rational-grid" => Box::new(RationalOracle),
        "multi-edge-graph" => Box::new(LengthSpaceOracle),
        "yn-tower" => Box::new(TowerOracle),
        _ => return None,
    })
}

fn ext(x: f64) -> Option<ExtReal> {
    Some(ExtReal::from_f64_unchecked(x))
}

/// Position on the spider away from `p`: `(spine, arc length from q)`,
/// with spine 0 for `q` itself.
fn spider_arc(space: &FiniteMetricSpace, x: PointId) -> Option<(u32, f64)> {
    if space.landmark("q").ok() == Some(x) {
        return Some((0, 0.0));
    }
    let m = space.meta(x)?;
    (m.piece >= 2 && (1..=3).contains(&m.segment))
        .then(|| (m.piece, spine_arc(m.piece, m.segment, m.t)))
}

fn spider_dbar(space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<f64> {
    let (ka, sa) = spider_arc(space, a)?;
    let (kb, sb) = spider_arc(space, b)?;
    Some(if ka == kb || ka == 0 || kb == 0 {
        (sa - sb).abs()
    } else {
        sa + sb
    })
}

fn is_p(space: &FiniteMetricSpace, x: PointId) -> bool {
    space.landmark("p").ok() == Some(x)
}

/// `Y`: `d̄` from arc coordinates, `d̄(p, y) = ∞`, `d₀(p, y) = 3 + d̄(q, y)`.
pub struct SpiderOracle;

impl AnalyticOracle for SpiderOracle {
    fn d0(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        if a == b {
            return ext(0.0);
        }
        let (a, b) = if is_p(space, b) { (b, a) } else { (a, b) };
        if is_p(space, a) {
            let q = space.landmark("q").ok()?;
            return ext(3.0 + spider_dbar(space, q, b)?);
        }
        ext(spider_dbar(space, a, b)?)
    }

    fn dbar(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        if a == b {
            return ext(0.0);
        }
        if is_p(space, a) || is_p(space, b) {
            return Some(ExtReal::INFINITY);
        }
        ext(spider_dbar(space, a, b)?)
    }
}

/// `X`: `d₀(p, q) = 3`; `d̄` on `Y`-points, where a route from `p` enters
/// the spider through a curve and the foot of its spine.
pub struct CurveOracle;

impl AnalyticOracle for CurveOracle {
    fn d0(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        if a == b {
            return ext(0.0);
        }
        let (p, q) = (space.landmark("p").ok()?, space.landmark("q").ok()?);
        ((a, b) == (p, q) || (a, b) == (q, p)).then(|| ExtReal::from_f64_unchecked(3.0))
    }

    fn dbar(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        if a == b {
            return ext(0.0);
        }
        let on_curve = |x| space.meta(x).is_some_and(|m| m.segment == GAMMA_SEGMENT);
        if on_curve(a) || on_curve(b) {
            return None;
        }
        let (a, b) = if is_p(space, b) { (b, a) } else { (a, b) };
        if is_p(space, a) {
            // γ_j then up spine j: (3 + 1/j) + (3 − 1/j − s) = 6 − s;
            // any other curve costs 6 + s
            let (_, s) = spider_arc(space, b)?;
            return ext(6.0 - s);
        }
        ext(spider_dbar(space, a, b)?)
    }
}

/// Comb: `d₀ = d̄` = route along the teeth and the base.
pub struct CombOracle;

impl AnalyticOracle for CombOracle {
    fn d0(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        self.dbar(space, a, b)
    }

    fn dbar(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        ext(comb_path_distance(space.point(a), space.point(b)))
    }
}

/// Slit plane: `d₀ = d`; `d̄` goes around a tip of the slit when needed.
pub struct SlitOracle;

impl AnalyticOracle for SlitOracle {
    fn d0(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        self.d(space, a, b)
    }

    fn dbar(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        ext(slit_path_distance(space.point(a), space.point(b)))
    }
}

/// Rationals: `d₀ = d`, and no nonconstant paths exist.
pub struct RationalOracle;

impl AnalyticOracle for RationalOracle {
    fn d0(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        self.d(space, a, b)
    }

    fn dbar(&self, _: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        Some(if a == b {
            ExtReal::ZERO
        } else {
            ExtReal::INFINITY
        })
    }
}

/// Spaces whose metric is already a length metric: `d = d₀ = d̄`.
pub struct LengthSpaceOracle;

impl AnalyticOracle for LengthSpaceOracle {
    fn d0(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        self.d(space, a, b)
    }

    fn dbar(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        self.d(space, a, b)
    }
}

/// `Y_n`: only `d̄(p, y) = ∞` for `y ≠ p` is known in closed form.
pub struct TowerOracle;

impl AnalyticOracle for TowerOracle {
    fn d0(&self, _: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        (a == b).then_some(ExtReal::ZERO)
    }

    fn dbar(&self, space: &FiniteMetricSpace, a: PointId, b: PointId) -> Option<ExtReal> {
        if a == b {
            return ext(0.0);
        }
        (is_p(space, a) || is_p(space, b)).then_some(ExtReal::INFINITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{generate_comb, generate_x, generate_y};

    #[test]
    fn spider_values() {
        let y = generate_y(6, 1.0 / 8.0).unwrap();
        let o = oracle_for(&y).unwrap();
        let (p, q) = (y.landmark("p").unwrap(), y.landmark("q").unwrap());
        assert_eq!(o.d(&y, p, q).unwrap().value(), 1.0);
        assert_eq!(o.d0(&y, p, q).unwrap().value(), 3.0);
        assert!(o.dbar(&y, p, q).unwrap().is_infinite());
        for k in 2..=7 {
            let top = y.find_meta(k, 2, 1.0).unwrap();
            assert!((o.dbar(&y, q, top).unwrap().value() - (2.0 - 1.0 / k as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn sandwich_where_defined() {
        let spaces = [
            generate_y(3, 1.0 / 8.0).unwrap(),
            generate_x(2, 1.0 / 16.0).unwrap(),
            generate_comb(0.25).unwrap(),
        ];
        for s in &spaces {
            let o = oracle_for(s).unwrap();
            for a in 0..s.len() {
                for b in 0..s.len() {
                    let d = o.d(s, a, b).unwrap();
                    let d0 = o.d0(s, a, b);
                    let db = o.dbar(s, a, b);
                    if let Some(d0) = d0 {
                        assert!(d.value() <= d0.value() + 1e-12);
                    }
                    if let Some(db) = db {
                        assert!(d.value() <= db.value() + 1e-12);
                        if let Some(d0) = d0 {
                            assert!(d0.value() <= db.value() + 1e-12, "{} {a} {b}", s.generator);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn curve_route_is_six() {
        let x = generate_x(3, 1.0 / 16.0).unwrap();
        let o = oracle_for(&x).unwrap();
        let (p, q) = (x.landmark("p").unwrap(), x.landmark("q").unwrap());
        assert_eq!(o.dbar(&x, p, q).unwrap().value(), 6.0);
        assert_eq!(o.d0(&x, q, p).unwrap().value(), 3.0);
    }
}
