//! The tower `Y_n`: `Y_1 = Y`, and `Y_n` glues, for each `m = 1..=M`, a
//! chain of `m` copies `Z_m^1, …, Z_m^m` of `Y_{n−1}` scaled by `1/m`
//! (`q` of `Z_m^j` to `p` of `Z_m^{j+1}`), with every `Z_m^1`'s `p` merged
//! into `p` and every `Z_m^m`'s `q` merged into `q`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::FiniteMetricSpace;

use super::glue::{glue_with_ids, GluingSpec};
use super::y::{check_spider, generate_y};

/// Default cap on the number of points of a generated tower.
pub const DEFAULT_POINT_CAP: usize = 4_000_000;

/// Landmark name of the `p` or `q` end of copy `Z_m^j`.
pub fn copy_landmark(m: u32, j: u32, end: &str) -> String {
    format!("Z{m}_{j}.{end}")
}

/// Builds `Y_n` truncated at `M` chains and `K` spines.
///
/// A copy scaled by `1/m` is sampled at spacing `min(m·h, 1/(K+1))` so its
/// image has spacing at most `h`; copies at equal spacing share one
/// prototype. Landmarks: `p`, `q` and both ends of every copy of the top
/// level (see [`copy_landmark`]).
pub fn build_yn(n: u32, m_max: u32, k: u32, h: f64, point_cap: usize) -> Result<FiniteMetricSpace> {
    if n < 1 || m_max < 1 {
        return Err(Error::InvalidParameter("n and M must be at least 1".into()));
    }
    check_spider(k, h)?;
    let mut cache = HashMap::new();
    let space = build(n, m_max, k, h, point_cap, &mut cache)?;
    let mut space = Arc::try_unwrap(space).unwrap_or_else(|a| (*a).clone());
    space.generator = "yn-tower".into();
    Ok(space)
}

type Cache = HashMap<(u32, u64), Arc<FiniteMetricSpace>>;

fn build(
    n: u32,
    m_max: u32,
    k: u32,
    h: f64,
    cap: usize,
    cache: &mut Cache,
) -> Result<Arc<FiniteMetricSpace>> {
    if let Some(s) = cache.get(&(n, h.to_bits())) {
        return Ok(s.clone());
    }
    let space = if n == 1 {
        generate_y(k, h)?
    } else {
        let coarsest = 1.0 / (k as f64 + 1.0);
        let mut spec = GluingSpec::default();
        let mut copies = Vec::new();
        let mut projected = 0usize;
        for m in 1..=m_max {
            let sub = build(n - 1, m_max, k, (h * m as f64).min(coarsest), cap, cache)?;
            projected += m as usize * sub.len();
            if projected > cap {
                return Err(Error::ResourceCap(format!(
                    "level {n} tower would exceed {cap} points; lower M or K or raise h"
                )));
            }
            let first = spec.pieces.len();
            for j in 1..=m {
                let piece = spec.piece(sub.clone(), 1.0 / m as f64);
                copies.push((m, j, piece));
                if j > 1 {
                    spec.identify(piece - 1, "q", piece, "p");
                }
            }
            if m > 1 {
                spec.identify(0, "p", first, "p");
                spec.identify(0, "q", first + m as usize - 1, "q");
            }
        }
        let (mut space, ids) = glue_with_ids(&spec)?;
        let end = |piece: usize, name: &str| {
            ids[piece][spec.pieces[piece].0.landmark(name).expect("tower landmark")]
        };
        space.set_landmark("p", end(0, "p"));
        space.set_landmark("q", end(0, "q"));
        for &(m, j, piece) in &copies {
            space.set_landmark(copy_landmark(m, j, "p"), end(piece, "p"));
            space.set_landmark(copy_landmark(m, j, "q"), end(piece, "q"));
        }
        space.resolution = h;
        space
    };
    let space = Arc::new(space);
    cache.insert((n, h.to_bits()), space.clone());
    Ok(space)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_is_the_spider() {
        let a = build_yn(1, 3, 2, 1.0 / 8.0, DEFAULT_POINT_CAP).unwrap();
        let b = generate_y(2, 1.0 / 8.0).unwrap();
        assert_eq!(a.points(), b.points());
    }

    #[test]
    fn level_two_portal_distances() {
        let m_max = 4;
        let y2 = build_yn(2, m_max, 2, 1.0 / 8.0, DEFAULT_POINT_CAP).unwrap();
        let p = y2.landmark("p").unwrap();
        let q = y2.landmark("q").unwrap();
        assert!((y2.dist(p, q) - 1.0).abs() < 1e-12);
        for m in 1..=m_max {
            assert_eq!(y2.landmark(&copy_landmark(m, 1, "p")).unwrap(), p);
            assert_eq!(y2.landmark(&copy_landmark(m, m, "q")).unwrap(), q);
            let a = y2.landmark(&copy_landmark(m, 1, "p")).unwrap();
            let b = y2.landmark(&copy_landmark(m, 1, "q")).unwrap();
            // p and the first copy's q are 1/m apart unless they coincide with q
            let expect = if m == 1 { 1.0 } else { 1.0 / m as f64 };
            assert!((y2.dist(a, b) - expect).abs() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn resource_guard() {
        assert!(matches!(
            build_yn(2, 8, 4, 1.0 / 64.0, 1000),
            Err(Error::ResourceCap(_))
        ));
    }
}
