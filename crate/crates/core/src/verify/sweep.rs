//! Convergence sweeps of `d̂_ε` over grids of `h` and `ε`.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::chains::ChainGraph;
use crate::error::{Error, Result};
use crate::ext::{format_f64, ExtReal, EXACT_TOL};
use crate::length::predicate_for;
use crate::spaces::SpaceSpec;

pub const SWEEP_CSV_HEADER: &str = "h,eps,estimate,runtime_s,hops";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub h: f64,
    pub eps: f64,
    pub estimate: ExtReal,
    pub runtime_s: f64,
    /// Steps of the witness chain; 0 when the pair is not joined.
    pub hops: usize,
}

/// One row per `(h, ε)`: `h` in the given order, `ε` decreasing within each
/// `h`. With `constrained`, only steps admitted by the generator's
/// predicate are used.
pub fn sweep(
    spec: &SpaceSpec,
    eps_grid: &[f64],
    h_grid: &[f64],
    pair: (&str, &str),
    constrained: bool,
) -> Result<Vec<SweepRow>> {
    if eps_grid.is_empty() || h_grid.is_empty() {
        return Err(Error::InvalidParameter("grids must be nonempty".into()));
    }
    let mut eps_sorted = eps_grid.to_vec();
    eps_sorted.sort_by(|a, b| b.total_cmp(a));
    for &h in h_grid {
        if let Some(&e) = eps_sorted
            .iter()
            .find(|&&e| e < 3.0 * h * (1.0 - EXACT_TOL))
        {
            return Err(Error::InvalidParameter(format!(
                "eps {e} is below 3h = {} for h = {h}",
                3.0 * h
            )));
        }
    }
    let mut rows = Vec::new();
    for &h in h_grid {
        let space = spec.with_resolution(h).build()?;
        let (s, t) = (space.resolve(pair.0)?, space.resolve(pair.1)?);
        let pred = if constrained {
            Some(predicate_for(&space).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "{} has no admissibility predicate",
                    space.generator
                ))
            })?)
        } else {
            None
        };
        for &eps in &eps_sorted {
            let start = Instant::now();
            let g = match &pred {
                Some(p) => ChainGraph::constrained(&space, eps, p.clone()),
                None => ChainGraph::new(&space, eps),
            };
            let (estimate, hops) = match g.minimizing_chain(s, t) {
                Ok(c) => (c.length, c.hops()),
                Err(Error::Unreachable { .. }) => (ExtReal::INFINITY, 0),
                Err(e) => return Err(e),
            };
            rows.push(SweepRow {
                h,
                eps,
                estimate,
                runtime_s: start.elapsed().as_secs_f64(),
                hops,
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            format_f64(r.h),
            format_f64(r.eps),
            format_f64(r.estimate.value()),
            format_f64(r.runtime_s),
            r.hops
        )?;
    }
    Ok(())
}

/// Whether estimates never decrease as `ε` decreases at fixed `h`.
pub fn sweep_is_monotone(rows: &[SweepRow]) -> bool {
    rows.windows(2).all(|w| {
        w[0].h != w[1].h
            || w[1].eps >= w[0].eps
            || w[1].estimate.value() >= w[0].estimate.value() - EXACT_TOL
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let spec = SpaceSpec::YSpider {
            k: 8,
            h: 1.0 / 32.0,
        };
        let rows = sweep(&spec, &[0.125], &[1.0 / 32.0], ("p", "q"), false).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].hops > 0);
        let mut csv = Vec::new();
        write_sweep_csv(&rows, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with(SWEEP_CSV_HEADER));
    }

    #[test]
    fn coupling_is_enforced() {
        let spec = SpaceSpec::YSpider {
            k: 8,
            h: 1.0 / 32.0,
        };
        assert!(sweep(&spec, &[1.0 / 32.0], &[1.0 / 32.0], ("p", "q"), false).is_err());
        assert!(sweep(&spec, &[], &[1.0 / 32.0], ("p", "q"), false).is_err());
    }

    #[test]
    fn estimates_grow_as_eps_shrinks() {
        let spec = SpaceSpec::YSpider {
            k: 16,
            h: 1.0 / 64.0,
        };
        let rows = sweep(
            &spec,
            &[1.0 / 16.0, 0.25, 0.125],
            &[1.0 / 64.0],
            ("p", "q"),
            false,
        )
        .unwrap();
        assert_eq!(
            rows.iter().map(|r| r.eps).collect::<Vec<_>>(),
            [0.25, 0.125, 1.0 / 16.0]
        );
        assert!(sweep_is_monotone(&rows));
    }
}
