//! Generators for the example spaces, the gluing engine and closed-form
//! oracles for `d`, `d₀` and `d̄` where they are known.

pub mod comb;
pub mod glue;
pub mod multi_edge;
pub mod oracle;
pub mod rational;
pub mod slit;
pub mod x;
pub mod y;
pub mod yn;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::FiniteMetricSpace;

pub use comb::generate_comb;
pub use glue::{glue, GluingSpec};
pub use multi_edge::generate_multi_edge;
pub use oracle::{oracle_for, AnalyticOracle};
pub use rational::generate_rational_grid;
pub use slit::{generate_slit_plane, slit_crossing};
pub use x::generate_x;
pub use y::generate_y;
pub use yn::build_yn;

/// Parameters of one generator run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum SpaceSpec {
    Comb { h: f64 },
    YSpider { k: u32, h: f64 },
    XRectifiable { k: u32, h: f64 },
    SlitPlane { h: f64, extent: f64 },
    RationalGrid { d: u32 },
    MultiEdgeGraph { k: u32, h: f64 },
    YnTower { n: u32, m: u32, k: u32, h: f64 },
}

impl SpaceSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceSpec::Comb { .. } => "comb",
            SpaceSpec::YSpider { .. } => "y-spider",
            SpaceSpec::XRectifiable { .. } => "x-rectifiable",
            SpaceSpec::SlitPlane { .. } => "slit-plane",
            SpaceSpec::RationalGrid { .. } => "rational-grid",
            SpaceSpec::MultiEdgeGraph { .. } => "multi-edge-graph",
            SpaceSpec::YnTower { .. } => "yn-tower",
        }
    }

    /// Sample spacing of the generated space.
    pub fn resolution(&self) -> f64 {
        match *self {
            SpaceSpec::Comb { h }
            | SpaceSpec::YSpider { h, .. }
            | SpaceSpec::XRectifiable { h, .. }
            | SpaceSpec::SlitPlane { h, .. }
            | SpaceSpec::MultiEdgeGraph { h, .. }
            | SpaceSpec::YnTower { h, .. } => h,
            SpaceSpec::RationalGrid { d } => 1.0 / d as f64,
        }
    }

    /// Same generator at another resolution (used by sweeps).
    pub fn with_resolution(&self, h: f64) -> SpaceSpec {
        let mut s = self.clone();
        match &mut s {
            SpaceSpec::Comb { h: x }
            | SpaceSpec::YSpider { h: x, .. }
            | SpaceSpec::XRectifiable { h: x, .. }
            | SpaceSpec::SlitPlane { h: x, .. }
            | SpaceSpec::MultiEdgeGraph { h: x, .. }
            | SpaceSpec::YnTower { h: x, .. } => *x = h,
            SpaceSpec::RationalGrid { d } => *d = (1.0 / h).round() as u32,
        }
        s
    }

    pub fn build(&self) -> Result<FiniteMetricSpace> {
        let space = match *self {
            SpaceSpec::Comb { h } => generate_comb(h)?,
            SpaceSpec::YSpider { k, h } => generate_y(k, h)?,
            SpaceSpec::XRectifiable { k, h } => generate_x(k, h)?,
            SpaceSpec::SlitPlane { h, extent } => generate_slit_plane(h, extent)?,
            SpaceSpec::RationalGrid { d } => generate_rational_grid(d)?,
            SpaceSpec::MultiEdgeGraph { k, h } => generate_multi_edge(k, h)?,
            SpaceSpec::YnTower { n, m, k, h } => build_yn(n, m, k, h, yn::DEFAULT_POINT_CAP)?,
        };
        Ok(space.with_params(serde_json::to_value(self)?))
    }

    /// Parses `name key=value ...` as used on the command line.
    pub fn parse(generator: &str, params: &[(String, String)]) -> Result<Self> {
        let get = |key: &str| -> Result<f64> {
            let raw = params
                .iter()
                .find(|(k, _)| k.eq_ignore_ascii_case(key))
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::InvalidParameter(format!("{generator} needs `{key}`")))?;
            parse_number(raw)
        };
        let get_u = |key: &str| -> Result<u32> {
            let v = get(key)?;
            if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
                return Err(Error::InvalidParameter(format!(
                    "`{key}` must be a nonnegative integer"
                )));
            }
            Ok(v as u32)
        };
        let or = |key: &str, default: f64| {
            get(key).or_else(|_| {
                if params.iter().any(|(k, _)| k == key) {
                    get(key)
                } else {
                    Ok(default)
                }
            })
        };
        Ok(match generator {
            "comb" => SpaceSpec::Comb { h: get("h")? },
            "y-spider" | "y" => SpaceSpec::YSpider {
                k: get_u("k")?,
                h: get("h")?,
            },
            "x-rectifiable" | "x" => SpaceSpec::XRectifiable {
                k: get_u("k")?,
                h: get("h")?,
            },
            "slit-plane" | "slit" => SpaceSpec::SlitPlane {
                h: get("h")?,
                extent: or("extent", 1.5)?,
            },
            "rational-grid" | "rational" => SpaceSpec::RationalGrid { d: get_u("d")? },
            "multi-edge-graph" | "multi-edge" => SpaceSpec::MultiEdgeGraph {
                k: get_u("k")?,
                h: get("h")?,
            },
            "yn-tower" | "yn" => SpaceSpec::YnTower {
                n: get_u("n")?,
                m: get_u("m")?,
                k: get_u("k")?,
                h: get("h")?,
            },
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown generator `{other}`"
                )))
            }
        })
    }
}

/// Accepts decimals and simple fractions such as `1/512`.
pub fn parse_number(raw: &str) -> Result<f64> {
    let raw = raw.trim();
    let bad = || Error::InvalidParameter(format!("not a number: `{raw}`"));
    if let Some((a, b)) = raw.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0.0 {
            return Err(bad());
        }
        Ok(a / b)
    } else {
        raw.parse().map_err(|_| bad())
    }
}

/// Step count so that `len / steps ≤ h`.
pub(crate) fn steps_for(len: f64, h: f64) -> usize {
    // 1e-12 slack so exact multiples such as 1 / (1/512) do not round up
    ((len / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// `i / n` of the way from `a` to `b`, hitting both endpoints exactly.
pub(crate) fn lerp(a: f64, b: f64, i: usize, n: usize) -> f64 {
    if i == 0 {
        a
    } else if i == n {
        b
    } else {
        a + (b - a) * (i as f64 / n as f64)
    }
}
