//! The claims table: presets, claim records, the suite runner and sweeps.

mod claims;
pub mod props;
mod sweep;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::chains::{par_map, DEFAULT_RTOL};
use crate::error::{Error, Result};
use crate::ext::{format_f64, ExtReal, EXACT_TOL};
use crate::spaces::y::check_spider;

pub use sweep::{sweep, sweep_is_monotone, write_sweep_csv, SweepRow, SWEEP_CSV_HEADER};

/// Wall-clock budget for the large `Y` estimate.
pub const Y_ESTIMATE_BUDGET_S: f64 = 120.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Smoke,
    Desk,
    Full,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoke" => Ok(Preset::Smoke),
            "desk" => Ok(Preset::Desk),
            "full" => Ok(Preset::Full),
            other => Err(Error::InvalidParameter(format!(
                "unknown preset `{other}` (expected smoke, desk or full)"
            ))),
        }
    }
}

/// Sizes, resolutions and ε values for every claim.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PresetParams {
    pub y_k: u32,
    pub y_h: f64,
    pub y_eps: f64,
    pub x_k: u32,
    pub x_h: f64,
    pub x_eps: f64,
    pub slit_h: f64,
    pub rational_d: u32,
    pub rational_eps: Vec<f64>,
    pub multi_ks: Vec<u32>,
    pub multi_h: f64,
    pub comb_h: f64,
    pub comb_pairs: usize,
    pub yn_m: u32,
    pub yn_k: u32,
    pub yn_h: f64,
    pub yn_eps: [f64; 3],
    pub corpus: usize,
    pub waypoint_delta: f64,
    pub rtol: f64,
}

impl PresetParams {
    pub fn for_preset(preset: Preset) -> Self {
        match preset {
            Preset::Smoke => PresetParams {
                y_k: 16,
                y_h: 1.0 / 128.0,
                y_eps: 1.0 / 16.0,
                x_k: 4,
                x_h: 1.0 / 64.0,
                x_eps: 1.0 / 16.0,
                slit_h: 1.0 / 32.0,
                rational_d: 64,
                rational_eps: vec![1.0 / 64.0, 1.0 / 16.0, 1.0 / 4.0],
                multi_ks: vec![4, 16],
                multi_h: 1.0 / 64.0,
                comb_h: 1.0 / 32.0,
                comb_pairs: 20,
                yn_m: 12,
                yn_k: 4,
                yn_h: 1.0 / 32.0,
                yn_eps: [1.0 / 16.0, 0.25, 0.25],
                corpus: 50,
                waypoint_delta: 0.5,
                rtol: DEFAULT_RTOL,
            },
            Preset::Desk => PresetParams {
                y_k: 64,
                y_h: 1.0 / 512.0,
                y_eps: 1.0 / 32.0,
                x_k: 8,
                x_h: 1.0 / 256.0,
                x_eps: 1.0 / 16.0,
                slit_h: 1.0 / 64.0,
                rational_d: 256,
                rational_eps: vec![1.0 / 256.0, 1.0 / 64.0, 1.0 / 16.0],
                multi_ks: vec![4, 16, 64],
                multi_h: 1.0 / 128.0,
                comb_h: 1.0 / 128.0,
                comb_pairs: 20,
                yn_m: 16,
                yn_k: 16,
                yn_h: 1.0 / 128.0,
                yn_eps: [1.0 / 64.0, 0.25, 0.25],
                corpus: 200,
                waypoint_delta: 0.25,
                rtol: DEFAULT_RTOL,
            },
            Preset::Full => PresetParams {
                y_k: 128,
                y_h: 1.0 / 1024.0,
                y_eps: 1.0 / 64.0,
                x_k: 16,
                x_h: 1.0 / 1024.0,
                x_eps: 1.0 / 32.0,
                slit_h: 1.0 / 128.0,
                rational_d: 512,
                rational_eps: vec![1.0 / 512.0, 1.0 / 64.0, 1.0 / 8.0],
                multi_ks: vec![4, 16, 64],
                multi_h: 1.0 / 128.0,
                comb_h: 1.0 / 256.0,
                comb_pairs: 50,
                yn_m: 32,
                yn_k: 16,
                yn_h: 1.0 / 128.0,
                yn_eps: [1.0 / 64.0, 0.25, 0.25],
                corpus: 1000,
                waypoint_delta: 0.125,
                rtol: DEFAULT_RTOL,
            },
        }
    }

    /// Generator preconditions and the ε/K/M/h couplings.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        check_spider(self.y_k, self.y_h)?;
        check_spider(self.yn_k, self.yn_h)?;
        let floor_ok = |eps: f64, h: f64| eps >= 3.0 * h * (1.0 - EXACT_TOL);
        if !floor_ok(self.y_eps, self.y_h) {
            return bad(format!("Y: eps {} is below 3h", self.y_eps));
        }
        if (self.y_k as f64) < (1.0 / self.y_eps) * (1.0 - EXACT_TOL) {
            return bad(format!("Y: K = {} is below 1/eps", self.y_k));
        }
        if claims::unreachable_spines(self.y_eps, self.y_k).len() < 2 {
            return bad("Y: eps is too large for the pointwise claim".into());
        }
        if !floor_ok(self.x_eps, self.x_h) {
            return bad(format!("X: eps {} is below 3h", self.x_eps));
        }
        if self.multi_ks.is_empty() || self.rational_eps.is_empty() {
            return bad("empty K or eps list".into());
        }
        if self.rational_d == 0 || self.corpus == 0 || self.comb_pairs == 0 {
            return bad("D, corpus and comb pair count must be positive".into());
        }
        if !(self.rtol >= 0.0) {
            return bad("rtol must be nonnegative".into());
        }
        let step = self.y_eps.max(3.0 * self.slit_h);
        if !(self.waypoint_delta >= 4.0 * step) {
            return bad(format!(
                "waypoint delta must be at least 4·eps = {}",
                4.0 * step
            ));
        }
        if (self.yn_m as f64) < (3.0 / self.yn_eps[1]) * (1.0 - EXACT_TOL) {
            return bad(format!("Y_2: M = {} is below 3/eps₂", self.yn_m));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub preset: Preset,
    pub params: PresetParams,
    /// Criterion numbers to run; all when empty.
    pub only: Vec<u32>,
}

impl VerifyConfig {
    pub fn new(preset: Preset) -> Self {
        Self {
            preset,
            params: PresetParams::for_preset(preset),
            only: Vec::new(),
        }
    }
}

/// Closed interval `[lo, hi]` in `[0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub lo: ExtReal,
    pub hi: ExtReal,
}

impl Expected {
    pub fn between(lo: f64, hi: f64) -> Self {
        Self {
            lo: ExtReal::from_f64_unchecked(lo.max(0.0)),
            hi: ExtReal::from_f64_unchecked(hi),
        }
    }

    pub fn exactly(v: f64) -> Self {
        Self::between(v, v)
    }

    pub fn infinite() -> Self {
        Self::exactly(f64::INFINITY)
    }

    /// Membership with the global exactness slack; `∞` matches only `∞`.
    pub fn contains(&self, x: ExtReal) -> bool {
        if x.is_infinite() {
            return self.hi.is_infinite();
        }
        let v = x.value();
        let slack = EXACT_TOL * v.abs().max(1.0);
        v >= self.lo.value() - slack && v <= self.hi.value() + slack
    }
}

impl std::fmt::Display for Expected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", format_f64(self.lo.value()))
        } else {
            write!(
                f,
                "[{}, {}]",
                format_f64(self.lo.value()),
                format_f64(self.hi.value())
            )
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimRecord {
    pub id: String,
    pub criterion: u32,
    pub space: serde_json::Value,
    pub quantity: String,
    pub expected: Expected,
    /// Which worked example the claim reproduces.
    pub source: String,
    pub measured: Option<ExtReal>,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub preset: Preset,
    pub params: PresetParams,
    pub claims: Vec<ClaimRecord>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Seconds per criterion; the only run-dependent field.
    pub timings: BTreeMap<String, f64>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The report without `timings`; identical configs give identical bytes.
    pub fn deterministic_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(o) = v.as_object_mut() {
            o.remove("timings");
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }

    pub fn table(&self) -> String {
        let rows: Vec<[String; 5]> = self
            .claims
            .iter()
            .map(|c| {
                [
                    c.id.clone(),
                    format!("{:?}", c.status).to_uppercase(),
                    c.measured.map_or("-".into(), |m| format_f64(m.value())),
                    c.expected.to_string(),
                    c.quantity.clone(),
                ]
            })
            .collect();
        let head = ["id", "status", "measured", "expected", "quantity"];
        let mut width = head.map(str::len);
        for r in &rows {
            for (w, cell) in width.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: [&str; 5]| {
            for (i, cell) in cells.iter().enumerate() {
                if i == 4 {
                    let _ = write!(out, "{cell}");
                } else {
                    let pad = width[i] - cell.chars().count();
                    let _ = write!(out, "{cell}{}  ", " ".repeat(pad));
                }
            }
            out.push('\n');
        };
        line(&mut out, head);
        for r in &rows {
            line(&mut out, [&r[0], &r[1], &r[2], &r[3], &r[4]]);
        }
        let _ = writeln!(
            out,
            "{} passed, {} failed, {} skipped",
            self.passed, self.failed, self.skipped
        );
        out
    }
}

/// Runs every selected criterion and assembles the report.
pub fn run_verify_suite(config: &VerifyConfig) -> Result<VerifyReport> {
    config.params.validate()?;
    if let Some(&c) = config.only.iter().find(|&&c| !(1..=10).contains(&c)) {
        return Err(Error::InvalidParameter(format!(
            "no criterion {c}; criteria are numbered 1 to 10"
        )));
    }
    let selected: Vec<usize> = (1..=10)
        .filter(|c| config.only.is_empty() || config.only.contains(c))
        .map(|c| c as usize)
        .collect();
    let params = &config.params;
    let results = par_map(&selected, |c| {
        let start = Instant::now();
        let records = claims::run_criterion(c as u32, params);
        (c, records, start.elapsed().as_secs_f64())
    });
    let mut claims = Vec::new();
    let mut timings = BTreeMap::new();
    for (c, records, secs) in results {
        timings.insert(c.to_string(), secs);
        claims.extend(records);
    }
    let count = |s: Status| claims.iter().filter(|c| c.status == s).count();
    Ok(VerifyReport {
        preset: config.preset,
        params: params.clone(),
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skipped),
        claims,
        timings,
    })
}
