//! Browser bindings: chain distances on the spider and the slit plane,
//! returned as JSON with screen-space coordinates for drawing.

use chainmetric::chains::ChainGraph;
use chainmetric::length::AdmissibilityPredicate;
use chainmetric::spaces::{generate_slit_plane, generate_y};
use chainmetric::{Error, FiniteMetricSpace, Result, SparsePoint};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest sample the page will build.
pub const POINT_CAP: usize = 40_000;

#[derive(Debug, Serialize)]
pub struct Drawn {
    /// `null` when the endpoints are not joined at this `ε`.
    pub distance: Option<f64>,
    pub hops: usize,
    pub chain: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct SpiderView {
    pub eps: f64,
    pub points: Vec<[f64; 2]>,
    pub result: Drawn,
}

#[derive(Debug, Serialize)]
pub struct SlitView {
    pub eps: f64,
    pub points: Vec<[f64; 2]>,
    pub unconstrained: Drawn,
    pub constrained: Drawn,
}

#[derive(Debug, Serialize)]
pub struct WaypointView {
    pub eps: f64,
    pub delta: f64,
    pub total: f64,
    pub chain: Vec<[f64; 2]>,
    pub waypoints: Vec<[f64; 2]>,
    pub legs: Vec<f64>,
    pub residual: f64,
    pub residual_bound: f64,
}

/// Oblique view of the spider: spine `k` leaves the `p–q` axis at its own
/// angle, so spines do not overlap on screen.
fn spider_xy(pt: &SparsePoint, k_max: u32) -> [f64; 2] {
    let x1 = pt.get(1);
    let Some(k) = pt.support().find(|&i| i != 1) else {
        return [x1, 0.0];
    };
    let v = pt.get(k);
    let spread = (k_max.max(3) - 2) as f64;
    let theta =
        std::f64::consts::FRAC_PI_6 + 2.0 * std::f64::consts::FRAC_PI_3 * (k - 2) as f64 / spread;
    [x1 + 0.35 * v * theta.cos(), v * theta.sin()]
}

fn plane_xy(pt: &SparsePoint) -> [f64; 2] {
    [pt.get(1), pt.get(2)]
}

fn check_size(space: &FiniteMetricSpace) -> Result<()> {
    if space.len() > POINT_CAP {
        return Err(Error::ResourceCap(format!(
            "{} points exceeds the demo cap of {POINT_CAP}",
            space.len()
        )));
    }
    Ok(())
}

fn check_eps(eps: f64, h: f64) -> Result<()> {
    if !(eps >= 3.0 * h) {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} must be at least 3h = {}",
            3.0 * h
        )));
    }
    Ok(())
}

fn draw(
    g: &ChainGraph,
    space: &FiniteMetricSpace,
    xy: impl Fn(&SparsePoint) -> [f64; 2],
) -> Result<Drawn> {
    let (s, t) = (space.landmark("p")?, space.landmark("q")?);
    match g.minimizing_chain(s, t) {
        Ok(c) => Ok(Drawn {
            distance: Some(c.length.value()),
            hops: c.hops(),
            chain: c.points.iter().map(|&i| xy(space.point(i))).collect(),
        }),
        Err(Error::Unreachable { .. }) => Ok(Drawn {
            distance: None,
            hops: 0,
            chain: Vec::new(),
        }),
        Err(e) => Err(e),
    }
}

pub fn spider(k: u32, h: f64, eps: f64) -> Result<SpiderView> {
    check_eps(eps, h)?;
    let space = generate_y(k, h)?;
    check_size(&space)?;
    let g = ChainGraph::new(&space, eps);
    let xy = |p: &SparsePoint| spider_xy(p, k);
    Ok(SpiderView {
        eps,
        points: space.points().iter().map(xy).collect(),
        result: draw(&g, &space, xy)?,
    })
}

pub fn slit(h: f64, eps: f64) -> Result<SlitView> {
    check_eps(eps, h)?;
    let space = generate_slit_plane(h, 2.0)?;
    check_size(&space)?;
    let free = ChainGraph::new(&space, eps);
    let fenced = ChainGraph::constrained(&space, eps, AdmissibilityPredicate::not_slit_crossing());
    Ok(SlitView {
        eps,
        points: space.points().iter().map(plane_xy).collect(),
        unconstrained: draw(&free, &space, plane_xy)?,
        constrained: draw(&fenced, &space, plane_xy)?,
    })
}

pub fn spider_waypoints(k: u32, h: f64, eps: f64, delta: f64) -> Result<WaypointView> {
    check_eps(eps, h)?;
    let space = generate_y(k, h)?;
    check_size(&space)?;
    let g = ChainGraph::new(&space, eps);
    let w = g.waypoints(space.landmark("p")?, space.landmark("q")?, delta)?;
    let xy = |i: &usize| spider_xy(space.point(*i), k);
    Ok(WaypointView {
        eps,
        delta,
        total: w.total,
        chain: w.chain.points.iter().map(xy).collect(),
        waypoints: w.waypoints.iter().map(xy).collect(),
        legs: w.legs,
        residual: w.residual,
        residual_bound: w.residual_bound,
    })
}

fn to_js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

/// `d_ε(p, q)` on the spider with `K` spines at spacing `h`.
#[wasm_bindgen(js_name = spiderChain)]
pub fn spider_chain_js(k: u32, h: f64, eps: f64) -> std::result::Result<String, JsError> {
    to_js(spider(k, h, eps))
}

/// `d_ε(p, q)` across the slit, with and without the crossing rule.
#[wasm_bindgen(js_name = slitChains)]
pub fn slit_chains_js(h: f64, eps: f64) -> std::result::Result<String, JsError> {
    to_js(slit(h, eps))
}

/// Waypoints every `δ` along a minimizing chain from `p` to `q` on the spider.
#[wasm_bindgen(js_name = spiderWaypoints)]
pub fn spider_waypoints_js(
    k: u32,
    h: f64,
    eps: f64,
    delta: f64,
) -> std::result::Result<String, JsError> {
    to_js(spider_waypoints(k, h, eps, delta))
}
