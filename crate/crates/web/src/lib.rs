//! Browser bindings. Every export returns a JSON string; failures come back
//! as `{"error": "..."}` so the page never has to catch exceptions.

use bubblecert::certificate::{self, Condition, GradientBound, GridSpec};
use bubblecert::forms::Params;
use bubblecert::profile::{self, PROFILE_TOLERANCE};
use bubblecert::rational::{format_rational, parse_rational, to_f64};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Grid steps accepted by [`feasibility_map`]; finer grids stall the page.
pub const MAX_MAP_STEPS: u32 = 100;
pub const MAX_PROFILE_SAMPLES: usize = 20_000;

#[derive(Serialize)]
struct ErrorReply {
    error: String,
}

fn reply<T: Serialize>(result: Result<T, String>) -> String {
    let json = match result {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&ErrorReply { error }),
    };
    json.unwrap_or_else(|e| format!("{{\"error\":\"serialization failed: {e}\"}}"))
}

fn parse_bound(s: &str) -> Result<Option<GradientBound>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(None);
    }
    let (a, b) = s.split_once(',').ok_or_else(|| format!("gradient bound {s:?} is not \"A,B\""))?;
    let a = parse_rational(a.trim()).map_err(|e| e.to_string())?;
    let b = parse_rational(b.trim()).map_err(|e| e.to_string())?;
    GradientBound::new(a, b).map(Some).map_err(|e| e.to_string())
}

/// Status code per cell: 0 feasible, otherwise 1 + index of the first
/// failed condition in `i, ii, iii, area, iv`.
fn status(failure: Option<Condition>) -> u8 {
    match failure {
        None => 0,
        Some(c) => 1 + Condition::ALL.iter().position(|&x| x == c).unwrap_or(0) as u8,
    }
}

#[derive(Serialize)]
pub struct MapBest {
    pub a: String,
    pub alpha: String,
    pub margin: f64,
}

#[derive(Serialize)]
pub struct FeasibilityMap {
    pub n: u32,
    pub a: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Row-major over `a`, then `alpha`.
    pub status: Vec<u8>,
    pub margin: Vec<Option<f64>>,
    pub legend: Vec<&'static str>,
    pub feasible_count: usize,
    pub best: Option<MapBest>,
}

pub fn compute_map(n: u32, steps: u32, grad_bound: &str) -> Result<FeasibilityMap, String> {
    if !(2..=MAX_MAP_STEPS).contains(&steps) {
        return Err(format!("steps must lie in 2..={MAX_MAP_STEPS}"));
    }
    let mut spec = GridSpec::uniform(steps).map_err(|e| e.to_string())?;
    spec.refine_rounds = 0;
    spec.budget = parse_bound(grad_bound)?;
    let result = certificate::search(n, &spec).map_err(|e| e.to_string())?;

    let mut a = Vec::new();
    let mut alpha = Vec::new();
    for row in &result.rows {
        let x = to_f64(row.params.a());
        if a.last() != Some(&x) {
            a.push(x);
        }
        if a.len() == 1 {
            alpha.push(to_f64(row.params.alpha()));
        }
    }
    Ok(FeasibilityMap {
        n,
        a,
        alpha,
        status: result.rows.iter().map(|r| status(r.failure)).collect(),
        margin: result.rows.iter().map(|r| r.margin).collect(),
        legend: std::iter::once("feasible").chain(Condition::ALL.iter().map(|c| c.tag())).collect(),
        feasible_count: result.feasible_points.len(),
        best: result.best.map(|b| MapBest { a: format_rational(&b.a), alpha: format_rational(&b.alpha), margin: b.margin }),
    })
}

#[derive(Serialize)]
pub struct PointReport {
    #[serde(flatten)]
    pub row: certificate::ReportRow,
    pub c_max_f64: f64,
    pub delta_f64: f64,
    pub lambda: Option<f64>,
}

pub fn compute_point(n: u32, a: &str, alpha: &str, grad_bound: &str) -> Result<PointReport, String> {
    let params = Params::parse(n, a.trim(), alpha.trim()).map_err(|e| e.to_string())?;
    let bound = parse_bound(grad_bound)?;
    let report = certificate::check_conditions(&params, bound.as_ref()).map_err(|e| e.to_string())?;
    Ok(PointReport {
        c_max_f64: report.c.c_max_f64,
        delta_f64: to_f64(&report.delta),
        lambda: report.rescaling.map(|r| r.lambda),
        row: report.row(),
    })
}

#[derive(Serialize)]
pub struct ProfileCurve {
    pub eps: f64,
    pub c: f64,
    pub length: f64,
    pub t: Vec<f64>,
    pub h: Vec<f64>,
    pub max_relative_violation: f64,
    pub pass: bool,
}

pub fn compute_profile(eps: f64, c: f64, samples: usize) -> Result<ProfileCurve, String> {
    if !(2..=MAX_PROFILE_SAMPLES).contains(&samples) {
        return Err(format!("samples must lie in 2..={MAX_PROFILE_SAMPLES}"));
    }
    let h = profile::synthesize(eps, c).map_err(|e| e.to_string())?;
    let check = profile::verify(&h, samples).map_err(|e| e.to_string())?;
    let pts = h.sample(samples, profile::DEFAULT_CLEARANCE).map_err(|e| e.to_string())?;
    Ok(ProfileCurve {
        eps,
        c,
        length: h.length(),
        t: pts.iter().map(|p| p.t).collect(),
        h: pts.iter().map(|p| p.h).collect(),
        max_relative_violation: check.max_relative_violation,
        pass: check.passes(PROFILE_TOLERANCE),
    })
}

/// Feasibility status over `a ∈ [1, 4)`, `α ∈ [0, 1]` with step `1/steps`.
/// `grad_bound` is `"A,B"` or empty.
#[wasm_bindgen]
pub fn feasibility_map(n: u32, steps: u32, grad_bound: &str) -> String {
    reply(compute_map(n, steps, grad_bound))
}

/// Full condition report at one exact point.
#[wasm_bindgen]
pub fn check_point(n: u32, a: &str, alpha: &str, grad_bound: &str) -> String {
    reply(compute_point(n, a, alpha, grad_bound))
}

/// Samples of the band profile `h` and its verification.
#[wasm_bindgen]
pub fn profile_curve(eps: f64, c: f64, samples: usize) -> String {
    reply(compute_profile(eps, c, samples))
}
