//! Conditions (i)–(iv) and the area condition for a parameter triple, the
//! grid scan over `(a, α)`, the worked constants and the largest-`b` solve.
//!
//! For `(n, a, α)` the certificate is feasible when
//!
//! * (i)    `δ_max = (n−2)(α − (n−2)a/4) > 0`,
//! * (ii)   `P ⪰ 0`,
//! * (iii)  `Q ⪰ c·h²` for some `c > 0` (the best `c` is computed),
//! * area   `4/(α(4−a)) ≤ (n−2)/(n−3)` (vacuous for `n = 3`),
//! * (iv)   a profile `h` with `|h′| ≤ ε + c·h²` exists for some `ε < δ_max`.
//!
//! Every condition is evaluated even after an earlier one fails, so reports
//! show the full list of failures.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{self, build_p, build_q, delta_max, Params};
use crate::psd::{self, best_c, is_psd, quad_min, BestC, PsdVerdict};
use crate::profile::{self, Rescaling};
use crate::rational::{self, format_rational, int, ratio, serde_ratio, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    Ii,
    #[serde(rename = "iii")]
    Iii,
    #[serde(rename = "area")]
    Area,
    #[serde(rename = "iv")]
    Iv,
}

impl Condition {
    pub const ALL: [Condition; 5] = [Condition::I, Condition::Ii, Condition::Iii, Condition::Area, Condition::Iv];

    pub fn tag(self) -> &'static str {
        match self {
            Condition::I => "i",
            Condition::Ii => "ii",
            Condition::Iii => "iii",
            Condition::Area => "area",
            Condition::Iv => "iv",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Gradient bound `a·|∇h̃| ≤ A + B·h̃²` of a known profile `h̃`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradientBound {
    #[serde(with = "serde_ratio")]
    pub constant: Rational,
    #[serde(with = "serde_ratio")]
    pub quadratic: Rational,
}

impl GradientBound {
    pub fn new(constant: Rational, quadratic: Rational) -> Result<Self> {
        if !constant.is_positive() || !quadratic.is_positive() {
            return Err(Error::InvalidInput("gradient bound coefficients must be positive".into()));
        }
        Ok(GradientBound { constant, quadratic })
    }

    /// `(3/20, 1/22)`, the bound used for the `n = 5` worked case.
    pub fn worked_case() -> Self {
        GradientBound { constant: ratio(3, 20), quadratic: ratio(1, 22) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub params: Params,
    #[serde(with = "serde_ratio")]
    pub delta: Rational,
    pub p_verdict: PsdVerdict,
    pub c: BestC,
    /// `4/(α(4−a)) ≤ (n−2)/(n−3)`.
    pub area_ok: bool,
    /// `4/(4−a) ≤ α(n−3)/(n−2)`, the alternative reading; reported only.
    pub area_ok_intro_form: bool,
    /// `ε` forced by the gradient bound, `0` (standing for `0⁺`) without one,
    /// `None` when no rescaling exists because `c ≤ 0`.
    pub eps_required: Option<f64>,
    pub rescaling: Option<Rescaling>,
    pub feasible: bool,
    /// `δ − ε` when feasible.
    pub margin: Option<f64>,
    /// Failed conditions in the order i, ii, iii, area, iv.
    pub failed: Vec<Condition>,
}

impl CertificateReport {
    pub fn failure(&self) -> Option<Condition> {
        self.failed.first().copied()
    }

    pub fn row(&self) -> ReportRow {
        ReportRow {
            params: self.params.clone(),
            delta: format_rational(&self.delta),
            p_psd: self.p_verdict.is_psd,
            lambda_min_p: self.p_verdict.lambda_min,
            c_max: psd::format_c_max(&self.c.c_max),
            area_ok: self.area_ok,
            eps_required: self.eps_required,
            feasible: self.feasible,
            margin: self.margin,
            failure: self.failure(),
            failed: self.failed.clone(),
            area_ok_intro_form: self.area_ok_intro_form,
        }
    }
}

/// Flat per-point summary: the JSON report schema and one row of a scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub params: Params,
    /// `"p/q"`.
    pub delta: String,
    pub p_psd: bool,
    #[serde(rename = "lambda_min_P")]
    pub lambda_min_p: f64,
    /// `"p/q"` or `"-inf"`.
    pub c_max: String,
    pub area_ok: bool,
    pub eps_required: Option<f64>,
    pub feasible: bool,
    pub margin: Option<f64>,
    pub failure: Option<Condition>,
    pub failed: Vec<Condition>,
    pub area_ok_intro_form: bool,
}

/// `4/(α(4−a)) ≤ (n−2)/(n−3)`, cross-multiplied so `α = 0` needs no special case.
pub fn area_condition(params: &Params) -> bool {
    if params.n() == 3 {
        return true;
    }
    let n = int(i64::from(params.n()));
    let four_minus_a = int(4) - params.a();
    int(4) * (&n - int(3)) <= params.alpha() * four_minus_a * (&n - int(2))
}

/// `4/(4−a) ≤ α(n−3)/(n−2)`.
pub fn area_condition_intro_form(params: &Params) -> bool {
    let n = int(i64::from(params.n()));
    let four_minus_a = int(4) - params.a();
    int(4) * (&n - int(2)) <= params.alpha() * (&n - int(3)) * four_minus_a
}

pub fn check_conditions(params: &Params, budget: Option<&GradientBound>) -> Result<CertificateReport> {
    let delta = delta_max(params);
    let p_verdict = is_psd(&build_p(params))?;
    let c = best_c(&build_q(params))?;
    let area_ok = area_condition(params);
    let area_ok_intro_form = area_condition_intro_form(params);

    let (eps_required, rescaling) = match budget {
        None => (Some(0.0), None),
        Some(_) if !c.is_positive() => (None, None),
        Some(g) => {
            let r = profile::rescale(
                rational::to_f64(&g.constant),
                rational::to_f64(&g.quadratic),
                params.a(),
                c.c_max_f64,
            )?;
            (Some(r.eps_required), Some(r))
        }
    };
    let delta_f = rational::to_f64(&delta);

    let mut failed = Vec::new();
    if !delta.is_positive() {
        failed.push(Condition::I);
    }
    if !p_verdict.is_psd {
        failed.push(Condition::Ii);
    }
    if !c.is_positive() {
        failed.push(Condition::Iii);
    }
    if !area_ok {
        failed.push(Condition::Area);
    }
    if !eps_required.is_some_and(|e| e < delta_f) {
        failed.push(Condition::Iv);
    }
    let feasible = failed.is_empty();
    let margin = if feasible { eps_required.map(|e| delta_f - e) } else { None };
    Ok(CertificateReport {
        params: params.clone(),
        delta,
        p_verdict,
        c,
        area_ok,
        area_ok_intro_form,
        eps_required,
        rescaling,
        feasible,
        margin,
        failed,
    })
}

/// `α* = 4(n−3)/((4−a)(n−2))`, the α saturating the area condition, clamped
/// to 1; `1` for `n = 3`.
pub fn saturating_alpha(n: u32, a: &Rational) -> Result<Rational> {
    if !(forms::MIN_DIMENSION..=forms::MAX_DIMENSION).contains(&n) {
        return Err(Error::InvalidParams(format!("n = {n} outside 3..=8")));
    }
    if *a < Rational::one() || *a >= int(4) {
        return Err(Error::InvalidParams(format!("a = {a} outside [1, 4)")));
    }
    if n == 3 {
        return Ok(Rational::one());
    }
    let n = int(i64::from(n));
    let alpha = int(4) * (&n - int(3)) / ((int(4) - a) * (&n - int(2)));
    Ok(alpha.min(Rational::one()))
}

// ---------------------------------------------------------------------------
// Grid scan

/// Rational points `lo, lo + step, …` not exceeding `hi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridAxis {
    #[serde(with = "serde_ratio")]
    pub lo: Rational,
    #[serde(with = "serde_ratio")]
    pub hi: Rational,
    #[serde(with = "serde_ratio")]
    pub step: Rational,
}

impl GridAxis {
    pub fn new(lo: Rational, hi: Rational, step: Rational) -> Result<Self> {
        if !step.is_positive() {
            return Err(Error::InvalidInput(format!("grid step {step} must be positive")));
        }
        if lo > hi {
            return Err(Error::EmptyRange(format!("[{lo}, {hi}]")));
        }
        Ok(GridAxis { lo, hi, step })
    }

    pub fn points(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut x = self.lo.clone();
        while x <= self.hi {
            out.push(x.clone());
            x += &self.step;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub a: GridAxis,
    pub alpha: GridAxis,
    /// Rounds of local refinement around the best feasible point.
    pub refine_rounds: u32,
    pub budget: Option<GradientBound>,
}

impl GridSpec {
    /// `a ∈ [1, 4)` and `α ∈ [0, 1]`, both with step `1/steps`.
    pub fn uniform(steps: u32) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidInput(format!("steps = {steps} < 2")));
        }
        let step = ratio(1, i64::from(steps));
        Ok(GridSpec {
            a: GridAxis::new(int(1), int(4), step.clone())?,
            alpha: GridAxis::new(int(0), int(1), step)?,
            refine_rounds: 2,
            budget: None,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.a.lo < int(1) || self.a.hi > int(4) {
            return Err(Error::InvalidInput("a range must lie in [1, 4)".into()));
        }
        if self.alpha.lo.is_negative() || self.alpha.hi > int(1) {
            return Err(Error::InvalidInput("alpha range must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::uniform(100).expect("100 steps")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasiblePoint {
    #[serde(with = "serde_ratio")]
    pub a: Rational,
    #[serde(with = "serde_ratio")]
    pub alpha: Rational,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureEntry {
    #[serde(with = "serde_ratio")]
    pub a: Rational,
    #[serde(with = "serde_ratio")]
    pub alpha: Rational,
    pub first: Condition,
    pub failed: Vec<Condition>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub n: u32,
    pub grid: GridSpec,
    /// One row per grid point, `a`-major in grid order.
    pub rows: Vec<ReportRow>,
    pub feasible_points: Vec<FeasiblePoint>,
    /// Largest margin after refinement; earliest grid point wins ties.
    pub best: Option<FeasiblePoint>,
    pub failure_map: Vec<FailureEntry>,
}

fn grid_points(a_axis: &GridAxis, alpha_axis: &GridAxis) -> Vec<(Rational, Rational)> {
    let alphas = alpha_axis.points();
    a_axis
        .points()
        .into_iter()
        .filter(|a| *a < int(4))
        .flat_map(|a| alphas.iter().map(move |al| (a.clone(), al.clone())))
        .collect()
}

fn evaluate(n: u32, points: &[(Rational, Rational)], budget: Option<&GradientBound>) -> Result<Vec<CertificateReport>> {
    let one = |(a, alpha): &(Rational, Rational)| {
        let params = Params::new(n, a.clone(), alpha.clone())?;
        check_conditions(&params, budget)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        points.par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        points.iter().map(one).collect()
    }
}

fn best_of(reports: &[CertificateReport]) -> Option<FeasiblePoint> {
    let mut best: Option<FeasiblePoint> = None;
    for r in reports {
        let Some(m) = r.margin else { continue };
        if best.as_ref().is_none_or(|b| m > b.margin) {
            best = Some(FeasiblePoint { a: r.params.a().clone(), alpha: r.params.alpha().clone(), margin: m });
        }
    }
    best
}

fn clipped_axis(centre: &Rational, half_width: &Rational, step: Rational, bounds: &GridAxis) -> Result<GridAxis> {
    let lo = (centre - half_width).max(bounds.lo.clone());
    let hi = (centre + half_width).min(bounds.hi.clone());
    GridAxis::new(lo, hi, step)
}

/// Exhaustive scan of the rational grid, then `refine_rounds` rounds of a
/// ten-times finer grid spanning one old step around the best point.
pub fn search(n: u32, spec: &GridSpec) -> Result<SearchResult> {
    spec.validate()?;
    let points = grid_points(&spec.a, &spec.alpha);
    if points.is_empty() {
        return Err(Error::EmptyRange("grid has no points with 1 ≤ a < 4".into()));
    }
    let reports = evaluate(n, &points, spec.budget.as_ref())?;

    let mut feasible_points = Vec::new();
    let mut failure_map = Vec::new();
    for r in &reports {
        match r.margin {
            Some(margin) => feasible_points.push(FeasiblePoint {
                a: r.params.a().clone(),
                alpha: r.params.alpha().clone(),
                margin,
            }),
            None => failure_map.push(FailureEntry {
                a: r.params.a().clone(),
                alpha: r.params.alpha().clone(),
                first: r.failure().expect("infeasible report lists a failure"),
                failed: r.failed.clone(),
            }),
        }
    }

    let mut best = best_of(&reports);
    let (mut step_a, mut step_alpha) = (spec.a.step.clone(), spec.alpha.step.clone());
    for _ in 0..spec.refine_rounds {
        let Some(centre) = best.clone() else { break };
        let fine_a = &step_a / int(10);
        let fine_alpha = &step_alpha / int(10);
        let a_axis = clipped_axis(&centre.a, &step_a, fine_a.clone(), &spec.a)?;
        let alpha_axis = clipped_axis(&centre.alpha, &step_alpha, fine_alpha.clone(), &spec.alpha)?;
        let local = evaluate(n, &grid_points(&a_axis, &alpha_axis), spec.budget.as_ref())?;
        if let Some(candidate) = best_of(&local) {
            if candidate.margin > centre.margin {
                best = Some(candidate);
            }
        }
        step_a = fine_a;
        step_alpha = fine_alpha;
    }

    Ok(SearchResult {
        n,
        grid: spec.clone(),
        rows: reports.iter().map(CertificateReport::row).collect(),
        feasible_points,
        best,
        failure_map,
    })
}

// ---------------------------------------------------------------------------
// Largest b

/// Largest `b` for which the reduced bi-Ricci form at `β = (n−2)/4 + b` is
/// nonnegative in `(H̄, x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BSolution {
    pub n: u32,
    /// `D(b) = p·b² + q·b + r`, the discriminant of the `(H̄, x)` part, as `"p/q"` strings.
    pub discriminant_coefficients: [String; 3],
    pub b: f64,
    pub two_b: f64,
    pub beta: f64,
    pub a_star: f64,
    pub bisection_b: f64,
    pub discriminant_at_b: f64,
    pub discriminant_after_b: f64,
    /// `5/116 + √((5/116)² + 11/174)` as printed for `n = 5`.
    pub printed_closed_form_two_b: Option<f64>,
}

/// Exact coefficients `(p, q, r)` of `D(b) = (coef H̄x)² − 4·(coef H̄²)(coef x²)`.
pub fn discriminant_polynomial(n: u32) -> Result<[Rational; 3]> {
    let base = int(i64::from(n) - 2) / int(4);
    let d_at = |b: i64| -> Result<Rational> {
        let f = forms::build_biricci_reduced(n, &(&base + int(b)))?;
        Ok(f.monomial(0, 1) * f.monomial(0, 1) - int(4) * f.monomial(0, 0) * f.monomial(1, 1))
    };
    // Interpolate the quadratic through b = 1, 2, 3 (β stays positive).
    let (d1, d2, d3) = (d_at(1)?, d_at(2)?, d_at(3)?);
    let p = (&d3 - int(2) * &d2 + &d1) / int(2);
    let q = &d2 - &d1 - int(3) * &p;
    let r = &d1 - &p - &q;
    Ok([p, q, r])
}

fn eval_exact(coeffs: &[Rational; 3], b: f64) -> Result<Rational> {
    let b = rational::from_f64(b)?;
    Ok(&coeffs[0] * &b * &b + &coeffs[1] * &b + &coeffs[2])
}

pub fn discriminant(n: u32, b: f64) -> Result<f64> {
    let c = discriminant_polynomial(n)?;
    Ok(rational::to_f64(&eval_exact(&c, b)?))
}

pub fn solve_b(n: u32) -> Result<BSolution> {
    let coeffs = discriminant_polynomial(n)?;
    let [p, q, r] = coeffs.clone().map(|c| rational::to_f64(&c));
    let disc = q * q - 4.0 * p * r;
    if !(p > 0.0 && disc >= 0.0) {
        return Err(Error::InvalidInput(format!("no largest root for n = {n}")));
    }
    let mut b = (-q + disc.sqrt()) / (2.0 * p);
    // Step down to the last float with D(b) ≤ 0 so the sign test is exact.
    while eval_exact(&coeffs, b)?.is_positive() {
        b = b.next_down();
    }

    // Bisection from the vertex of D, where D ≤ 0, outwards past the root.
    let bisection_b = {
        let mut lo = -q / (2.0 * p);
        let mut hi = lo + 1.0;
        while !eval_exact(&coeffs, hi)?.is_positive() {
            hi = lo + 2.0 * (hi - lo);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if eval_exact(&coeffs, mid)?.is_positive() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    };

    let beta = f64::from(n - 2) / 4.0 + b;
    let printed_closed_form_two_b = (n == 5).then(|| {
        let k: f64 = 5.0 / 116.0;
        k + (k * k + 11.0 / 174.0).sqrt()
    });
    Ok(BSolution {
        n,
        discriminant_coefficients: coeffs.clone().map(|c| format_rational(&c)),
        b,
        two_b: 2.0 * b,
        beta,
        a_star: 1.0 / beta,
        bisection_b,
        discriminant_at_b: rational::to_f64(&eval_exact(&coeffs, b)?),
        discriminant_after_b: rational::to_f64(&eval_exact(&coeffs, b + 1e-6)?),
        printed_closed_form_two_b,
    })
}

// ---------------------------------------------------------------------------
// Worked constants

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantRow {
    pub quantity: String,
    pub computed: f64,
    /// Exact value as `"p/q"` when the quantity is rational.
    pub exact: Option<String>,
    pub reference: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub matches: bool,
}

impl ConstantRow {
    fn new(quantity: &str, computed: f64, exact: Option<&Rational>, reference: f64, tolerance: f64) -> Self {
        let abs_diff = (computed - reference).abs();
        ConstantRow {
            quantity: quantity.to_string(),
            computed,
            exact: exact.map(format_rational),
            reference,
            abs_diff,
            tolerance,
            matches: abs_diff <= tolerance,
        }
    }

    fn exact(quantity: &str, value: &Rational, reference: f64, tolerance: f64) -> Self {
        Self::new(quantity, rational::to_f64(value), Some(value), reference, tolerance)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Obstruction {
    pub grid_points: usize,
    pub feasible_count: usize,
    #[serde(with = "serde_ratio")]
    pub max_delta: Rational,
    /// Points where condition (iii) fails.
    pub iii_failures: usize,
    /// Points whose `(H, z)` block is positive definite.
    pub block_pd_points: usize,
    /// Largest finite `c` over the grid, `"p/q"`.
    pub max_c: Option<String>,
    /// Histogram of first failures.
    pub first_failures: Vec<(Condition, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reproduction {
    pub n: u32,
    pub params: Option<Params>,
    pub report: Option<CertificateReport>,
    pub rows: Vec<ConstantRow>,
    pub b_solution: Option<BSolution>,
    pub obstruction: Option<Obstruction>,
    pub feasible: bool,
}

impl Reproduction {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }
}

const EXACT_TOL: f64 = 1e-12;

/// The worked case for `n ∈ {3, 4, 5}` with the published reference values alongside;
/// for `n = 6` the scan over the default grid.
pub fn reproduce(n: u32) -> Result<Reproduction> {
    match n {
        3 | 4 => reproduce_small(n),
        5 => reproduce_five(),
        6 => reproduce_six(),
        _ => Err(Error::InvalidInput(format!("no worked case for n = {n}"))),
    }
}

fn area_lhs(params: &Params) -> Rational {
    int(4) / (params.alpha() * (int(4) - params.a()))
}

fn reproduce_small(n: u32) -> Result<Reproduction> {
    let params = Params::new(n, int(1), int(1))?;
    let report = check_conditions(&params, None)?;
    let c = report.c.c_max.clone().ok_or(Error::SingularUnbounded)?;
    let (ref_delta, ref_c) = if n == 3 { (0.75, 2.0 / 3.0) } else { (1.0, 0.5) };
    let mut rows = vec![
        ConstantRow::exact("delta", &report.delta, ref_delta, EXACT_TOL),
        ConstantRow::exact("c", &c, ref_c, EXACT_TOL),
    ];
    if n == 4 {
        rows.push(ConstantRow::exact("area_lhs", &area_lhs(&params), 4.0 / 3.0, EXACT_TOL));
        let rhs = forms::area_bound(n).expect("n > 3");
        rows.push(ConstantRow::exact("area_rhs", &rhs, 2.0, EXACT_TOL));
    }
    Ok(Reproduction {
        n,
        params: Some(params),
        feasible: report.feasible,
        report: Some(report),
        rows,
        b_solution: None,
        obstruction: None,
    })
}

/// The worked case divides `P` by `10·87` and `Q` by `11·87` before applying
/// the minimisation lemma; the same scalings are used here so the printed
/// bounds can be compared directly.
const P_SCALE: i64 = 870;
const Q_SCALE: i64 = 957;

fn reproduce_five() -> Result<Reproduction> {
    let a = ratio(11, 10);
    let alpha = saturating_alpha(5, &a)?;
    let params = Params::new(5, a, alpha.clone())?;
    let budget = GradientBound::worked_case();
    let report = check_conditions(&params, Some(&budget))?;

    let p = build_p(&params);
    let p_scale = int(P_SCALE);
    let p_block: Vec<Vec<Rational>> =
        (0..2).map(|i| (0..2).map(|j| &p.matrix()[i][j] * &p_scale).collect()).collect();
    let p_cross: Vec<Rational> = (0..2).map(|i| p.monomial(i, 2) * &p_scale).collect();
    let p_min = quad_min(&p_block, &p_cross)?.value;
    let p_omega = p.monomial(2, 2);
    let p_correction = -&p_min / &p_scale;

    let q = build_q(&params);
    let q_scale = int(Q_SCALE);
    let q_block: Vec<Vec<Rational>> =
        (0..2).map(|i| (0..2).map(|j| &q.matrix()[i][j] * &q_scale).collect()).collect();
    let q_cross: Vec<Rational> = (0..2).map(|i| q.monomial(i, 2) * &q_scale).collect();
    let q_min = quad_min(&q_block, &q_cross)?.value;
    let q_correction = -&q_min / &q_scale;
    let c = report.c.c_max.clone().ok_or(Error::SingularUnbounded)?;

    let rescaling = report.rescaling.ok_or(Error::SingularUnbounded)?;
    let b = solve_b(5)?;
    let c_printed = 0.0878792194844039;

    let rows = vec![
        ConstantRow::exact("alpha", &alpha, 80.0 / 87.0, EXACT_TOL),
        ConstantRow::exact("delta", &report.delta, 0.2836206896551724, EXACT_TOL),
        ConstantRow::exact("P_omega_coefficient", &p_omega, 1.891666666666667, EXACT_TOL),
        ConstantRow::exact("P_cross_minimum", &p_min, -1418.21875251078, 1e-9),
        ConstantRow::exact("P_correction", &p_correction, 1.630136497138827, EXACT_TOL),
        ConstantRow::exact("Q_cross_minimum", &q_min, -785.8995869534254, 1e-9),
        ConstantRow::exact("Q_correction", &q_correction, 0.8212116896065052, EXACT_TOL),
        ConstantRow::exact("c", &c, c_printed, EXACT_TOL),
        ConstantRow::new("lambda", rescaling.lambda, None, c_printed * 22.0 * 1.1, EXACT_TOL),
        ConstantRow::new("eps_required", rescaling.eps_required, None, 0.0641205172260532, EXACT_TOL),
        ConstantRow::new(
            "two_b_printed_closed_form",
            b.printed_closed_form_two_b.expect("n = 5"),
            None,
            0.2982,
            2e-4,
        ),
        ConstantRow::new("two_b_largest_root", b.two_b, None, 0.2982, 2e-4),
        ConstantRow::new("b_largest_root", b.b, None, 0.149, 1e-3),
        ConstantRow::new("beta", b.beta, None, 0.899, 1e-3),
        ConstantRow::new("a_star", b.a_star, None, 1.112347052280311, 1e-3),
    ];
    Ok(Reproduction {
        n: 5,
        params: Some(params),
        feasible: report.feasible,
        report: Some(report),
        rows,
        b_solution: Some(b),
        obstruction: None,
    })
}

/// Scan of the default grid at `n = 6`.
pub fn obstruction(n: u32, spec: &GridSpec) -> Result<(SearchResult, Obstruction)> {
    let result = search(n, spec)?;
    let mut max_delta: Option<Rational> = None;
    let mut max_c: Option<Rational> = None;
    let mut block_pd_points = 0;
    let mut iii_failures = 0;
    let mut first_failures: Vec<(Condition, usize)> = Condition::ALL.iter().map(|&c| (c, 0)).collect();
    for row in &result.rows {
        let delta = rational::parse_rational(&row.delta)?;
        if max_delta.as_ref().is_none_or(|m| delta > *m) {
            max_delta = Some(delta);
        }
        if row.c_max != psd::C_MAX_NEG_INF {
            block_pd_points += 1;
            let c = rational::parse_rational(&row.c_max)?;
            if max_c.as_ref().is_none_or(|m| c > *m) {
                max_c = Some(c);
            }
        }
        if row.failed.contains(&Condition::Iii) {
            iii_failures += 1;
        }
        if let Some(first) = row.failure {
            first_failures.iter_mut().find(|(c, _)| *c == first).expect("known tag").1 += 1;
        }
    }
    let summary = Obstruction {
        grid_points: result.rows.len(),
        feasible_count: result.feasible_points.len(),
        max_delta: max_delta.unwrap_or_else(Rational::zero),
        iii_failures,
        block_pd_points,
        max_c: max_c.as_ref().map(format_rational),
        first_failures,
    };
    Ok((result, summary))
}

fn reproduce_six() -> Result<Reproduction> {
    let (_, obs) = obstruction(6, &GridSpec::default())?;
    let rows = vec![
        ConstantRow::exact("max_delta_over_grid", &obs.max_delta, 0.0, EXACT_TOL),
        ConstantRow::new("feasible_points", obs.feasible_count as f64, None, 0.0, 0.0),
    ];
    Ok(Reproduction {
        n: 6,
        params: None,
        report: None,
        rows,
        b_solution: None,
        feasible: obs.feasible_count > 0,
        obstruction: Some(obs),
    })
}
