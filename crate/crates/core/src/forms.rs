//! The quadratic forms `P(x, y, ω)` and `Q(H, z, h)`, the admissible-δ bound
//! and the stability weight `W`, all as exact functions of `(n, a, α)`.
//!
//! A [`QuadForm`] stores a symmetric coefficient matrix `C` with the
//! convention that an off-diagonal entry is *half* the coefficient of the
//! monomial `vᵢvⱼ`, so the form evaluates to `vᵀCv + constant` and
//! nonnegativity of a homogeneous form is the same as `C` being positive
//! semidefinite.
//!
//! `P` is homogeneous of degree two, so the side constraint `ω² ≤ 1` carried
//! by its variables does not change whether `P ≥ 0`: any point violating the
//! inequality can be rescaled into `{ω² ≤ 1}` without changing the sign of
//! `P`. The PSD test on `P` therefore ignores that constraint.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, RatMatrix};
use crate::rational::{self, int, ratio, serde_ratio, Rational};

pub const MIN_DIMENSION: u32 = 3;
pub const MAX_DIMENSION: u32 = 8;

/// Parameter triple `(n, a, α)`: hypersurface dimension, μ-bubble weight
/// exponent and the α-biRicci mixing weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct Params {
    n: u32,
    #[serde(with = "serde_ratio")]
    a: Rational,
    #[serde(with = "serde_ratio")]
    alpha: Rational,
}

#[derive(Deserialize)]
struct RawParams {
    n: u32,
    #[serde(with = "serde_ratio")]
    a: Rational,
    #[serde(with = "serde_ratio")]
    alpha: Rational,
}

impl TryFrom<RawParams> for Params {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Params::new(raw.n, raw.a, raw.alpha)
    }
}

impl Params {
    /// Requires `3 ≤ n ≤ 8`, `1 ≤ a < 4` and `0 ≤ α ≤ 1`.
    pub fn new(n: u32, a: Rational, alpha: Rational) -> Result<Self> {
        if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&n) {
            return Err(Error::InvalidParams(format!(
                "n = {n} outside {MIN_DIMENSION}..={MAX_DIMENSION}"
            )));
        }
        if a < Rational::one() || a >= int(4) {
            return Err(Error::InvalidParams(format!("a = {a} outside [1, 4)")));
        }
        if alpha.is_negative() || alpha > Rational::one() {
            return Err(Error::InvalidParams(format!("alpha = {alpha} outside [0, 1]")));
        }
        Ok(Params { n, a, alpha })
    }

    /// Convenience constructor from `"p/q"` strings.
    pub fn parse(n: u32, a: &str, alpha: &str) -> Result<Self> {
        Params::new(n, rational::parse_rational(a)?, rational::parse_rational(alpha)?)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    fn n_rat(&self) -> Rational {
        int(i64::from(self.n))
    }
}

/// Name and geometric meaning of a form variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Variable {
    pub name: &'static str,
    pub meaning: &'static str,
}

pub const P_VARIABLES: [Variable; 3] = [
    Variable { name: "x", meaning: "K̄₁₁, second fundamental form of M in the conformal metric" },
    Variable { name: "y", meaning: "K̄₂₂, second fundamental form of M in the conformal metric" },
    Variable { name: "ω", meaning: "n̄(s), normal derivative of s = log r; H̄ = −nω" },
];

pub const Q_VARIABLES: [Variable; 3] = [
    Variable { name: "H", meaning: "mean curvature of the μ-bubble Σ in M" },
    Variable { name: "z", meaning: "A₁₁, second fundamental form of Σ in M" },
    Variable { name: "h", meaning: "prescribed function of the μ-bubble" },
];

/// A quadratic form in named variables with exact coefficients plus an
/// additive constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawQuadForm")]
pub struct QuadForm {
    vars: Vec<String>,
    #[serde(with = "rational::serde_ratio_matrix")]
    coeff: RatMatrix,
    #[serde(with = "serde_ratio")]
    constant: Rational,
}

#[derive(Deserialize)]
struct RawQuadForm {
    vars: Vec<String>,
    #[serde(with = "rational::serde_ratio_matrix")]
    coeff: RatMatrix,
    #[serde(with = "serde_ratio")]
    constant: Rational,
}

impl TryFrom<RawQuadForm> for QuadForm {
    type Error = Error;

    fn try_from(raw: RawQuadForm) -> Result<Self> {
        QuadForm::new(raw.vars, raw.coeff, raw.constant)
    }
}

impl QuadForm {
    pub fn new(vars: Vec<String>, coeff: RatMatrix, constant: Rational) -> Result<Self> {
        let d = linalg::check_square(&coeff)?;
        if d != vars.len() {
            return Err(Error::DimensionMismatch { expected: vars.len(), got: d });
        }
        if !linalg::is_symmetric(&coeff) {
            return Err(Error::NotSymmetric);
        }
        Ok(QuadForm { vars, coeff, constant })
    }

    pub fn zero(vars: &[&str]) -> Self {
        let d = vars.len();
        QuadForm {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            coeff: vec![vec![Rational::zero(); d]; d],
            constant: Rational::zero(),
        }
    }

    /// Adds `c·vᵢvⱼ` (for `i == j`, `c·vᵢ²`).
    pub fn add_monomial(&mut self, i: usize, j: usize, c: &Rational) {
        if i == j {
            self.coeff[i][i] += c;
        } else {
            let half = c / int(2);
            self.coeff[i][j] += &half;
            self.coeff[j][i] += half;
        }
    }

    pub fn add_constant(&mut self, c: &Rational) {
        self.constant += c;
    }

    /// Coefficient of the monomial `vᵢvⱼ` as it would be written out.
    pub fn monomial(&self, i: usize, j: usize) -> Rational {
        if i == j {
            self.coeff[i][i].clone()
        } else {
            &self.coeff[i][j] * int(2)
        }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.coeff
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn is_homogeneous(&self) -> bool {
        self.constant.is_zero()
    }

    /// `Q − c·vᵢ²`.
    pub fn minus_square(&self, i: usize, c: &Rational) -> QuadForm {
        let mut out = self.clone();
        out.coeff[i][i] -= c;
        out
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        self.check_point(point.len())?;
        let mut total = rational::to_f64(&self.constant);
        for (i, vi) in point.iter().enumerate() {
            for (j, vj) in point.iter().enumerate() {
                total += rational::to_f64(&self.coeff[i][j]) * vi * vj;
            }
        }
        Ok(total)
    }

    pub fn eval_exact(&self, point: &[Rational]) -> Result<Rational> {
        self.check_point(point.len())?;
        Ok(linalg::quadratic(&self.coeff, point) + &self.constant)
    }

    fn check_point(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }
}

/// `P(x, y, ω)` of the main estimate.
pub fn build_p(params: &Params) -> QuadForm {
    let n = params.n_rat();
    let a = params.a();
    let alpha = params.alpha();
    let one = Rational::one();
    let nm2 = &n - int(2);
    let two_a_over = int(2) * a / &nm2;

    let omega_sq = (&n - &one)
        + (&n * &n / &nm2 - (&n * &n + int(4) * &n - int(4)) / int(4)) * a;
    let x_sq = (&n - &one) * a / &nm2 - &one;
    let y_sq = (&n - &one) * a / &nm2 - alpha;
    let xy = &two_a_over - alpha;
    let x_omega = &n * (&two_a_over - &one);
    let y_omega = &n * (&two_a_over - alpha);

    let mut p = QuadForm::zero(&["x", "y", "ω"]);
    p.add_monomial(0, 0, &x_sq);
    p.add_monomial(1, 1, &y_sq);
    p.add_monomial(2, 2, &omega_sq);
    p.add_monomial(0, 1, &xy);
    p.add_monomial(0, 2, &x_omega);
    p.add_monomial(1, 2, &y_omega);
    p
}

/// `Q(H, z, h)` of the main estimate.
pub fn build_q(params: &Params) -> QuadForm {
    let n = params.n_rat();
    let a = params.a();
    let alpha = params.alpha();
    let one = Rational::one();
    let nm2 = &n - int(2);
    let inv_a = a.recip();

    let h_sq = &inv_a - (&n - int(3)) / &nm2;
    let z_sq = (&n - &one) / &nm2 - alpha;
    let zh_cap = alpha - int(2) / &nm2;
    let h_cap_h = &one - int(2) * &inv_a;

    let mut q = QuadForm::zero(&["H", "z", "h"]);
    q.add_monomial(0, 0, &h_sq);
    q.add_monomial(1, 1, &z_sq);
    q.add_monomial(2, 2, &inv_a);
    q.add_monomial(0, 1, &zh_cap);
    q.add_monomial(0, 2, &h_cap_h);
    q
}

/// `(n−2)(α − (n−2)a/4)`, the supremum of the admissible δ in condition (i).
pub fn delta_max(params: &Params) -> Rational {
    let nm2 = params.n_rat() - int(2);
    &nm2 * (params.alpha() - &nm2 * params.a() / int(4))
}

/// Pointwise data entering the stability weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityWeightInput {
    /// `|K̄|²` in the conformal metric.
    pub kbar_norm_sq: f64,
    /// `ω = n̄(s)`.
    pub omega: f64,
}

/// `W = |K̄|² − ((n²+4n−4)/4)ω² − ((n−2)/2)²`.
///
/// Rejects `ω² > 1`, negative `|K̄|²` and `|K̄|² < nω²` (which would contradict
/// `H̄² = n²ω² ≤ n|K̄|²`).
pub fn eval_w(n: u32, input: StabilityWeightInput) -> Result<f64> {
    let StabilityWeightInput { kbar_norm_sq, omega } = input;
    if n < MIN_DIMENSION {
        return Err(Error::InvalidInput(format!("n = {n} < {MIN_DIMENSION}")));
    }
    if !kbar_norm_sq.is_finite() || !omega.is_finite() {
        return Err(Error::InvalidInput("non-finite stability weight input".into()));
    }
    if omega * omega > 1.0 {
        return Err(Error::InvalidInput(format!("omega² = {} exceeds 1", omega * omega)));
    }
    if kbar_norm_sq < 0.0 {
        return Err(Error::InvalidInput(format!("|K̄|² = {kbar_norm_sq} is negative")));
    }
    let nf = f64::from(n);
    let umbilic_floor = nf * omega * omega;
    if kbar_norm_sq < umbilic_floor * (1.0 - 1e-12) {
        return Err(Error::InvalidInput(format!(
            "|K̄|² = {kbar_norm_sq} below n·ω² = {umbilic_floor}"
        )));
    }
    let half_nm2 = (nf - 2.0) / 2.0;
    Ok(kbar_norm_sq - (nf * nf + 4.0 * nf - 4.0) / 4.0 * omega * omega - half_nm2 * half_nm2)
}

/// Lower bound for `W + β·BiRic` as a form in `(H̄, x)` with `x = K̄₁₁ + K̄₂₂`,
/// including the constant term `(n−2)(β − (n−2)/4)`.
pub fn build_biricci_reduced(n: u32, beta: &Rational) -> Result<QuadForm> {
    if n < MIN_DIMENSION {
        return Err(Error::InvalidInput(format!("n = {n} < {MIN_DIMENSION}")));
    }
    if !beta.is_positive() {
        return Err(Error::InvalidInput(format!("beta = {beta} must be positive")));
    }
    let n = int(i64::from(n));
    let nm2 = &n - int(2);
    let inv_nm2 = nm2.recip();

    let constant = &nm2 * (beta - &nm2 / int(4));
    let hbar_sq = &inv_nm2
        + (int(4) * beta * (&n - int(1)) - &n * &n - int(4) * &n + int(4)) / (int(4) * &n * &n);
    let hbar_x = beta - int(2) * &inv_nm2;
    let x_sq = &inv_nm2 - beta / int(4);

    let mut f = QuadForm::zero(&["H̄", "x"]);
    f.add_monomial(0, 0, &hbar_sq);
    f.add_monomial(0, 1, &hbar_x);
    f.add_monomial(1, 1, &x_sq);
    f.add_constant(&constant);
    Ok(f)
}

/// `(n−2)/(n−3)`, the right side of the area condition; `None` for `n = 3`
/// where it is infinite.
pub fn area_bound(n: u32) -> Option<Rational> {
    (n > 3).then(|| ratio(i64::from(n) - 2, i64::from(n) - 3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    fn params(n: u32, a: &str, alpha: &str) -> Params {
        Params::parse(n, a, alpha).unwrap()
    }

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    /// Monomial coefficients in the order x², y², ω², xy, xω, yω.
    fn monomials(f: &QuadForm) -> Vec<Rational> {
        vec![
            f.monomial(0, 0),
            f.monomial(1, 1),
            f.monomial(2, 2),
            f.monomial(0, 1),
            f.monomial(0, 2),
            f.monomial(1, 2),
        ]
    }

    #[test]
    fn params_bounds() {
        assert!(Params::parse(3, "1", "1").is_ok());
        assert!(Params::parse(2, "1", "1").is_err());
        assert!(Params::parse(9, "1", "1").is_err());
        assert!(Params::parse(5, "4", "1").is_err());
        assert!(Params::parse(5, "399/100", "1").is_ok());
        assert!(Params::parse(5, "99/100", "1").is_err());
        assert!(Params::parse(5, "1", "-1/10").is_err());
        assert!(Params::parse(5, "1", "11/10").is_err());
        assert!(Params::parse(5, "1.1", "1").is_err());
    }

    #[test]
    fn p_for_n3() {
        let p = build_p(&params(3, "1", "1"));
        let expected = ["1", "1", "27/4", "1", "3", "3"].map(r);
        assert_eq!(monomials(&p), expected);
    }

    #[test]
    fn p_for_n4() {
        let p = build_p(&params(4, "1", "1"));
        let expected = ["1/2", "1/2", "4", "0", "0", "0"].map(r);
        assert_eq!(monomials(&p), expected);
    }

    #[test]
    fn p_for_n5() {
        let p = build_p(&params(5, "11/10", "80/87"));
        let expected = ["406/870", "476/870", "227/120", "-162/870", "-232/174", "-162/174"].map(r);
        assert_eq!(monomials(&p), expected);
    }

    #[test]
    fn q_examples() {
        // Order: H², z², h², zH, hH, zh.
        let q_mon = |q: &QuadForm| {
            vec![
                q.monomial(0, 0),
                q.monomial(1, 1),
                q.monomial(2, 2),
                q.monomial(0, 1),
                q.monomial(0, 2),
                q.monomial(1, 2),
            ]
        };
        assert_eq!(q_mon(&build_q(&params(3, "1", "1"))), ["1", "1", "1", "-1", "-1", "0"].map(r));
        assert_eq!(q_mon(&build_q(&params(4, "1", "1"))), ["1/2", "1/2", "1", "0", "-1", "0"].map(r));
        assert_eq!(
            q_mon(&build_q(&params(5, "11/10", "80/87"))),
            ["232/957", "396/957", "10/11", "242/957", "-783/957", "0"].map(r)
        );
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_max(&params(3, "1", "1")), r("3/4"));
        assert_eq!(delta_max(&params(5, "11/10", "80/87")), r("329/1160"));
        assert_eq!(delta_max(&params(6, "1", "1")), r("0"));
    }

    #[test]
    fn w_examples() {
        let w = |n, k, o| eval_w(n, StabilityWeightInput { kbar_norm_sq: k, omega: o }).unwrap();
        assert_eq!(w(3, 0.0, 0.0), -0.25);
        assert_eq!(w(4, 4.0, 1.0), -4.0);
        // 10 − (41/4)(1/4) − 9/4
        assert!((w(5, 10.0, 0.5) - 5.1875).abs() < 1e-15);
    }

    #[test]
    fn w_rejects_bad_inputs() {
        let w = |k, o| eval_w(5, StabilityWeightInput { kbar_norm_sq: k, omega: o });
        assert!(w(10.0, 1.5).is_err());
        assert!(w(-1.0, 0.0).is_err());
        assert!(w(0.1, 0.5).is_err());
    }

    #[test]
    fn biricci_reduced_examples() {
        let f = build_biricci_reduced(5, &r("3/4")).unwrap();
        assert_eq!(f.constant(), &r("0"));
        let f = build_biricci_reduced(4, &r("1")).unwrap();
        assert_eq!(f.constant(), &r("1"));
        assert_eq!(f.monomial(0, 0), r("1/4"));
        assert_eq!(f.monomial(0, 1), r("0"));
        assert_eq!(f.monomial(1, 1), r("1/4"));
        // β = 3/4 + b at b = 1/10: 3b, 4b/25 + 13/300, b + 1/12, 7/48 − b/4
        let b = r("1/10");
        let f = build_biricci_reduced(5, &(r("3/4") + &b)).unwrap();
        assert_eq!(f.constant(), &(int(3) * &b));
        assert_eq!(f.monomial(0, 0), int(4) * &b / int(25) + r("13/300"));
        assert_eq!(f.monomial(0, 1), &b + r("1/12"));
        assert_eq!(f.monomial(1, 1), r("7/48") - &b / int(4));
        assert!(build_biricci_reduced(5, &r("0")).is_err());
    }

    #[test]
    fn eval_examples() {
        let mut id = QuadForm::zero(&["u", "v"]);
        id.add_monomial(0, 0, &int(1));
        id.add_monomial(1, 1, &int(1));
        assert_eq!(id.eval(&[3.0, 4.0]).unwrap(), 25.0);
        let q = build_q(&params(3, "1", "1"));
        assert_eq!(q.eval_exact(&[int(1), int(1), int(1)]).unwrap(), int(1));
        assert_eq!(q.eval(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(q.eval(&[1.0]), Err(Error::DimensionMismatch { expected: 3, got: 1 })));
    }

    #[test]
    fn rejects_asymmetric_matrix() {
        let m = vec![vec![int(1), int(2)], vec![int(0), int(1)]];
        let err = QuadForm::new(vec!["a".into(), "b".into()], m, int(0)).unwrap_err();
        assert_eq!(err, Error::NotSymmetric);
    }

    #[test]
    fn area_bound_values() {
        assert_eq!(area_bound(3), None);
        assert_eq!(area_bound(4), Some(int(2)));
        assert_eq!(area_bound(5), Some(r("3/2")));
    }
}
