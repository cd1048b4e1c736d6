//! Exact positive-semidefiniteness certificates and Schur-complement
//! minimisation for small quadratic forms.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::QuadForm;
use crate::linalg::{self, RatMatrix};
use crate::rational::{self, int, serde_ratio, Rational};

/// Default tolerance for numeric eigenvalue corroboration.
pub const EIGEN_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalMinor {
    pub indices: Vec<usize>,
    #[serde(with = "serde_ratio")]
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub is_psd: bool,
    /// Every principal minor of the coefficient matrix.
    pub exact_minors: Vec<PrincipalMinor>,
    /// Smallest eigenvalue in `f64`, for corroboration only.
    pub lambda_min: f64,
    /// Exact direction with `vᵀCv < 0`, present iff `is_psd` is false.
    #[serde(with = "rational::serde_ratio_vec_opt")]
    pub witness: Option<Vec<Rational>>,
}

impl PsdVerdict {
    /// Whether the exact verdict and the sign of `lambda_min` agree, ignoring
    /// eigenvalues within `tol` of zero.
    pub fn numeric_agrees(&self, tol: f64) -> bool {
        if self.lambda_min.abs() <= tol {
            return true;
        }
        self.is_psd == (self.lambda_min > 0.0)
    }
}

/// All-principal-minors PSD test. Leading minors alone would misclassify
/// singular matrices such as `diag(0, −1)`, which do occur at saturating
/// parameter values.
pub fn is_psd_matrix(m: &[Vec<Rational>]) -> Result<PsdVerdict> {
    let d = linalg::check_square(m)?;
    if !linalg::is_symmetric(m) {
        return Err(Error::NotSymmetric);
    }
    let exact_minors: Vec<PrincipalMinor> = linalg::index_subsets(d)
        .into_iter()
        .map(|indices| {
            let value = linalg::determinant(&linalg::principal_submatrix(m, &indices));
            PrincipalMinor { indices, value }
        })
        .collect();
    let is_psd = exact_minors.iter().all(|pm| !pm.value.is_negative());
    let witness = if is_psd { None } else { linalg::negative_direction(m) };
    debug_assert_eq!(witness.is_some(), !is_psd);
    Ok(PsdVerdict { is_psd, exact_minors, lambda_min: linalg::lambda_min(m), witness })
}

/// PSD verdict for a homogeneous form.
pub fn is_psd(form: &QuadForm) -> Result<PsdVerdict> {
    if !form.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    is_psd_matrix(form.matrix())
}

/// Sylvester's criterion, valid for strict definiteness.
pub fn is_positive_definite(m: &[Vec<Rational>]) -> bool {
    (1..=m.len()).all(|k| {
        let idx: Vec<usize> = (0..k).collect();
        linalg::determinant(&linalg::principal_submatrix(m, &idx)).is_positive()
    })
}

/// Minimum of `⟨AX, X⟩ + ⟨B, X⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadMin {
    /// `−¼⟨A⁻¹B, B⟩` (or its pseudo-inverse analogue when `A` is singular).
    pub value: Rational,
    /// `X* = −½A⁻¹B`.
    pub minimizer: Vec<Rational>,
    /// `A` was singular but `B` lies in its range.
    pub degenerate: bool,
}

/// Exact minimum of `⟨AX, X⟩ + ⟨B, X⟩` over `X ∈ ℝᵈ`.
///
/// For positive definite `A` this is `−¼⟨A⁻¹B, B⟩` attained at `−½A⁻¹B`.
/// A singular PSD `A` still yields a finite minimum when `B` is in the range
/// of `A`; otherwise the result is [`Error::SingularUnbounded`]. An indefinite
/// `A` gives [`Error::Indefinite`].
pub fn quad_min(a: &[Vec<Rational>], b: &[Rational]) -> Result<QuadMin> {
    let d = linalg::check_square(a)?;
    if b.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: b.len() });
    }
    if !linalg::is_symmetric(a) {
        return Err(Error::NotSymmetric);
    }
    let degenerate = !is_positive_definite(a);
    if degenerate && !is_psd_matrix(a)?.is_psd {
        return Err(Error::Indefinite);
    }
    // Stationarity: 2AX + B = 0.
    let rhs: Vec<Rational> = b.iter().map(|x| -x / int(2)).collect();
    let minimizer = linalg::solve_consistent(a, &rhs).ok_or(Error::SingularUnbounded)?;
    let value = linalg::dot(b, &minimizer) / int(2);
    Ok(QuadMin { value, minimizer, degenerate })
}

/// The largest `c` with `Q − c·h² ⪰ 0`, where `h` is the last variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestC {
    /// `None` encodes `−∞`: the block of the other variables is not
    /// positive definite, so this reduction cannot produce any `c`.
    #[serde(with = "serde_c_max")]
    pub c_max: Option<Rational>,
    /// Serialized as a number, or `"-inf"` when `c_max` is `None`.
    #[serde(with = "serde_c_max_f64")]
    pub c_max_f64: f64,
    /// Coefficient block of the eliminated variables (`A`).
    #[serde(with = "rational::serde_ratio_matrix")]
    pub reduced_block: RatMatrix,
    /// Monomial coefficients of the `h`-cross terms (`b` in `b·X h`).
    #[serde(with = "rational::serde_ratio_vec")]
    pub cross_vector: Vec<Rational>,
    /// `λ_min(Q − c_max·h²)`, zero up to rounding when `c_max` is finite.
    pub residual_check: Option<f64>,
}

impl BestC {
    pub fn is_positive(&self) -> bool {
        self.c_max.as_ref().is_some_and(Signed::is_positive)
    }

    /// Confirms maximality: `Q − c_max·h²` has `|λ_min| ≤ tol`, and
    /// `Q − (c_max + bump)·h²` is not PSD (decided exactly).
    pub fn confirm(&self, form: &QuadForm, tol: f64, bump: f64) -> Result<bool> {
        let Some(c) = &self.c_max else {
            return Ok(false);
        };
        let h = form.dim() - 1;
        let residual_ok = self.residual_check.is_some_and(|l| l.abs() <= tol);
        let bumped = c + rational::from_f64(bump)?;
        let over = is_psd_matrix(form.minus_square(h, &bumped).matrix())?;
        Ok(residual_ok && !over.is_psd)
    }
}

/// Best `h²` coefficient by Schur reduction: minimising `Q` over the other
/// variables at fixed `h` gives `(q_hh − ¼⟨A⁻¹b, b⟩)·h²`.
pub fn best_c(form: &QuadForm) -> Result<BestC> {
    let d = form.dim();
    if d < 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: d });
    }
    if !form.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let h = d - 1;
    let idx: Vec<usize> = (0..h).collect();
    let block = linalg::principal_submatrix(form.matrix(), &idx);
    let cross: Vec<Rational> = idx.iter().map(|&i| form.monomial(i, h)).collect();

    let c_max = if is_positive_definite(&block) {
        let m = quad_min(&block, &cross)?;
        Some(&form.matrix()[h][h] + m.value)
    } else {
        None
    };
    let residual_check = c_max
        .as_ref()
        .map(|c| linalg::lambda_min(form.minus_square(h, c).matrix()));
    let c_max_f64 = c_max.as_ref().map_or(f64::NEG_INFINITY, rational::to_f64);
    Ok(BestC { c_max, c_max_f64, reduced_block: block, cross_vector: cross, residual_check })
}

/// Brute-force minimum of a form over a lattice of `resolution` points per
/// axis spanning the box. Independent of every routine above; intended for
/// corroboration in tests and reports.
pub fn grid_min_oracle(form: &QuadForm, bounds: &[(f64, f64)], resolution: usize) -> Result<f64> {
    let d = form.dim();
    if bounds.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: bounds.len() });
    }
    if resolution < 2 {
        return Err(Error::InvalidInput(format!("resolution {resolution} < 2")));
    }
    if d == 0 || bounds.iter().any(|&(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
        return Err(Error::EmptyRange("oracle box".into()));
    }
    let c: Vec<Vec<f64>> = form
        .matrix()
        .iter()
        .map(|row| row.iter().map(rational::to_f64).collect())
        .collect();
    let constant = rational::to_f64(form.constant());
    // A degenerate interval pins its coordinate to a single value.
    let axes: Vec<Vec<f64>> = bounds
        .iter()
        .map(|&(lo, hi)| {
            if lo == hi {
                return vec![lo];
            }
            let step = (hi - lo) / (resolution - 1) as f64;
            (0..resolution).map(|k| lo + step * k as f64).collect()
        })
        .collect();

    // Enumerate all axes but the last; along the last axis the form is the
    // univariate quadratic c_ll·t² + lin·t + base.
    let last = d - 1;
    let mut counter = vec![0usize; last];
    let mut best = f64::INFINITY;
    loop {
        let prefix: Vec<f64> = counter.iter().enumerate().map(|(i, &k)| axes[i][k]).collect();
        let mut base = constant;
        let mut lin = 0.0;
        for i in 0..last {
            for j in 0..last {
                base += c[i][j] * prefix[i] * prefix[j];
            }
            lin += 2.0 * c[i][last] * prefix[i];
        }
        let cll = c[last][last];
        for &t in &axes[last] {
            let v = (cll * t + lin) * t + base;
            if v < best {
                best = v;
            }
        }
        // Odometer increment.
        let mut pos = 0;
        loop {
            if pos == last {
                return Ok(best);
            }
            counter[pos] += 1;
            if counter[pos] < axes[pos].len() {
                break;
            }
            counter[pos] = 0;
            pos += 1;
        }
    }
}

/// Homogenises `⟨AX, X⟩ + ⟨B, X⟩` as a form in `(t, X)` whose value at `t = 1`
/// is the original expression.
pub fn lift_affine(a: &[Vec<Rational>], b: &[Rational]) -> Result<QuadForm> {
    let d = linalg::check_square(a)?;
    if b.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: b.len() });
    }
    let names: Vec<String> =
        std::iter::once("t".to_string()).chain((0..d).map(|i| format!("x{i}"))).collect();
    let mut coeff = vec![vec![Rational::zero(); d + 1]; d + 1];
    for i in 0..d {
        for j in 0..d {
            coeff[i + 1][j + 1] = a[i][j].clone();
        }
        coeff[0][i + 1] = &b[i] / int(2);
        coeff[i + 1][0] = &b[i] / int(2);
    }
    QuadForm::new(names, coeff, Rational::zero())
}

mod serde_c_max {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::rational::{format_rational, parse_rational, Rational};

    pub const NEG_INF: &str = "-inf";

    pub fn serialize<S: Serializer>(c: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match c {
            Some(r) => s.serialize_str(&format_rational(r)),
            None => s.serialize_str(NEG_INF),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s = String::deserialize(d)?;
        if s == NEG_INF {
            return Ok(None);
        }
        parse_rational(&s).map(Some).map_err(serde::de::Error::custom)
    }
}

mod serde_c_max_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::serde_c_max::NEG_INF;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *x == f64::NEG_INFINITY {
            s.serialize_str(NEG_INF)
        } else {
            x.serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) if s == NEG_INF => Ok(f64::NEG_INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("expected a number or {NEG_INF:?}, got {s:?}"))),
        }
    }
}

pub use serde_c_max::NEG_INF as C_MAX_NEG_INF;

/// `"p/q"` or `"-inf"`.
pub fn format_c_max(c: &Option<Rational>) -> String {
    c.as_ref().map_or_else(|| C_MAX_NEG_INF.to_string(), rational::format_rational)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{build_p, build_q, Params};
    use crate::rational::{parse_rational, ratio};

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn mat(rows: &[&[i64]]) -> RatMatrix {
        rows.iter().map(|row| row.iter().map(|&x| int(x)).collect()).collect()
    }

    fn diag_form(entries: &[i64]) -> QuadForm {
        let names: Vec<String> = (0..entries.len()).map(|i| format!("v{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut f = QuadForm::zero(&refs);
        for (i, &e) in entries.iter().enumerate() {
            f.add_monomial(i, i, &int(e));
        }
        f
    }

    #[test]
    fn p_is_psd_at_worked_points() {
        for (n, a, alpha) in [(3, "1", "1"), (4, "1", "1"), (5, "11/10", "80/87")] {
            let v = is_psd(&build_p(&Params::parse(n, a, alpha).unwrap())).unwrap();
            assert!(v.is_psd, "n = {n}");
            assert_eq!(v.exact_minors.len(), 7);
            assert!(v.witness.is_none());
            assert!(v.numeric_agrees(EIGEN_TOLERANCE));
        }
    }

    #[test]
    fn diagonal_indefinite_form_has_witness() {
        let f = diag_form(&[1, -1]);
        let v = is_psd(&f).unwrap();
        assert!(!v.is_psd);
        assert_eq!(v.witness, Some(vec![int(0), int(1)]));
        assert!(f.eval_exact(v.witness.as_ref().unwrap()).unwrap() < int(0));
    }

    #[test]
    fn singular_psd_needs_all_minors() {
        // Leading minors of diag(0, −1) are 0 and 0.
        let v = is_psd_matrix(&mat(&[&[0, 0], &[0, -1]])).unwrap();
        assert!(!v.is_psd);
        assert!(is_psd_matrix(&mat(&[&[0, 0], &[0, 1]])).unwrap().is_psd);
    }

    #[test]
    fn non_homogeneous_rejected() {
        let mut f = diag_form(&[1, 1]);
        f.add_constant(&int(1));
        assert_eq!(is_psd(&f).unwrap_err(), Error::NotHomogeneous);
    }

    #[test]
    fn quad_min_identity() {
        let m = quad_min(&mat(&[&[1, 0], &[0, 1]]), &[int(2), int(0)]).unwrap();
        assert_eq!(m.value, int(-1));
        assert_eq!(m.minimizer, vec![int(-1), int(0)]);
        assert!(!m.degenerate);
    }

    #[test]
    fn quad_min_worked_instances() {
        let m = quad_min(&mat(&[&[406, -81], &[-81, 476]]), &[int(-1160), int(-810)]).unwrap();
        assert_eq!(m.value, r("-52954870/37339"));
        assert!((rational::to_f64(&m.value) + 1418.21875251078).abs() < 1e-9);
        let m = quad_min(&mat(&[&[232, 121], &[121, 396]]), &[int(-783), int(0)]).unwrap();
        assert!((rational::to_f64(&m.value) + 785.8995869534254).abs() < 1e-9);
    }

    #[test]
    fn quad_min_degenerate_cases() {
        let singular = mat(&[&[1, 1], &[1, 1]]);
        let m = quad_min(&singular, &[int(2), int(2)]).unwrap();
        assert!(m.degenerate);
        // (u+v)² + 2(u+v) has minimum −1.
        assert_eq!(m.value, int(-1));
        assert_eq!(quad_min(&singular, &[int(1), int(0)]).unwrap_err(), Error::SingularUnbounded);
        assert_eq!(quad_min(&mat(&[&[1, 0], &[0, -1]]), &[int(0), int(0)]).unwrap_err(), Error::Indefinite);
    }

    #[test]
    fn best_c_worked_values() {
        let c = |n, a, alpha| best_c(&build_q(&Params::parse(n, a, alpha).unwrap())).unwrap();
        assert_eq!(c(3, "1", "1").c_max, Some(ratio(2, 3)));
        assert_eq!(c(4, "1", "1").c_max, Some(ratio(1, 2)));
        let five = c(5, "11/10", "80/87");
        assert_eq!(five.c_max, Some(ratio(617, 7021)));
        assert!((five.c_max_f64 - 0.0878792194844039).abs() < 1e-12);
        assert!(five.residual_check.unwrap().abs() < EIGEN_TOLERANCE);
    }

    #[test]
    fn best_c_reports_negative_infinity_for_indefinite_block() {
        let q = build_q(&Params::parse(6, "2", "1").unwrap());
        let c = best_c(&q).unwrap();
        assert_eq!(c.c_max, None);
        assert_eq!(c.c_max_f64, f64::NEG_INFINITY);
        assert!(!c.is_positive());
        assert_eq!(format_c_max(&c.c_max), "-inf");
    }

    #[test]
    fn best_c_is_maximal() {
        let q = build_q(&Params::parse(3, "1", "1").unwrap());
        let c = best_c(&q).unwrap();
        assert!(c.confirm(&q, EIGEN_TOLERANCE, 1e-9).unwrap());
        assert!(c.c_max.unwrap() <= int(1));
    }

    #[test]
    fn oracle_examples() {
        let id = diag_form(&[1, 1]);
        assert_eq!(grid_min_oracle(&id, &[(-1.0, 1.0), (-1.0, 1.0)], 101).unwrap(), 0.0);

        // x² + y² + 2x on [−2, 2]², minimum −1 at (−1, 0).
        let lifted = lift_affine(&mat(&[&[1, 0], &[0, 1]]), &[int(2), int(0)]).unwrap();
        let m = grid_min_oracle(&lifted, &[(1.0, 1.0), (-2.0, 2.0), (-2.0, 2.0)], 401).unwrap();
        assert!((m + 1.0).abs() < 1e-4);

        let q = build_q(&Params::parse(3, "1", "1").unwrap());
        let reduced = q.minus_square(2, &ratio(2, 3));
        let m = grid_min_oracle(&reduced, &[(-3.0, 3.0); 3], 121).unwrap();
        assert!(m >= -1e-3);
    }

    #[test]
    fn oracle_rejects_bad_boxes() {
        let id = diag_form(&[1, 1]);
        assert!(grid_min_oracle(&id, &[(1.0, -1.0), (0.0, 1.0)], 10).is_err());
        assert!(grid_min_oracle(&id, &[(0.0, 1.0)], 10).is_err());
        assert!(grid_min_oracle(&id, &[(0.0, 1.0), (0.0, 1.0)], 1).is_err());
    }
}
