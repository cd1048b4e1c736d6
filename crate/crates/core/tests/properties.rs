use bubblecert::certificate::{
    self, area_condition, check_conditions, saturating_alpha, search, Condition, GradientBound, GridAxis, GridSpec,
    ReportRow,
};
use bubblecert::forms::{self, build_p, build_q, delta_max, eval_w, Params, QuadForm, StabilityWeightInput};
use bubblecert::geometry::{self, kn_product, SymBilinear};
use bubblecert::linalg::{self, RatMatrix};
use bubblecert::profile::{self, PROFILE_TOLERANCE};
use bubblecert::psd::{self, best_c, is_psd_matrix, quad_min};
use bubblecert::rational::{self, int, ratio};
use bubblecert::Rational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params() -> impl Strategy<Value = Params> {
    (3u32..=8, 1i64..=40, 1i64..=40).prop_flat_map(|(n, qa, qal)| {
        (Just(n), qa..4 * qa, Just(qa), 0..=qal, Just(qal)).prop_map(|(n, pa, qa, pal, qal)| {
            Params::new(n, ratio(pa, qa), ratio(pal, qal)).expect("generated in range")
        })
    })
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(p, q)| ratio(p, q))
}

fn sym_matrix(d: usize) -> impl Strategy<Value = RatMatrix> {
    proptest::collection::vec(-6i64..=6, d * d).prop_map(move |v| {
        (0..d)
            .map(|i| (0..d).map(|j| int(v[i.min(j) * d + i.max(j)])).collect())
            .collect()
    })
}

/// `MᵀM + I`, positive definite.
fn pd_matrix(d: usize) -> impl Strategy<Value = RatMatrix> {
    proptest::collection::vec(-4i64..=4, d * d).prop_map(move |v| {
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let s: i64 = (0..d).map(|k| v[k * d + i] * v[k * d + j]).sum();
                        int(s + i64::from(i == j))
                    })
                    .collect()
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forms_are_homogeneous(p in params(), v in proptest::collection::vec(small_rational(), 3), t in small_rational()) {
        for f in [build_p(&p), build_q(&p)] {
            let tv: Vec<Rational> = v.iter().map(|x| x * &t).collect();
            prop_assert_eq!(f.eval_exact(&tv).unwrap(), &t * &t * f.eval_exact(&v).unwrap());
        }
    }

    #[test]
    fn delta_monotone(p in params(), da in 1i64..=10, dal in 1i64..=10) {
        let a2 = p.a() + ratio(da, 100);
        if a2 < int(4) {
            let q = Params::new(p.n(), a2, p.alpha().clone()).unwrap();
            prop_assert!(delta_max(&q) < delta_max(&p));
        }
        let al2 = p.alpha() + ratio(dal, 100);
        if al2 <= int(1) {
            let q = Params::new(p.n(), p.a().clone(), al2).unwrap();
            prop_assert!(delta_max(&q) > delta_max(&p));
        }
    }

    #[test]
    fn w_on_umbilic_configuration(n in 3u32..=8, omega in -1.0f64..=1.0) {
        let nf = f64::from(n);
        let w = eval_w(n, StabilityWeightInput { kbar_norm_sq: nf * omega * omega, omega }).unwrap();
        // |K̄|² = nω² collapses W to −((n²−4)/4)ω² − ((n−2)/2)².
        let expected = -((nf * nf - 4.0) / 4.0) * omega * omega - ((nf - 2.0) / 2.0).powi(2);
        prop_assert!((w - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
    }

    #[test]
    fn psd_verdict_is_certified(m in sym_matrix(3)) {
        let v = is_psd_matrix(&m).unwrap();
        prop_assert!(v.numeric_agrees(psd::EIGEN_TOLERANCE));
        match &v.witness {
            Some(w) => {
                prop_assert!(!v.is_psd);
                prop_assert!(linalg::quadratic(&m, w).is_negative());
            }
            None => {
                prop_assert!(v.is_psd);
                prop_assert!(v.exact_minors.iter().all(|mi| !mi.value.is_negative()));
            }
        }
        prop_assert_eq!(v.exact_minors.len(), 7);
    }

    #[test]
    fn quad_min_is_stationary_and_minimal(
        a in pd_matrix(3),
        b in proptest::collection::vec(small_rational(), 3),
        probe in proptest::collection::vec(small_rational(), 3),
    ) {
        let m = quad_min(&a, &b).unwrap();
        prop_assert!(!m.degenerate);
        let ax = linalg::mat_vec(&a, &m.minimizer);
        for (axi, bi) in ax.iter().zip(&b) {
            prop_assert!((int(2) * axi + bi).is_zero());
        }
        let f = |x: &[Rational]| linalg::quadratic(&a, x) + linalg::dot(&b, x);
        prop_assert_eq!(f(&m.minimizer), m.value.clone());
        prop_assert!(f(&probe) >= m.value);
    }

    #[test]
    fn best_c_is_maximal(p in params()) {
        let q = build_q(&p);
        let c = best_c(&q).unwrap();
        if let Some(cv) = &c.c_max {
            prop_assert!(is_psd_matrix(q.minus_square(2, cv).matrix()).unwrap().is_psd);
            prop_assert!(c.confirm(&q, 1e-9, 1e-6).unwrap());
        } else {
            prop_assert!(!psd::is_positive_definite(&c.reduced_block));
        }
    }

    #[test]
    fn feasibility_is_the_conjunction(p in params()) {
        let r = check_conditions(&p, None).unwrap();
        let eps = r.eps_required.unwrap();
        let conj = r.delta.is_positive()
            && r.p_verdict.is_psd
            && r.c.is_positive()
            && r.area_ok
            && eps < rational::to_f64(&r.delta);
        prop_assert_eq!(r.feasible, conj);
        prop_assert_eq!(r.feasible, r.failed.is_empty());
        let mut sorted = r.failed.clone();
        sorted.sort();
        prop_assert_eq!(sorted, r.failed.clone());
    }

    #[test]
    fn area_condition_matches_float_form(p in params()) {
        prop_assume!(p.n() > 3 && p.alpha().is_positive());
        let a = rational::to_f64(p.a());
        let al = rational::to_f64(p.alpha());
        let n = f64::from(p.n());
        let lhs = 4.0 / (al * (4.0 - a));
        let rhs = (n - 2.0) / (n - 3.0);
        prop_assume!((lhs - rhs).abs() > 1e-9);
        prop_assert_eq!(area_condition(&p), lhs <= rhs);
    }

    #[test]
    fn saturating_alpha_makes_area_tight(n in 4u32..=8, pa in 10i64..40) {
        let a = ratio(pa, 10);
        let alpha = saturating_alpha(n, &a).unwrap();
        let p = Params::new(n, a.clone(), alpha.clone()).unwrap();
        if alpha < int(1) {
            prop_assert!(area_condition(&p));
            let lhs = int(4) / (&alpha * (int(4) - &a));
            prop_assert_eq!(lhs, forms::area_bound(n).unwrap());
        } else {
            // Clamped: α = 1 is the best available and may still fall short.
            let lhs = int(4) / (int(4) - &a);
            prop_assert_eq!(area_condition(&p), lhs <= forms::area_bound(n).unwrap());
        }
    }

    #[test]
    fn profile_saturates(eps in 1e-3f64..10.0, c in 1e-3f64..10.0) {
        let p = profile::synthesize(eps, c).unwrap();
        prop_assert!((p.length() * (eps * c).sqrt() - std::f64::consts::PI).abs() <= 1e-12);
        let check = profile::verify(&p, 500).unwrap();
        prop_assert!(check.passes(PROFILE_TOLERANCE));
        prop_assert_eq!(check.sign_changes, 1);
    }

    #[test]
    fn rescale_inverts(a_const in 1e-3f64..5.0, b_quad in 1e-3f64..5.0, pa in 10i64..40, c in 1e-3f64..5.0) {
        let r = profile::rescale(a_const, b_quad, &ratio(pa, 10), c).unwrap();
        let a = pa as f64 / 10.0;
        prop_assert!((b_quad * r.lambda / a - c).abs() <= 1e-12 * c.max(1.0));
        prop_assert!((a_const / (a * r.lambda) - r.eps_required).abs() <= 1e-12 * r.eps_required.max(1.0));
    }

    #[test]
    fn kn_has_curvature_symmetries(seed in any::<u64>(), dim in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = SymBilinear::random(dim, 1.0, &mut rng);
        let t = SymBilinear::random(dim, 1.0, &mut rng);
        let r = kn_product(&s, &t).unwrap();
        prop_assert!(r.symmetry_defect() <= 1e-14);
        prop_assert!(r.bianchi_defect() <= 1e-14);
        prop_assert!(r.max_abs_diff(&kn_product(&t, &s).unwrap()).unwrap() <= 1e-15);
    }

    #[test]
    fn frame_change_keeps_symmetries(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = geometry::random_curvature(4, 2, &mut rng);
        let frame = geometry::random_frame(4, &mut rng);
        let rf = r.in_frame(&frame).unwrap();
        prop_assert!(rf.symmetry_defect() <= 1e-12);
        prop_assert!(rf.bianchi_defect() <= 1e-12);
    }

    #[test]
    fn report_rows_round_trip(p in params()) {
        let row = check_conditions(&p, Some(&GradientBound::worked_case())).unwrap().row();
        let json = serde_json::to_string(&row).unwrap();
        let back: ReportRow = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, row);
    }

    #[test]
    fn quad_forms_round_trip(p in params()) {
        let f = build_p(&p);
        let json = serde_json::to_string(&f).unwrap();
        let back: QuadForm = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, f);
    }
}

#[test]
fn params_deserialization_validates() {
    let ok: Params = serde_json::from_str(r#"{"n":5,"a":"11/10","alpha":"80/87"}"#).unwrap();
    assert_eq!(ok, Params::parse(5, "11/10", "80/87").unwrap());
    assert!(serde_json::from_str::<Params>(r#"{"n":5,"a":"4","alpha":"1"}"#).is_err());
    assert!(serde_json::from_str::<Params>(r#"{"n":2,"a":"1","alpha":"1"}"#).is_err());
    assert!(serde_json::from_str::<Params>(r#"{"n":5,"a":"1.1","alpha":"1"}"#).is_err());
}

fn small_grid(budget: Option<GradientBound>) -> GridSpec {
    GridSpec {
        a: GridAxis::new(int(1), ratio(13, 10), ratio(1, 20)).unwrap(),
        alpha: GridAxis::new(ratio(4, 5), int(1), ratio(1, 20)).unwrap(),
        refine_rounds: 2,
        budget,
    }
}

#[test]
fn search_is_deterministic() {
    let spec = small_grid(None);
    let a = serde_json::to_string(&search(5, &spec).unwrap()).unwrap();
    let b = serde_json::to_string(&search(5, &spec).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn feasible_points_recheck() {
    for n in [3, 4, 5] {
        let spec = small_grid(Some(GradientBound::worked_case()));
        let res = search(n, &spec).unwrap();
        for fp in &res.feasible_points {
            let p = Params::new(n, fp.a.clone(), fp.alpha.clone()).unwrap();
            let r = check_conditions(&p, spec.budget.as_ref()).unwrap();
            assert!(r.feasible);
            assert_eq!(r.margin, Some(fp.margin));
        }
        assert_eq!(res.rows.len(), 7 * 5);
        assert_eq!(res.rows.len(), res.feasible_points.len() + res.failure_map.len());
    }
}

#[test]
fn n5_search_finds_the_worked_point() {
    let spec = GridSpec {
        a: GridAxis::new(ratio(11, 10), ratio(11, 10), ratio(1, 10)).unwrap(),
        alpha: GridAxis::new(ratio(783, 870), ratio(820, 870), ratio(1, 870)).unwrap(),
        refine_rounds: 0,
        budget: Some(GradientBound::worked_case()),
    };
    let res = search(5, &spec).unwrap();
    assert!(res.feasible_points.iter().any(|p| p.a == ratio(11, 10) && p.alpha == ratio(80, 87)));
    // Below the saturating α only the area condition fails.
    let below = res.failure_map.iter().find(|f| f.alpha == ratio(799, 870)).unwrap();
    assert_eq!(below.failed, vec![Condition::Area]);
}

#[test]
fn n4_default_grid_contains_unit_point() {
    let res = search(4, &GridSpec::default()).unwrap();
    assert!(res.feasible_points.iter().any(|p| p.a == int(1) && p.alpha == int(1)));
    assert!(res.best.is_some());
}

#[test]
fn solve_b_is_consistent_with_biricci_form() {
    let s = certificate::solve_b(5).unwrap();
    let beta = rational::from_f64(s.beta).unwrap();
    let f = forms::build_biricci_reduced(5, &beta).unwrap();
    // At the largest root the (H̄, x) part is PSD up to rounding of b.
    let lm = linalg::lambda_min(f.matrix());
    assert!(lm > -1e-12, "{lm}");
    assert!(f.constant().is_positive());
}
