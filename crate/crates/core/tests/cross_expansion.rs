mod support {
    pub mod poly;
}

use bubblecert::forms::{build_p, build_q, delta_max, Params};
use bubblecert::rational::ratio;
use proptest::prelude::*;
use support::poly::{self, mismatches};

fn params() -> impl Strategy<Value = Params> {
    (3u32..=8, 1i64..=60, 1i64..=60).prop_flat_map(|(n, qa, qal)| {
        (Just(n), qa..4 * qa, Just(qa), 0..=qal, Just(qal)).prop_map(|(n, pa, qa, pal, qal)| {
            Params::new(n, ratio(pa, qa), ratio(pal, qal)).expect("generated in range")
        })
    })
}

fn assert_clean(label: &str, params: &Params, found: Vec<String>) {
    assert!(found.is_empty(), "{label} at {params:?}: {found:#?}");
}

#[test]
fn worked_cases_match_expansions() {
    for (n, a, alpha) in [(3, "1", "1"), (4, "1", "1"), (5, "11/10", "80/87"), (6, "1", "1")] {
        let p = Params::parse(n, a, alpha).unwrap();
        assert_clean("P/trace", &p, mismatches(&build_p(&p), &poly::p_from_trace_bound(&p)));
        assert_clean("Q/chain", &p, mismatches(&build_q(&p), &poly::q_from_chain(&p)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn p_matches_trace_bound_expansion(p in params()) {
        assert_clean("P/trace", &p, mismatches(&build_p(&p), &poly::p_from_trace_bound(&p)));
    }

    #[test]
    fn p_matches_collected_display(p in params()) {
        assert_clean("P/collected", &p, mismatches(&build_p(&p), &poly::p_from_collected(&p)));
    }

    #[test]
    fn q_matches_chain_expansion(p in params()) {
        assert_clean("Q/chain", &p, mismatches(&build_q(&p), &poly::q_from_chain(&p)));
    }

    #[test]
    fn q_matches_collected_display(p in params()) {
        assert_clean("Q/collected", &p, mismatches(&build_q(&p), &poly::q_from_collected(&p)));
    }

    #[test]
    fn delta_matches_leftover_constant(p in params()) {
        prop_assert_eq!(delta_max(&p), poly::delta_from_expansion(&p));
    }
}
