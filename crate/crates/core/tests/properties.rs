use gpe_core::entropy::{ctpe, gpe, pe, pe_avg, CtpeOptions};
use gpe_core::math::binomial;
use gpe_core::patterns::{oracle_profile, Symmetry};
use gpe_core::profile::{count_3214, fallback_profile, fast_profile, profile, ProfileOptions};
use gpe_core::{rank_series, PatternId};
use proptest::prelude::*;

fn series(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-20i32..20, 1..=max_len)
        .prop_map(|v| v.into_iter().map(|x| x as f64 * 0.5).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn monotone_transform_invariance(x in series(25), k in 2usize..=4) {
        let y: Vec<f64> = x.iter().map(|v| v.powi(3) + 2.0 * v).collect();
        let a = fast_profile(&rank_series(&x).unwrap(), k).unwrap();
        let b = fast_profile(&rank_series(&y).unwrap(), k).unwrap();
        prop_assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn reversal_and_complement(x in series(25), k in 2usize..=4) {
        let rs = rank_series(&x).unwrap();
        let p = fast_profile(&rs, k).unwrap();
        prop_assert_eq!(fast_profile(&rs.reversed(), k).unwrap().counts, p.mapped(Symmetry::Reverse).counts);
        prop_assert_eq!(fast_profile(&rs.complemented(), k).unwrap().counts, p.mapped(Symmetry::Complement).counts);
    }

    #[test]
    fn counts_sum_to_binomial(x in series(30), k in 2usize..=6) {
        let rs = rank_series(&x).unwrap();
        let p = profile(&rs, k, &ProfileOptions::default()).unwrap();
        prop_assert_eq!(p.total(), binomial(x.len() as u64, k as u64));
    }

    #[test]
    fn entropies_in_unit_interval(x in series(30), k in 2usize..=4) {
        prop_assume!(x.len() >= k);
        let rs = rank_series(&x).unwrap();
        let g = gpe(&rs, k, &ProfileOptions::default()).unwrap().normalized;
        prop_assert!((0.0..=1.0).contains(&g));
        let delays: Vec<usize> = (1..=(x.len() - 1) / (k - 1)).collect();
        let p = pe(&rs, k, 1).unwrap().normalized;
        prop_assert!((0.0..=1.0).contains(&p));
        let a = pe_avg(&rs, k, &delays).unwrap().normalized;
        prop_assert!((0.0..=1.0).contains(&a));
        if k <= 3 {
            let c = ctpe(&rs, k, &CtpeOptions::default()).unwrap().normalized;
            prop_assert!((0.0..=1.0).contains(&c));
        }
    }

    #[test]
    fn gpe_of_reversed_series_is_equal(x in series(25), k in 2usize..=4) {
        prop_assume!(x.len() >= k);
        let rs = rank_series(&x).unwrap();
        let a = gpe(&rs, k, &ProfileOptions::default()).unwrap().raw;
        let b = gpe(&rs.reversed(), k, &ProfileOptions::default()).unwrap().raw;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn count_3214_isolates_its_pattern(x in series(14)) {
        let rs = rank_series(&x).unwrap();
        let want = if x.len() >= 4 {
            oracle_profile(&rs, 4).unwrap().count(PatternId::parse("3214").unwrap())
        } else {
            0
        };
        prop_assert_eq!(count_3214(&rs), want);
    }

    #[test]
    fn fallback_matches_oracle(x in series(12), k in 5usize..=6) {
        let rs = rank_series(&x).unwrap();
        prop_assert_eq!(
            fallback_profile(&rs, k, u128::MAX).unwrap().counts,
            oracle_profile(&rs, k).unwrap().counts
        );
    }
}
