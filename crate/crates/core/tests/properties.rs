use ffdist::analysis::{interval_bounds, split_sums, top_mass_gap, total_variation, tv_report};
use ffdist::exact_dist::{omega_counts, omega_dist_float, stirling_row};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn prime_power() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_rows_are_distributions(q in prime_power(), n in 1usize..60) {
        let row = omega_counts(q, n).unwrap().distribution(n).unwrap();
        prop_assert_eq!(row.total(), BigRational::one());
        prop_assert!(row.mass().iter().all(|p| *p >= BigRational::zero()));
    }

    #[test]
    fn tv_partition_and_range(q in prime_power(), n in 2usize..80) {
        let a = omega_counts(q, n).unwrap().distribution(n).unwrap();
        let b = stirling_row(n).unwrap();
        let d = total_variation(&a, &b).unwrap();
        prop_assert!(d >= BigRational::zero() && d <= BigRational::one());
        let [s1, s2, s3] = split_sums(&a, &b, interval_bounds(q, n));
        prop_assert_eq!(s1 + s2 + s3, d * BigRational::from_integer(2.into()));
    }

    #[test]
    fn intervals_cover_one_to_n(q in prime_power(), n in 1usize..20_000) {
        let iv = interval_bounds(q, n);
        prop_assert!(iv.i1_end <= iv.i2_end && iv.i2_end <= n);
        if q == 2 {
            prop_assert_eq!(iv.i1_end, iv.i2_end);
        }
    }

    #[test]
    fn tv_at_most_two_over_q(q in prime_power(), n in 2usize..150) {
        let r = tv_report(q, n, None).unwrap();
        prop_assert!(r.d_tv <= 2.0 / q as f64, "d_tv = {}", r.d_tv);
    }

    #[test]
    fn float_rows_track_exact_rows(q in prime_power(), n in 1usize..120) {
        let exact = omega_counts(q, n).unwrap().distribution(n).unwrap().to_f64();
        let float = omega_dist_float(q, n, None).unwrap();
        for k in 1..=n {
            prop_assert!((exact.prob(k) - float.prob(k)).abs() <= 1e-12);
        }
    }

    #[test]
    fn top_mass_identity(q in prime_power(), n in 1usize..30) {
        let (lhs, rhs) = top_mass_gap(q, n).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
