//! Randomized invariants over the parameter space.

use proptest::prelude::*;

use tsd_core::bounds::bound_h3_two_tsd;
use tsd_core::charfn::CharFn;
use tsd_core::distance::wasserstein1_empirical;
use tsd_core::sampling::SampleBatch;
use tsd_core::TsdParams;

fn params_strategy() -> impl Strategy<Value = TsdParams> {
    (
        0.1f64..3.0,
        0.0f64..0.9,
        0.1f64..4.0,
        0.1f64..3.0,
        0.0f64..0.9,
        0.1f64..4.0,
    )
        .prop_map(|(m1, a1, l1, m2, a2, l2)| {
            TsdParams::new(m1, a1, l1, m2, a2, l2).expect("ranges are valid")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serde_round_trip_preserves_params_and_family(p in params_strategy()) {
        let text = serde_json::to_string(&p).unwrap();
        let back: TsdParams = serde_json::from_str(&text).unwrap();
        // JSON float parsing can drift by one ulp, so compare each field with
        // a tiny relative tolerance instead of exact equality.
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-15 * (1.0 + a.abs());
        prop_assert!(close(p.m1, back.m1));
        prop_assert!(close(p.alpha1, back.alpha1));
        prop_assert!(close(p.lambda1, back.lambda1));
        prop_assert!(close(p.m2, back.m2));
        prop_assert!(close(p.alpha2, back.alpha2));
        prop_assert!(close(p.lambda2, back.lambda2));
        prop_assert_eq!(p.sub_family(), back.sub_family());
    }

    #[test]
    fn levy_density_nonnegative_and_variance_positive(
        p in params_strategy(),
        u in -8.0f64..8.0,
    ) {
        if u != 0.0 {
            prop_assert!(p.levy_density(u) >= 0.0);
        }
        prop_assert!(p.variance() > 0.0);
    }

    #[test]
    fn cumulant_splits_into_signed_sides(p in params_strategy()) {
        for n in 1..=4u32 {
            let (plus, minus) = p.cumulant_sides(n);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let total = plus + sign * minus;
            prop_assert!((p.cumulant(n) - total).abs() <= 1e-12 * (1.0 + total.abs()));
        }
    }

    #[test]
    fn charfn_is_hermitian_and_bounded(p in params_strategy(), z in 0.01f64..30.0) {
        let cf = CharFn::Tempered(p);
        prop_assert!(cf.eval(z).norm() <= 1.0 + 1e-12);
        prop_assert!((cf.eval(-z) - cf.eval(z).conj()).norm() < 1e-12);
    }

    #[test]
    fn h3_bound_nonnegative_and_zero_on_diagonal(
        a in params_strategy(),
        b in params_strategy(),
    ) {
        prop_assert!(bound_h3_two_tsd(&a, &b) >= 0.0);
        prop_assert_eq!(bound_h3_two_tsd(&a, &a), 0.0);
    }

    #[test]
    fn wasserstein_is_symmetric_and_translation_covariant(
        values in prop::collection::vec(-10.0f64..10.0, 64),
        shift in -3.0f64..3.0,
    ) {
        let a = SampleBatch { seed: 0, stream: 0, values: values.clone() };
        let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
        let b = SampleBatch { seed: 0, stream: 1, values: shifted };
        let ab = wasserstein1_empirical(&a, &b).unwrap().value;
        let ba = wasserstein1_empirical(&b, &a).unwrap().value;
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((ab - shift.abs()).abs() < 1e-12);
    }
}
