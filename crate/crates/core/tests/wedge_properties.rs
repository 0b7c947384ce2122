//! Property tests for the closeness wedge and the dominance/similarity
//! bookkeeping.

use driftline::bits::BitRow;
use driftline::closeness::{check_closeness, fit_wedge, ClosenessParams};
use driftline::corrdata::CorrectnessMatrix;
use driftline::events::{dominance_probability, similarity, Pattern, TripletPoint};
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = ClosenessParams> {
    (0.0..0.9f64, 0.0..0.9f64, 0.0..0.05f64, 0.0..0.05f64)
        .prop_map(|(d1, d2, n1, n2)| ClosenessParams::new(d1, d2, n1, n2).unwrap())
}

fn points_strategy(max_len: usize) -> impl Strategy<Value = Vec<TripletPoint>> {
    proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..max_len).prop_map(|pairs| {
        pairs
            .into_iter()
            .enumerate()
            .map(|(i, (p, q))| TripletPoint {
                triple: [0, 1, 2],
                pattern: Pattern::NON_UNANIMOUS[i % 6],
                p,
                q,
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn satisfied_iff_between_bounds(
        params in params_strategy(),
        p in 0.0..1.0f64,
        q in 0.0..1.2f64,
    ) {
        let inside = params.lower_bound(p) <= q && q <= params.upper_bound(p);
        prop_assert_eq!(params.satisfied(p, q), inside);
    }

    #[test]
    fn fitted_wedge_reaches_requested_coverage(
        points in points_strategy(40),
        cov_idx in 0usize..3,
    ) {
        let coverage = [0.8, 0.95, 1.0][cov_idx];
        let names: Vec<String> = ["a", "b", "c"].map(str::to_string).to_vec();
        // Fitting can legitimately fail (e.g. p = 0 events whose q exceeds
        // the intercept search range); when it succeeds, the fitted wedge
        // must actually cover the requested fraction.
        if let Ok(params) = fit_wedge(points.clone(), coverage) {
            let report = check_closeness(points, &names, &params).unwrap();
            prop_assert!(
                report.coverage_achieved >= coverage - 1e-12,
                "coverage {} below requested {}",
                report.coverage_achieved,
                coverage
            );
        }
    }

    #[test]
    fn widening_parameters_never_creates_violations(
        points in points_strategy(30),
        params in params_strategy(),
        extra in 0.0..0.3f64,
    ) {
        let names: Vec<String> = ["a", "b", "c"].map(str::to_string).to_vec();
        let base = check_closeness(points.clone(), &names, &params).unwrap();
        let wider = ClosenessParams::new(
            params.delta1 + extra,
            params.delta2 + extra,
            params.nu1 + extra,
            params.nu2 + extra,
        )
        .unwrap();
        let relaxed = check_closeness(points, &names, &wider).unwrap();
        prop_assert!(relaxed.violating <= base.violating);
    }

    #[test]
    fn similarity_and_dominance_satisfy_the_count_identity(
        bits_a in proptest::collection::vec(any::<bool>(), 64),
        bits_b in proptest::collection::vec(any::<bool>(), 64),
    ) {
        let rows = vec![
            BitRow::from_bits(bits_a.iter().copied()),
            BitRow::from_bits(bits_b.iter().copied()),
        ];
        let names = vec!["a".to_string(), "b".to_string()];
        let m = CorrectnessMatrix::from_rows("prop", names, rows).unwrap();
        let s = similarity(&m, 0, 1).unwrap();
        let d = dominance_probability(&m, 0, 1).unwrap();
        let gap = (m.accuracy(0).unwrap() - m.accuracy(1).unwrap()).abs();
        // Disagreements split into the dominance region and its mirror,
        // whose sizes differ by exactly the accuracy gap.
        prop_assert!((s + gap + 2.0 * d - 1.0).abs() <= 1e-12);
    }
}
