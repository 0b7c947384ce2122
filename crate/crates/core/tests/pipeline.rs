//! End-to-end checks bridging probabilities and matrices: brute-force event
//! enumeration, the sampling round trip, and exact nesting of ordered
//! chains.

use driftline::bits::BitRow;
use driftline::corrdata::CorrectnessMatrix;
use driftline::events::{dominance_table, enumerate_triplet_points, Pattern, TripletDistribution};
use driftline::synth::{ordered_chain, sample_matrix};

fn uniform_stream(mut state: u64) -> impl FnMut() -> f64 {
    move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn random_matrix(h: usize, n: usize, next: &mut impl FnMut() -> f64) -> CorrectnessMatrix {
    let rows: Vec<BitRow> = (0..h)
        .map(|_| BitRow::from_bits((0..n).map(|_| next() < 0.5)))
        .collect();
    let names = (0..h).map(|i| format!("m{i:02}")).collect();
    CorrectnessMatrix::from_rows("random", names, rows).unwrap()
}

/// Brute-force probability of one correctness pattern over a triple, by
/// scanning examples one at a time.
fn brute_force_cell(
    m: &CorrectnessMatrix,
    triple: [usize; 3],
    pattern: Pattern,
) -> f64 {
    let n = m.n_examples();
    let mut count = 0u64;
    for e in 0..n {
        let matches = (0..3).all(|pos| {
            m.row(triple[pos]).unwrap().get(e) == pattern.is_correct(pos)
        });
        if matches {
            count += 1;
        }
    }
    count as f64 / n as f64
}

#[test]
fn enumeration_matches_brute_force_for_small_model_counts() {
    let mut next = uniform_stream(0xace_0001);
    for h in 3..=10usize {
        let n = 48;
        let mp = random_matrix(h, n, &mut next);
        let mq = random_matrix(h, n, &mut next);
        let points = enumerate_triplet_points(&mp, &mq).unwrap();

        let triples = h * (h - 1) * (h - 2) / 6;
        assert_eq!(points.len(), 6 * triples, "count mismatch at h = {h}");

        for point in &points {
            let expected_p = brute_force_cell(&mp, point.triple, point.pattern);
            let expected_q = brute_force_cell(&mq, point.triple, point.pattern);
            assert!((point.p - expected_p).abs() <= 1e-12);
            assert!((point.q - expected_q).abs() <= 1e-12);
        }
    }
}

#[test]
fn sampling_recovers_planted_cells() {
    let mut next = uniform_stream(0xace_0002);
    let n = 100_000;
    let tolerance = 3.0 / (n as f64).sqrt();
    for trial in 0..10 {
        let raw: Vec<f64> = (0..8).map(|_| -(1.0 - next()).ln()).collect();
        let total: f64 = raw.iter().sum();
        let mut cells = [0.0; 8];
        for (cell, value) in cells.iter_mut().zip(&raw) {
            *cell = value / total;
        }
        let planted = TripletDistribution::from_cells(cells).unwrap();

        let matrix = sample_matrix(&planted, n, 1000 + trial).unwrap();
        let observed = driftline::events::triplet_events(&matrix, 0, 1, 2).unwrap();
        for (obs, want) in observed.cells().iter().zip(planted.cells()) {
            assert!(
                (obs - want).abs() <= tolerance,
                "trial {trial}: cell {obs} drifted from {want}"
            );
        }
    }
}

#[test]
fn ordered_chains_are_exactly_nested_for_every_pair() {
    let mut next = uniform_stream(0xace_0003);
    for trial in 0..10 {
        let h = 3 + (next() * 5.0) as usize;
        let n = 50 + (next() * 500.0) as usize;
        let mut accuracies: Vec<f64> = (0..h).map(|_| next()).collect();
        accuracies.sort_by(f64::total_cmp);
        let matrix = ordered_chain(&accuracies, n, 77 + trial).unwrap();
        let report = dominance_table(&matrix).unwrap();
        assert_eq!(
            report.zeta_max, 0.0,
            "trial {trial}: nesting violated (h = {h}, n = {n})"
        );
        for pair in &report.pairs {
            assert_eq!(pair.dominance, 0.0);
        }
    }
}
