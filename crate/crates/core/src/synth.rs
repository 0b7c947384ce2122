//! Synthetic scenarios and sampled fixtures: hand-built triplet
//! distributions with known answers, independent-prediction triplets,
//! exactly-nested correctness matrices, and seeded i.i.d. sampling from a
//! triplet distribution. These serve as brute-force oracles for the
//! analytic code paths.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::BitRow;
use crate::corrdata::CorrectnessMatrix;
use crate::error::{Error, Result};
use crate::events::{Pattern, TripletDistribution, TripletPoint};

/// Identifier of the seeded generator used by every sampling routine,
/// recorded in output metadata so fixtures are reproducible across
/// implementations by (algorithm, seed).
pub const RNG_ALGORITHM: &str = "chacha8";

/// A pair of triplet distributions with a map of independently derived
/// quantities (accuracies, residuals, dominance values, wedge parameters)
/// that downstream code is expected to reproduce.
#[derive(Debug, Clone, Serialize)]
pub struct PlantedScenario {
    pub name: String,
    pub p: TripletDistribution,
    pub q: TripletDistribution,
    pub expected: BTreeMap<String, f64>,
}

impl PlantedScenario {
    /// The six non-unanimous event probabilities of the scenario as
    /// comparable (p, q) points, ready for a wedge check.
    pub fn closeness_points(&self) -> Vec<TripletPoint> {
        Pattern::NON_UNANIMOUS
            .iter()
            .map(|&pattern| TripletPoint {
                triple: [0, 1, 2],
                pattern,
                p: self.p.cell(pattern),
                q: self.q.cell(pattern),
            })
            .collect()
    }

    /// All eight event probabilities as (p, q) points, including the
    /// unanimous cells.
    pub fn all_cell_points(&self) -> Vec<TripletPoint> {
        (0..8u8)
            .map(|mask| {
                let pattern = Pattern::from_flags(mask & 4 != 0, mask & 2 != 0, mask & 1 != 0);
                TripletPoint {
                    triple: [0, 1, 2],
                    pattern,
                    p: self.p.cell(pattern),
                    q: self.q.cell(pattern),
                }
            })
            .collect()
    }
}

fn expected_map(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries
        .iter()
        .map(|&(k, v)| (k.to_string(), v))
        .collect()
}

/// Scenario with both distributions ordered (zero dominance everywhere)
/// but a large middle-model residual: accuracies (0.6, 0.7, 0.8) against
/// (0.5, 0.9, 0.9), residual 0.2.
pub fn example1() -> PlantedScenario {
    // Cells in canonical order [p123, p12, p13, p1, p23, p2, p3, p_none].
    let p = TripletDistribution::from_cells([0.6, 0.0, 0.0, 0.0, 0.1, 0.0, 0.1, 0.2])
        .expect("hand-built distribution is valid");
    let q = TripletDistribution::from_cells([0.5, 0.0, 0.0, 0.0, 0.4, 0.0, 0.0, 0.1])
        .expect("hand-built distribution is valid");
    PlantedScenario {
        name: "ordered_large_residual".to_string(),
        p,
        q,
        expected: expected_map(&[
            ("mu_p_1", 0.6),
            ("mu_p_2", 0.7),
            ("mu_p_3", 0.8),
            ("mu_q_1", 0.5),
            ("mu_q_2", 0.9),
            ("mu_q_3", 0.9),
            ("residual", 0.2),
            ("zeta_p", 0.0),
            ("zeta_q", 0.0),
        ]),
    }
}

/// Scenario with an independent-prediction first distribution at
/// μ = (0.6, 0.7, 0.8) and a hand-tuned second distribution that sits
/// tightly inside the (0.31, 0.38, 0.005, 0.008) wedge; residual 0.163.
pub fn example2() -> PlantedScenario {
    let p = independent_triplet(0.6, 0.7, 0.8).expect("probabilities are in range");
    let q = TripletDistribution::from_cells([0.336, 0.053, 0.2, 0.057, 0.15, 0.034, 0.14, 0.03])
        .expect("hand-built distribution is valid");
    PlantedScenario {
        name: "independent_wedge_bound".to_string(),
        p,
        q,
        expected: expected_map(&[
            ("mu_p_1", 0.6),
            ("mu_p_2", 0.7),
            ("mu_p_3", 0.8),
            ("mu_q_1", 0.646),
            ("mu_q_2", 0.573),
            ("mu_q_3", 0.826),
            ("residual", 0.163),
            ("dominance_12", 0.18),
            ("dominance_13", 0.12),
            ("dominance_23", 0.14),
            ("closeness_delta1", 0.31),
            ("closeness_delta2", 0.38),
            ("closeness_nu1", 0.005),
            ("closeness_nu2", 0.008),
            ("closeness_violations", 0.0),
            ("analytic_bound", 0.055),
        ]),
    }
}

/// Joint distribution of three models that are correct independently with
/// probabilities `mu1`, `mu2`, `mu3` (e.g. the all-correct cell is
/// `mu1 · mu2 · mu3`).
pub fn independent_triplet(mu1: f64, mu2: f64, mu3: f64) -> Result<TripletDistribution> {
    for (i, mu) in [mu1, mu2, mu3].into_iter().enumerate() {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidInput(format!(
                "marginal accuracy {} must lie in [0, 1], found {mu}",
                i + 1
            )));
        }
    }
    let (a1, a2, a3) = (mu1, mu2, mu3);
    let (b1, b2, b3) = (1.0 - mu1, 1.0 - mu2, 1.0 - mu3);
    TripletDistribution::from_cells([
        a1 * a2 * a3, // all correct
        a1 * a2 * b3,
        a1 * b2 * a3,
        a1 * b2 * b3,
        b1 * a2 * a3,
        b1 * a2 * b3,
        b1 * b2 * a3,
        b1 * b2 * b3, // none correct
    ])
}

fn model_names(h: usize) -> Vec<String> {
    let width = h.to_string().len();
    (1..=h).map(|i| format!("model_{i:0width$}")).collect()
}

/// Correctness matrix with exactly nested correct sets: model `i` is
/// correct on the first `round(μᵢ · n)` examples of a seeded permutation,
/// so every dominance probability is exactly zero.
pub fn ordered_chain(accuracies: &[f64], n_examples: usize, seed: u64) -> Result<CorrectnessMatrix> {
    if accuracies.is_empty() {
        return Err(Error::EmptyMatrix("ordered chain needs at least one accuracy"));
    }
    if n_examples == 0 {
        return Err(Error::InvalidInput(
            "ordered chain needs at least one example".into(),
        ));
    }
    for pair in accuracies.windows(2) {
        if pair[1] < pair[0] {
            return Err(Error::InvalidInput(format!(
                "accuracies must be nondecreasing, found {} after {}",
                pair[1], pair[0]
            )));
        }
    }
    if accuracies.iter().any(|mu| !(0.0..=1.0).contains(mu)) {
        return Err(Error::InvalidInput(
            "accuracies must lie in [0, 1]".into(),
        ));
    }

    // Round to nearest counts, then take the running maximum so rounding
    // cannot break the nesting.
    let mut counts: Vec<usize> = accuracies
        .iter()
        .map(|mu| ((mu * n_examples as f64).round() as usize).min(n_examples))
        .collect();
    for i in 1..counts.len() {
        counts[i] = counts[i].max(counts[i - 1]);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n_examples).collect();
    order.shuffle(&mut rng);
    // rank[e] = position of example e in the shuffled order.
    let mut rank = vec![0usize; n_examples];
    for (position, &example) in order.iter().enumerate() {
        rank[example] = position;
    }

    let rows: Vec<BitRow> = counts
        .iter()
        .map(|&c| BitRow::from_bits(rank.iter().map(|&r| r < c)))
        .collect();
    CorrectnessMatrix::from_rows("ordered_chain", model_names(accuracies.len()), rows)
}

/// Samples `n_examples` i.i.d. joint outcomes from a triplet distribution
/// with a seeded generator; the same seed reproduces the same matrix.
pub fn sample_matrix(
    t: &TripletDistribution,
    n_examples: usize,
    seed: u64,
) -> Result<CorrectnessMatrix> {
    if n_examples == 0 {
        return Err(Error::InvalidInput(
            "sampling needs at least one example".into(),
        ));
    }
    let cells = t.cells();
    let patterns: [Pattern; 8] = [
        Pattern::from_flags(true, true, true),
        Pattern::from_flags(true, true, false),
        Pattern::from_flags(true, false, true),
        Pattern::from_flags(true, false, false),
        Pattern::from_flags(false, true, true),
        Pattern::from_flags(false, true, false),
        Pattern::from_flags(false, false, true),
        Pattern::from_flags(false, false, false),
    ];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![BitRow::zeros(n_examples); 3];
    for e in 0..n_examples {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut drawn = patterns[7];
        for (cell, pattern) in cells.iter().zip(patterns) {
            acc += cell;
            if u < acc {
                drawn = pattern;
                break;
            }
        }
        for (k, row) in rows.iter_mut().enumerate() {
            if drawn.is_correct(k) {
                row.set(e, true);
            }
        }
    }
    CorrectnessMatrix::from_rows(
        "sampled",
        vec!["f1".to_string(), "f2".to_string(), "f3".to_string()],
        rows,
    )
}
