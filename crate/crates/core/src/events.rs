//! Dominance probabilities, model similarity, and triplet-event extraction.
//!
//! For a pair of models with accuracies μᵢ ≤ μⱼ, the *dominance probability*
//! is the probability that the lower-accuracy model is correct where the
//! higher-accuracy one is wrong. For a triple of models, the eight joint
//! correctness outcomes partition the example space; the six *non-unanimous*
//! outcomes (excluding all-correct and all-wrong) are the events whose
//! probabilities are compared across the two distributions.

use serde::{Serialize, Serializer};

use crate::bits::BitRow;
use crate::corrdata::CorrectnessMatrix;
use crate::error::{Error, Result};

/// Joint correctness pattern for a model triple, stored as a 3-bit mask
/// (bit 2 = first model correct, bit 1 = second, bit 0 = third).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Pattern(u8);

impl Pattern {
    pub const ALL_CORRECT: Pattern = Pattern(0b111);
    pub const NONE_CORRECT: Pattern = Pattern(0b000);

    /// The six non-unanimous patterns in canonical order:
    /// `++-`, `+-+`, `+--`, `-++`, `-+-`, `--+`.
    pub const NON_UNANIMOUS: [Pattern; 6] = [
        Pattern(0b110),
        Pattern(0b101),
        Pattern(0b100),
        Pattern(0b011),
        Pattern(0b010),
        Pattern(0b001),
    ];

    /// Builds a pattern from three correctness flags.
    pub fn from_flags(first: bool, second: bool, third: bool) -> Self {
        Pattern(((first as u8) << 2) | ((second as u8) << 1) | third as u8)
    }

    /// Parses a code like `++-`.
    pub fn from_code(code: &str) -> Result<Self> {
        let bytes = code.as_bytes();
        if bytes.len() != 3 || bytes.iter().any(|b| !matches!(b, b'+' | b'-')) {
            return Err(Error::InvalidInput(format!(
                "pattern must be three of +/-, found {code:?}"
            )));
        }
        Ok(Pattern::from_flags(
            bytes[0] == b'+',
            bytes[1] == b'+',
            bytes[2] == b'+',
        ))
    }

    /// Three-character code, e.g. `++-`.
    pub fn code(&self) -> String {
        (0..3)
            .map(|bit| if self.0 & (0b100 >> bit) != 0 { '+' } else { '-' })
            .collect()
    }

    /// Whether the named position (0, 1, or 2) is correct under this pattern.
    pub fn is_correct(&self, position: usize) -> bool {
        debug_assert!(position < 3);
        self.0 & (0b100 >> position) != 0
    }

    /// Index of this pattern in the canonical 8-cell order
    /// `[+++, ++-, +-+, +--, -++, -+-, --+, ---]`.
    pub fn cell_index(&self) -> usize {
        7 - self.0 as usize
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.code())
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.code())
    }
}

/// The eight joint correctness probabilities for a model triple. Subscripts
/// name the set of correct models: `p12` is the probability that the first
/// two models are correct and the third is wrong.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TripletDistribution {
    p123: f64,
    p12: f64,
    p13: f64,
    p23: f64,
    p1: f64,
    p2: f64,
    p3: f64,
    p_none: f64,
}

impl TripletDistribution {
    /// Validates cells: all nonnegative (tiny negative float noise is clamped)
    /// and summing to 1 within 1e-12.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p123: f64,
        p12: f64,
        p13: f64,
        p23: f64,
        p1: f64,
        p2: f64,
        p3: f64,
        p_none: f64,
    ) -> Result<Self> {
        Self::from_cells([p123, p12, p13, p1, p23, p2, p3, p_none])
    }

    /// Builds from cells in the canonical order
    /// `[p123, p12, p13, p1, p23, p2, p3, p_none]`
    /// (matching the pattern order `+++, ++-, +-+, +--, -++, -+-, --+, ---`).
    pub fn from_cells(mut cells: [f64; 8]) -> Result<Self> {
        for c in &mut cells {
            if *c < 0.0 {
                if *c < -1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "negative triplet cell {c}"
                    )));
                }
                *c = 0.0;
            }
        }
        let sum: f64 = cells.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "triplet cells sum to {sum}, expected 1"
            )));
        }
        let [p123, p12, p13, p1, p23, p2, p3, p_none] = cells;
        Ok(TripletDistribution {
            p123,
            p12,
            p13,
            p23,
            p1,
            p2,
            p3,
            p_none,
        })
    }

    /// Empirical distribution from integer counts in canonical cell order.
    pub fn from_counts(counts: [u64; 8]) -> Result<Self> {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::EmptyMatrix("examples"));
        }
        let mut cells = [0.0; 8];
        for (cell, &c) in cells.iter_mut().zip(&counts) {
            *cell = c as f64 / n as f64;
        }
        // Counts divided by their own total can miss 1.0 by float rounding;
        // absorb the slack into the largest cell so validation stays exact.
        let sum: f64 = cells.iter().sum();
        let imax = (0..8)
            .max_by(|&a, &b| cells[a].total_cmp(&cells[b]))
            .expect("eight cells");
        cells[imax] += 1.0 - sum;
        Self::from_cells(cells)
    }

    pub fn p123(&self) -> f64 {
        self.p123
    }
    pub fn p12(&self) -> f64 {
        self.p12
    }
    pub fn p13(&self) -> f64 {
        self.p13
    }
    pub fn p23(&self) -> f64 {
        self.p23
    }
    pub fn p1(&self) -> f64 {
        self.p1
    }
    pub fn p2(&self) -> f64 {
        self.p2
    }
    pub fn p3(&self) -> f64 {
        self.p3
    }
    pub fn p_none(&self) -> f64 {
        self.p_none
    }

    /// Cells in canonical order `[p123, p12, p13, p1, p23, p2, p3, p_none]`.
    pub fn cells(&self) -> [f64; 8] {
        [
            self.p123, self.p12, self.p13, self.p1, self.p23, self.p2, self.p3, self.p_none,
        ]
    }

    /// Probability of one joint pattern.
    pub fn cell(&self, pattern: Pattern) -> f64 {
        self.cells()[pattern.cell_index()]
    }

    /// The six non-unanimous `(pattern, probability)` cells in canonical order.
    pub fn non_unanimous_cells(&self) -> [(Pattern, f64); 6] {
        Pattern::NON_UNANIMOUS.map(|pat| (pat, self.cell(pat)))
    }

    /// Implied per-model accuracies `(μ₁, μ₂, μ₃)`.
    pub fn accuracies(&self) -> [f64; 3] {
        [
            self.p1 + self.p12 + self.p13 + self.p123,
            self.p2 + self.p12 + self.p23 + self.p123,
            self.p3 + self.p13 + self.p23 + self.p123,
        ]
    }

    /// Dominance probabilities `(lower model correct, higher model wrong)` for
    /// the pairs (1,2), (1,3), (2,3): `p1+p13`, `p1+p12`, `p2+p12`.
    pub fn dominance_probabilities(&self) -> [f64; 3] {
        [
            self.p1 + self.p13,
            self.p1 + self.p12,
            self.p2 + self.p12,
        ]
    }

    /// True when the four cells that must vanish for a nested (ordered) triple
    /// are all zero.
    pub fn is_ordered(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && self.p12 == 0.0 && self.p13 == 0.0
    }
}

/// One triplet event compared across the two distributions: the models
/// involved (as indices into a shared model list), the correctness pattern,
/// and the event probability under each distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TripletPoint {
    pub triple: [usize; 3],
    pub pattern: Pattern,
    pub p: f64,
    pub q: f64,
}

/// Dominance probability for one ordered pair of models.
#[derive(Clone, Debug, Serialize)]
pub struct DominancePair {
    /// Lower-accuracy model of the pair.
    pub lower: String,
    /// Higher-accuracy model of the pair.
    pub higher: String,
    pub mu_lower: f64,
    pub mu_higher: f64,
    /// Accuracy gap `mu_higher - mu_lower`.
    pub gap: f64,
    pub dominance: f64,
    pub similarity: f64,
}

/// Dominance probabilities for all model pairs of one matrix, with summary
/// statistics.
#[derive(Clone, Debug, Serialize)]
pub struct DominanceReport {
    pub pairs: Vec<DominancePair>,
    /// Maximum dominance probability over all pairs — the smallest ζ for
    /// which the approximate-ordering assumption holds empirically.
    pub zeta_max: f64,
    /// Fraction of pairs whose dominance probability is below `threshold`.
    pub fraction_below_threshold: f64,
    pub threshold: f64,
}

/// Default threshold used when summarizing how many pairs have small
/// dominance probabilities.
pub const DOMINANCE_SUMMARY_THRESHOLD: f64 = 0.05;

fn rows_oriented(
    m: &CorrectnessMatrix,
    i: usize,
    j: usize,
) -> Result<(&BitRow, &BitRow)> {
    let (ri, rj) = (m.row(i)?, m.row(j)?);
    if ri.count_ones() <= rj.count_ones() {
        Ok((ri, rj))
    } else {
        log::info!(
            "dominance pair ({i}, {j}) swapped: model {i} has the higher accuracy"
        );
        Ok((rj, ri))
    }
}

/// Probability that the lower-accuracy model of the pair is correct while the
/// higher-accuracy one is wrong. The pair is oriented automatically (with a
/// notice) if given in the wrong order; `i == j` returns 0.
pub fn dominance_probability(m: &CorrectnessMatrix, i: usize, j: usize) -> Result<f64> {
    if i == j {
        log::debug!("dominance of a model against itself is 0 by convention");
        m.row(i)?;
        return Ok(0.0);
    }
    let (lo, hi) = rows_oriented(m, i, j)?;
    Ok(BitRow::count_and_not(lo, hi) as f64 / m.n_examples() as f64)
}

/// Fraction of examples on which the two models agree (both correct or both
/// wrong). Satisfies `similarity + (μⱼ - μᵢ) + 2·dominance = 1` exactly in
/// the underlying integer counts.
pub fn similarity(m: &CorrectnessMatrix, i: usize, j: usize) -> Result<f64> {
    let (ri, rj) = (m.row(i)?, m.row(j)?);
    let differing = BitRow::count_xor(ri, rj);
    Ok((m.n_examples() as u64 - differing) as f64 / m.n_examples() as f64)
}

/// Empirical joint distribution of the eight correctness outcomes for three
/// distinct models.
pub fn triplet_events(
    m: &CorrectnessMatrix,
    i: usize,
    j: usize,
    k: usize,
) -> Result<TripletDistribution> {
    if i == j || i == k || j == k {
        return Err(Error::NonDistinctIndices);
    }
    let counts = BitRow::triple_counts(m.row(i)?, m.row(j)?, m.row(k)?);
    TripletDistribution::from_counts(counts)
}

/// Iterator over all `6·C(h,3)` non-unanimous triplet events of two aligned
/// matrices, in lexicographic `(i, j, k, pattern)` order. Points are computed
/// lazily, one triple at a time.
pub struct TripletPointIter<'m> {
    mp: &'m CorrectnessMatrix,
    mq: &'m CorrectnessMatrix,
    triple: [usize; 3],
    buffer: [Option<TripletPoint>; 6],
    buffer_pos: usize,
    done: bool,
}

impl<'m> TripletPointIter<'m> {
    fn fill_buffer(&mut self) -> Result<()> {
        let [i, j, k] = self.triple;
        let tp = triplet_events(self.mp, i, j, k)?;
        let tq = triplet_events(self.mq, i, j, k)?;
        for (slot, pat) in self.buffer.iter_mut().zip(Pattern::NON_UNANIMOUS) {
            *slot = Some(TripletPoint {
                triple: self.triple,
                pattern: pat,
                p: tp.cell(pat),
                q: tq.cell(pat),
            });
        }
        self.buffer_pos = 0;
        Ok(())
    }

    fn advance_triple(&mut self) {
        let h = self.mp.n_models();
        let [i, j, k] = &mut self.triple;
        *k += 1;
        if *k >= h {
            *j += 1;
            *k = *j + 1;
        }
        if *k >= h {
            *i += 1;
            *j = *i + 1;
            *k = *j + 1;
        }
        if *k >= h {
            self.done = true;
        }
    }
}

impl Iterator for TripletPointIter<'_> {
    type Item = TripletPoint;

    fn next(&mut self) -> Option<TripletPoint> {
        if self.buffer_pos >= 6 {
            self.advance_triple();
            if self.done {
                return None;
            }
            // Indices were validated at construction; per-triple recounting
            // cannot fail afterwards.
            self.fill_buffer().expect("validated matrices");
        }
        let point = self.buffer[self.buffer_pos].take();
        self.buffer_pos += 1;
        point
    }
}

fn check_aligned(mp: &CorrectnessMatrix, mq: &CorrectnessMatrix) -> Result<()> {
    if mp.model_names() != mq.model_names() {
        return Err(Error::InvalidInput(
            "matrices must be aligned on the same model list (see align_matrices)".into(),
        ));
    }
    if mp.n_models() < 3 {
        return Err(Error::InvalidInput(format!(
            "triplet events need at least 3 models, found {}",
            mp.n_models()
        )));
    }
    Ok(())
}

/// Streams the `6·C(h,3)` triplet points of two aligned matrices without
/// materializing them.
pub fn triplet_points<'m>(
    mp: &'m CorrectnessMatrix,
    mq: &'m CorrectnessMatrix,
) -> Result<TripletPointIter<'m>> {
    check_aligned(mp, mq)?;
    let mut iter = TripletPointIter {
        mp,
        mq,
        triple: [0, 1, 2],
        buffer: [None; 6],
        buffer_pos: 6,
        done: false,
    };
    iter.fill_buffer()?;
    iter.buffer_pos = 0;
    Ok(iter)
}

/// Materializes all triplet points, computing triples in parallel while
/// keeping the deterministic lexicographic order.
pub fn enumerate_triplet_points(
    mp: &CorrectnessMatrix,
    mq: &CorrectnessMatrix,
) -> Result<Vec<TripletPoint>> {
    use rayon::prelude::*;

    check_aligned(mp, mq)?;
    let h = mp.n_models();
    let mut triples = Vec::new();
    for i in 0..h {
        for j in i + 1..h {
            for k in j + 1..h {
                triples.push([i, j, k]);
            }
        }
    }
    let per_triple: Vec<[TripletPoint; 6]> = triples
        .par_iter()
        .map(|&[i, j, k]| {
            let tp = triplet_events(mp, i, j, k).expect("validated matrix");
            let tq = triplet_events(mq, i, j, k).expect("validated matrix");
            Pattern::NON_UNANIMOUS.map(|pat| TripletPoint {
                triple: [i, j, k],
                pattern: pat,
                p: tp.cell(pat),
                q: tq.cell(pat),
            })
        })
        .collect();
    Ok(per_triple.into_iter().flatten().collect())
}

/// Dominance probabilities for all `C(h,2)` pairs, oriented lower-accuracy
/// first (ties broken by model index), with summary statistics.
pub fn dominance_table(m: &CorrectnessMatrix) -> Result<DominanceReport> {
    let h = m.n_models();
    if h < 2 {
        return Err(Error::InvalidInput(format!(
            "dominance table needs at least 2 models, found {h}"
        )));
    }
    let accuracies = m.accuracies();
    let mut pairs = Vec::with_capacity(h * (h - 1) / 2);
    let mut zeta_max = 0.0f64;
    let mut below = 0usize;
    for i in 0..h {
        for j in i + 1..h {
            let (lo, hi) = if accuracies[i] <= accuracies[j] {
                (i, j)
            } else {
                (j, i)
            };
            let dominance = dominance_probability(m, lo, hi)?;
            let sim = similarity(m, lo, hi)?;
            zeta_max = zeta_max.max(dominance);
            if dominance < DOMINANCE_SUMMARY_THRESHOLD {
                below += 1;
            }
            pairs.push(DominancePair {
                lower: m.model_names()[lo].clone(),
                higher: m.model_names()[hi].clone(),
                mu_lower: accuracies[lo],
                mu_higher: accuracies[hi],
                gap: accuracies[hi] - accuracies[lo],
                dominance,
                similarity: sim,
            });
        }
    }
    let fraction_below_threshold = below as f64 / pairs.len() as f64;
    Ok(DominanceReport {
        pairs,
        zeta_max,
        fraction_below_threshold,
        threshold: DOMINANCE_SUMMARY_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[&[u8]]) -> CorrectnessMatrix {
        let names = (0..rows.len()).map(|i| format!("m{i}")).collect();
        let bitrows = rows
            .iter()
            .map(|r| BitRow::from_bits(r.iter().map(|&b| b == 1)))
            .collect();
        CorrectnessMatrix::from_rows("test", names, bitrows).unwrap()
    }

    #[test]
    fn dominance_hand_count() {
        let m = matrix(&[&[1, 1, 0, 0], &[0, 1, 1, 1]]);
        // Model 0 (accuracy 0.5) is correct where model 1 (0.75) is wrong only
        // on the first example.
        assert_eq!(dominance_probability(&m, 0, 1).unwrap(), 0.25);
        // Same result when the caller passes the pair reversed.
        assert_eq!(dominance_probability(&m, 1, 0).unwrap(), 0.25);
    }

    #[test]
    fn dominance_nested_and_self() {
        let m = matrix(&[&[1, 0, 0, 0], &[1, 1, 1, 0]]);
        assert_eq!(dominance_probability(&m, 0, 1).unwrap(), 0.0);
        assert_eq!(dominance_probability(&m, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn similarity_edges_and_identity() {
        let m = matrix(&[&[1, 1, 0, 0], &[0, 0, 1, 1], &[1, 1, 0, 1]]);
        assert_eq!(similarity(&m, 0, 0).unwrap(), 1.0);
        assert_eq!(similarity(&m, 0, 1).unwrap(), 0.0);
        // similarity + gap + 2·dominance = 1, from shared integer counts.
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let (lo, hi) = if m.accuracy(i).unwrap() <= m.accuracy(j).unwrap() {
                (i, j)
            } else {
                (j, i)
            };
            let gap = m.accuracy(hi).unwrap() - m.accuracy(lo).unwrap();
            let s = similarity(&m, lo, hi).unwrap();
            let d = dominance_probability(&m, lo, hi).unwrap();
            assert!((s + gap + 2.0 * d - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn triplet_events_each_cell_once() {
        // Eight examples hitting each joint pattern exactly once, in canonical
        // order: +++ ++- +-+ +-- -++ -+- --+ ---
        let m = matrix(&[
            &[1, 1, 1, 1, 0, 0, 0, 0],
            &[1, 1, 0, 0, 1, 1, 0, 0],
            &[1, 0, 1, 0, 1, 0, 1, 0],
        ]);
        let t = triplet_events(&m, 0, 1, 2).unwrap();
        for cell in t.cells() {
            assert_eq!(cell, 0.125);
        }
        assert_eq!(t.accuracies(), [0.5, 0.5, 0.5]);
    }

    #[test]
    fn triplet_events_ordered_and_identical() {
        let nested = matrix(&[&[1, 0, 0, 0], &[1, 1, 0, 0], &[1, 1, 1, 0]]);
        let t = triplet_events(&nested, 0, 1, 2).unwrap();
        assert!(t.is_ordered());
        assert_eq!(t.dominance_probabilities(), [0.0, 0.0, 0.0]);

        let same = matrix(&[&[1, 0, 1], &[1, 0, 1], &[1, 0, 1]]);
        let t = triplet_events(&same, 0, 1, 2).unwrap();
        assert!((t.p123() - 2.0 / 3.0).abs() < 1e-15);
        assert!((t.p_none() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.p12() + t.p13() + t.p23() + t.p1() + t.p2() + t.p3(), 0.0);
    }

    #[test]
    fn triplet_events_rejects_repeats() {
        let m = matrix(&[&[1], &[1], &[1]]);
        assert!(matches!(
            triplet_events(&m, 0, 0, 2),
            Err(Error::NonDistinctIndices)
        ));
    }

    #[test]
    fn pattern_codes_round_trip() {
        for pat in Pattern::NON_UNANIMOUS {
            assert_eq!(Pattern::from_code(&pat.code()).unwrap(), pat);
        }
        assert_eq!(Pattern::ALL_CORRECT.code(), "+++");
        assert_eq!(Pattern::NON_UNANIMOUS[0].code(), "++-");
        assert_eq!(Pattern::NON_UNANIMOUS[5].code(), "--+");
        assert!(Pattern::from_code("+-").is_err());
        assert!(Pattern::from_code("+-*").is_err());
    }

    #[test]
    fn point_stream_counts_and_order() {
        let m5 = matrix(&[
            &[1, 1, 1, 1],
            &[1, 1, 1, 0],
            &[1, 1, 0, 0],
            &[1, 0, 0, 0],
            &[0, 0, 0, 0],
        ]);
        let streamed: Vec<_> = triplet_points(&m5, &m5).unwrap().collect();
        assert_eq!(streamed.len(), 60); // 6·C(5,3)
        let materialized = enumerate_triplet_points(&m5, &m5).unwrap();
        assert_eq!(streamed, materialized);
        assert_eq!(streamed[0].triple, [0, 1, 2]);
        assert_eq!(streamed[0].pattern.code(), "++-");
        assert_eq!(streamed[59].triple, [2, 3, 4]);
        assert_eq!(streamed[59].pattern.code(), "--+");
        // Identical matrices put every point on the diagonal q = p.
        assert!(streamed.iter().all(|pt| pt.p == pt.q));
    }

    #[test]
    fn point_stream_needs_three_models() {
        let m = matrix(&[&[1, 0], &[0, 1]]);
        assert!(triplet_points(&m, &m).is_err());
    }

    #[test]
    fn dominance_table_summary() {
        let nested = matrix(&[&[1, 0, 0, 0], &[1, 1, 0, 0], &[1, 1, 1, 0]]);
        let report = dominance_table(&nested).unwrap();
        assert_eq!(report.pairs.len(), 3);
        assert_eq!(report.zeta_max, 0.0);
        assert_eq!(report.fraction_below_threshold, 1.0);

        // Two complementary models: dominance = min(μ_lo, 1 − μ_hi).
        let comp = matrix(&[&[1, 1, 0, 0], &[0, 0, 1, 1]]);
        let report = dominance_table(&comp).unwrap();
        assert_eq!(report.pairs.len(), 1);
        assert_eq!(report.pairs[0].dominance, 0.5);
        assert_eq!(report.zeta_max, 0.5);
        assert_eq!(report.fraction_below_threshold, 0.0);
    }

    #[test]
    fn from_counts_handles_rounding() {
        // 3 does not divide 2^k, so naive cell sums miss 1.0 by an ulp.
        let t = TripletDistribution::from_counts([1, 1, 1, 0, 0, 0, 0, 0]).unwrap();
        let sum: f64 = t.cells().iter().sum();
        assert_eq!(sum, 1.0);
    }
}
