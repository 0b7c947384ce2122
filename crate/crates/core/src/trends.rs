//! Trend fitting over accuracy pairs: a straight line in probability units,
//! a straight line in probit coordinates mapped back through Φ, and a
//! continuous two-segment (hinge) fit with the knot pinned at a chosen
//! model's first-domain accuracy.
//!
//! Every report carries per-model residuals in probability units, the
//! maximum absolute residual, and R²; the probit report additionally keeps
//! the probit-domain line and its own R², since goodness-of-fit in the two
//! domains need not agree.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corrdata::AccuracyPairSet;
use crate::error::{Error, Result};
use crate::probit::{clip_probability, inverse_normal_cdf, normal_cdf};

/// Which family a [`FitReport`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    Linear,
    Probit,
    Piecewise,
}

/// One affine piece `y = slope · x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub slope: f64,
    pub intercept: f64,
}

impl Segment {
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Where a piecewise fit switches segments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Knot {
    /// 1-based rank of the switch model among models sorted by ascending
    /// first-domain accuracy.
    pub switch_index: usize,
    /// First-domain accuracy at which the segments meet.
    pub mu_p: f64,
}

/// Probit-domain view of a probit fit: the line fitted to
/// `(Φ⁻¹(μᴾ), Φ⁻¹(μᵠ))` and its goodness of fit in those coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct ProbitStats {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub max_residual: f64,
    /// Number of models whose accuracies had to be clipped away from 0 or 1
    /// before inversion.
    pub clipped_points: usize,
}

/// Result of a trend fit. Residuals are in probability units, aligned with
/// `model_names` (ascending first-domain accuracy).
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub kind: FitKind,
    /// Affine pieces: one for linear fits, two (left, right) for piecewise
    /// fits, empty for probit fits whose curve lives in [`ProbitStats`].
    pub segments: Vec<Segment>,
    pub knot: Option<Knot>,
    /// Whether the pieces meet at the knot (always true for single-curve
    /// fits and the hinge fit; may be false for the free variant).
    pub continuous: bool,
    pub model_names: Vec<String>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub r_squared: f64,
    pub probit: Option<ProbitStats>,
}

impl FitReport {
    /// Evaluates the fitted curve at a first-domain accuracy `x` (clamped to
    /// [0, 1] for the probit family).
    pub fn predict(&self, x: f64) -> f64 {
        match self.kind {
            FitKind::Linear => self.segments[0].at(x),
            FitKind::Probit => {
                let stats = self
                    .probit
                    .as_ref()
                    .expect("probit reports always carry probit-domain stats");
                let (clipped, _) = clip_probability(x.clamp(0.0, 1.0));
                let z = inverse_normal_cdf(clipped)
                    .expect("clipped probabilities are always invertible");
                normal_cdf(stats.slope * z + stats.intercept)
            }
            FitKind::Piecewise => {
                let knot = self.knot.expect("piecewise reports always carry a knot");
                if x <= knot.mu_p {
                    self.segments[0].at(x)
                } else {
                    self.segments[1].at(x)
                }
            }
        }
    }
}

/// Goodness-of-fit table across the three families plus signed pairwise R²
/// differences (keys `linear_minus_probit`, `linear_minus_piecewise`,
/// `probit_minus_piecewise`).
#[derive(Debug, Clone, Serialize)]
pub struct FitComparison {
    pub rows: Vec<ComparisonRow>,
    pub r_squared_differences: BTreeMap<String, f64>,
    pub linear: FitReport,
    pub probit: FitReport,
    pub piecewise: FitReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub kind: FitKind,
    pub r_squared: f64,
    pub max_residual: f64,
}

struct OlsLine {
    slope: f64,
    intercept: f64,
}

/// Plain least-squares line through `(xs, ys)`.
fn ols(xs: &[f64], ys: &[f64]) -> Result<OlsLine> {
    if xs.len() < 2 {
        return Err(Error::DegenerateFit(
            "at least two points are required to fit a line".into(),
        ));
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateFit(
            "all abscissae are identical; the line is underdetermined".into(),
        ));
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    Ok(OlsLine {
        slope,
        intercept: mean_y - slope * mean_x,
    })
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// `R² = 1 − SS_res / SS_tot`; a constant target fitted exactly scores 1.
fn r_squared_of(ys: &[f64], residuals: &[f64]) -> f64 {
    let mean_y = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    if ss_tot == 0.0 {
        if ss_res <= f64::EPSILON {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    }
}

/// Least-squares line `μᵠ ≈ slope · μᴾ + intercept` in probability units.
pub fn ols_fit(pairs: &AccuracyPairSet) -> Result<FitReport> {
    let line = ols(pairs.mu_p(), pairs.mu_q())?;
    let segment = Segment {
        slope: line.slope,
        intercept: line.intercept,
    };
    let residuals: Vec<f64> = pairs.iter().map(|(_, x, y)| y - segment.at(x)).collect();
    Ok(FitReport {
        kind: FitKind::Linear,
        segments: vec![segment],
        knot: None,
        continuous: true,
        model_names: pairs.model_names().to_vec(),
        max_residual: max_abs(&residuals),
        r_squared: r_squared_of(pairs.mu_q(), &residuals),
        residuals,
        probit: None,
    })
}

/// Least-squares line in probit coordinates, reported both in that domain
/// and as probability-unit residuals of the mapped-back curve
/// `Φ(slope · Φ⁻¹(μᴾ) + intercept)`.
pub fn probit_fit(pairs: &AccuracyPairSet) -> Result<FitReport> {
    let mut clipped_points = 0usize;
    let mut zx = Vec::with_capacity(pairs.len());
    let mut zy = Vec::with_capacity(pairs.len());
    for (_, x, y) in pairs.iter() {
        let (cx, clip_x) = clip_probability(x);
        let (cy, clip_y) = clip_probability(y);
        if clip_x || clip_y {
            clipped_points += 1;
        }
        zx.push(inverse_normal_cdf(cx)?);
        zy.push(inverse_normal_cdf(cy)?);
    }
    let line = ols(&zx, &zy)?;
    let probit_residuals: Vec<f64> = zx
        .iter()
        .zip(&zy)
        .map(|(x, y)| y - (line.slope * x + line.intercept))
        .collect();
    let stats = ProbitStats {
        slope: line.slope,
        intercept: line.intercept,
        r_squared: r_squared_of(&zy, &probit_residuals),
        max_residual: max_abs(&probit_residuals),
        clipped_points,
    };
    let residuals: Vec<f64> = pairs
        .iter()
        .zip(&zx)
        .map(|((_, _, y), z)| y - normal_cdf(stats.slope * z + stats.intercept))
        .collect();
    Ok(FitReport {
        kind: FitKind::Probit,
        segments: Vec::new(),
        knot: None,
        continuous: true,
        model_names: pairs.model_names().to_vec(),
        max_residual: max_abs(&residuals),
        r_squared: r_squared_of(pairs.mu_q(), &residuals),
        residuals,
        probit: Some(stats),
    })
}

fn knot_at(pairs: &AccuracyPairSet, switch_index: usize) -> Result<Knot> {
    let h = pairs.len();
    if switch_index < 1 || switch_index >= h {
        return Err(Error::InvalidInput(format!(
            "switch index must lie in [1, {}], found {switch_index}",
            h.saturating_sub(1)
        )));
    }
    Ok(Knot {
        switch_index,
        mu_p: pairs.mu_p()[switch_index - 1],
    })
}

fn require_points_per_side(pairs: &AccuracyPairSet, t: f64) -> Result<()> {
    let left = pairs.mu_p().iter().filter(|&&x| x <= t).count();
    let right = pairs.mu_p().iter().filter(|&&x| x >= t).count();
    if left < 2 || right < 2 {
        return Err(Error::DegenerateFit(format!(
            "too few points on a side of the knot at {t}: {left} left, {right} right (need 2 each)"
        )));
    }
    Ok(())
}

/// Solves a 3×3 linear system given as rows `[m | rhs]` by Gaussian
/// elimination with partial pivoting; `None` when (numerically) singular.
fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        let pivot_row = m[col];
        for (row, values) in m.iter_mut().enumerate() {
            if row == col {
                continue;
            }
            // Columns before `col` are already zero in both rows, so the
            // full-row update only changes the active columns.
            let factor = values[col] / pivot_row[col];
            for (value, pivot_value) in values.iter_mut().zip(pivot_row) {
                *value -= factor * pivot_value;
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

fn piecewise_report(
    pairs: &AccuracyPairSet,
    knot: Knot,
    left: Segment,
    right: Segment,
    continuous: bool,
) -> FitReport {
    let residuals: Vec<f64> = pairs
        .iter()
        .map(|(_, x, y)| {
            let fitted = if x <= knot.mu_p {
                left.at(x)
            } else {
                right.at(x)
            };
            y - fitted
        })
        .collect();
    FitReport {
        kind: FitKind::Piecewise,
        segments: vec![left, right],
        knot: Some(knot),
        continuous,
        model_names: pairs.model_names().to_vec(),
        max_residual: max_abs(&residuals),
        r_squared: r_squared_of(pairs.mu_q(), &residuals),
        residuals,
        probit: None,
    }
}

/// Continuous two-segment least-squares fit with the knot at the
/// `switch_index`-th least accurate model's first-domain accuracy. The fit
/// is the hinge model `y = a + b·x + c·max(x − t, 0)`, so the segments meet
/// at the knot by construction.
pub fn piecewise_fit(pairs: &AccuracyPairSet, switch_index: usize) -> Result<FitReport> {
    let knot = knot_at(pairs, switch_index)?;
    let t = knot.mu_p;
    require_points_per_side(pairs, t)?;

    let (mut n, mut sx, mut sr, mut sxx, mut sxr, mut srr) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut sy, mut sxy, mut sry) = (0.0, 0.0, 0.0);
    for (_, x, y) in pairs.iter() {
        let r = (x - t).max(0.0);
        n += 1.0;
        sx += x;
        sr += r;
        sxx += x * x;
        sxr += x * r;
        srr += r * r;
        sy += y;
        sxy += x * y;
        sry += r * y;
    }
    let solution = solve3([
        [n, sx, sr, sy],
        [sx, sxx, sxr, sxy],
        [sr, sxr, srr, sry],
    ])
    .ok_or_else(|| {
        Error::DegenerateFit(
            "the hinge design is singular; the data cannot pin down two distinct segments".into(),
        )
    })?;
    let [a, b, c] = solution;
    let left = Segment {
        slope: b,
        intercept: a,
    };
    let right = Segment {
        slope: b + c,
        intercept: a - c * t,
    };
    Ok(piecewise_report(pairs, knot, left, right, true))
}

/// Free two-segment variant: independent least-squares lines on each side of
/// the knot (the knot model itself is used by both sides). The segments need
/// not meet; `continuous` records whether they happen to.
pub fn piecewise_fit_free(pairs: &AccuracyPairSet, switch_index: usize) -> Result<FitReport> {
    let knot = knot_at(pairs, switch_index)?;
    let t = knot.mu_p;
    require_points_per_side(pairs, t)?;

    let mut lx = Vec::new();
    let mut ly = Vec::new();
    let mut rx = Vec::new();
    let mut ry = Vec::new();
    for (_, x, y) in pairs.iter() {
        if x <= t {
            lx.push(x);
            ly.push(y);
        }
        if x >= t {
            rx.push(x);
            ry.push(y);
        }
    }
    let left_line = ols(&lx, &ly)?;
    let right_line = ols(&rx, &ry)?;
    let left = Segment {
        slope: left_line.slope,
        intercept: left_line.intercept,
    };
    let right = Segment {
        slope: right_line.slope,
        intercept: right_line.intercept,
    };
    let continuous = (left.at(t) - right.at(t)).abs() <= 1e-9;
    Ok(piecewise_report(pairs, knot, left, right, continuous))
}

/// Runs all three fits and tabulates their goodness of fit side by side.
pub fn compare_fits(pairs: &AccuracyPairSet, switch_index: usize) -> Result<FitComparison> {
    let linear = ols_fit(pairs)?;
    let probit = probit_fit(pairs)?;
    let piecewise = piecewise_fit(pairs, switch_index)?;
    let rows = vec![
        ComparisonRow {
            kind: FitKind::Linear,
            r_squared: linear.r_squared,
            max_residual: linear.max_residual,
        },
        ComparisonRow {
            kind: FitKind::Probit,
            r_squared: probit.r_squared,
            max_residual: probit.max_residual,
        },
        ComparisonRow {
            kind: FitKind::Piecewise,
            r_squared: piecewise.r_squared,
            max_residual: piecewise.max_residual,
        },
    ];
    let mut diffs = BTreeMap::new();
    diffs.insert(
        "linear_minus_probit".to_string(),
        linear.r_squared - probit.r_squared,
    );
    diffs.insert(
        "linear_minus_piecewise".to_string(),
        linear.r_squared - piecewise.r_squared,
    );
    diffs.insert(
        "probit_minus_piecewise".to_string(),
        probit.r_squared - piecewise.r_squared,
    );
    Ok(FitComparison {
        rows,
        r_squared_differences: diffs,
        linear,
        probit,
        piecewise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pair_set(points: &[(f64, f64)]) -> AccuracyPairSet {
        let names = (0..points.len()).map(|i| format!("m{i:03}")).collect();
        let mu_p = points.iter().map(|&(x, _)| x).collect();
        let mu_q = points.iter().map(|&(_, y)| y).collect();
        AccuracyPairSet::new(names, mu_p, mu_q).unwrap()
    }

    /// Deterministic pseudo-noise in [0, 1) for planted-data tests.
    fn noise_stream(mut state: u64) -> impl FnMut() -> f64 {
        move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn collinear_points_fit_exactly() {
        let pairs = pair_set(&[(0.2, 0.3), (0.4, 0.5), (0.6, 0.7), (0.8, 0.9)]);
        let report = ols_fit(&pairs).unwrap();
        assert_abs_diff_eq!(report.segments[0].slope, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.segments[0].intercept, 0.1, epsilon = 1e-12);
        assert!(report.max_residual <= 1e-12);
        assert_abs_diff_eq!(report.r_squared, 1.0, epsilon = 1e-12);

        let two = pair_set(&[(0.3, 0.8), (0.7, 0.4)]);
        let line = ols_fit(&two).unwrap();
        assert!(line.max_residual <= 1e-12);
        assert_abs_diff_eq!(line.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn recovers_planted_noisy_line() {
        let mut noise = noise_stream(17);
        let points: Vec<(f64, f64)> = (0..50)
            .map(|i| {
                let x = 0.3 + 0.65 * i as f64 / 49.0;
                let y = 0.9 * x - 0.05 + (noise() - 0.5) * 0.02;
                (x, y)
            })
            .collect();
        let report = ols_fit(&pair_set(&points)).unwrap();
        assert!(
            (report.segments[0].slope - 0.9).abs() <= 0.05,
            "slope {} drifted from 0.9",
            report.segments[0].slope
        );
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let same_x = pair_set(&[(0.5, 0.1), (0.5, 0.9), (0.5, 0.4)]);
        assert!(matches!(
            ols_fit(&same_x),
            Err(Error::DegenerateFit(_))
        ));
        let single = pair_set(&[(0.5, 0.5)]);
        assert!(ols_fit(&single).is_err());
    }

    #[test]
    fn residuals_sum_to_zero_with_intercept() {
        let mut noise = noise_stream(99);
        let points: Vec<(f64, f64)> = (0..30)
            .map(|i| {
                let x = 0.1 + 0.8 * i as f64 / 29.0;
                (x, 0.6 * x + 0.2 + (noise() - 0.5) * 0.05)
            })
            .collect();
        let pairs = pair_set(&points);
        let linear_sum: f64 = ols_fit(&pairs).unwrap().residuals.iter().sum();
        assert!(linear_sum.abs() <= 1e-10, "linear residual sum {linear_sum}");
        let hinge_sum: f64 = piecewise_fit(&pairs, 10).unwrap().residuals.iter().sum();
        assert!(hinge_sum.abs() <= 1e-10, "hinge residual sum {hinge_sum}");
    }

    #[test]
    fn probit_identity_maps_to_identity() {
        let points: Vec<(f64, f64)> = (1..=20).map(|i| (i as f64 / 21.0, i as f64 / 21.0)).collect();
        let report = probit_fit(&pair_set(&points)).unwrap();
        let stats = report.probit.as_ref().unwrap();
        assert_abs_diff_eq!(stats.slope, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(stats.intercept, 0.0, epsilon = 1e-9);
        assert!(report.max_residual <= 1e-9);
        assert_eq!(stats.clipped_points, 0);
        for (x, want) in [(0.25, 0.25), (0.7, 0.7)] {
            assert_abs_diff_eq!(report.predict(x), want, epsilon = 1e-9);
        }
    }

    #[test]
    fn probit_planted_model_is_recovered() {
        let points: Vec<(f64, f64)> = (0..50)
            .map(|i| {
                let x = 0.30 + 0.68 * i as f64 / 49.0;
                let z = inverse_normal_cdf(x).unwrap();
                (x, normal_cdf(0.9 * z - 0.3))
            })
            .collect();
        let report = probit_fit(&pair_set(&points)).unwrap();
        let stats = report.probit.as_ref().unwrap();
        assert_abs_diff_eq!(stats.slope, 0.9, epsilon = 1e-6);
        assert_abs_diff_eq!(stats.intercept, -0.3, epsilon = 1e-6);
        assert!(
            report.max_residual <= 1e-7,
            "probability-domain residual {} too large",
            report.max_residual
        );
    }

    #[test]
    fn exact_hinge_is_recovered() {
        // Hinge with knot at the 5th point of 12: slopes 0.4 then 1.2.
        let t = 0.1 + 0.05 * 4.0;
        let points: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let x = 0.1 + 0.05 * i as f64;
                (x, 0.2 + 0.4 * x + 0.8 * (x - t).max(0.0))
            })
            .collect();
        let report = piecewise_fit(&pair_set(&points), 5).unwrap();
        assert!(report.max_residual <= 1e-10);
        assert_abs_diff_eq!(report.segments[0].slope, 0.4, epsilon = 1e-8);
        assert_abs_diff_eq!(report.segments[1].slope, 1.2, epsilon = 1e-8);
        let knot = report.knot.unwrap();
        assert_eq!(knot.switch_index, 5);
        assert_abs_diff_eq!(knot.mu_p, t, epsilon = 1e-12);
        // Segments meet at the knot.
        assert_abs_diff_eq!(
            report.segments[0].at(t),
            report.segments[1].at(t),
            epsilon = 1e-10
        );
    }

    #[test]
    fn collinear_data_collapses_hinge_to_single_line() {
        let points: Vec<(f64, f64)> = (0..10)
            .map(|i| {
                let x = 0.2 + 0.06 * i as f64;
                (x, 0.5 * x + 0.1)
            })
            .collect();
        let pairs = pair_set(&points);
        let hinge = piecewise_fit(&pairs, 4).unwrap();
        let line = ols_fit(&pairs).unwrap();
        for segment in &hinge.segments {
            assert_abs_diff_eq!(segment.slope, line.segments[0].slope, epsilon = 1e-8);
            assert_abs_diff_eq!(segment.intercept, line.segments[0].intercept, epsilon = 1e-8);
        }
        assert_abs_diff_eq!(hinge.r_squared, line.r_squared, epsilon = 1e-10);
    }

    #[test]
    fn noisy_planted_hinge_is_recovered() {
        let mut noise = noise_stream(4242);
        let t = 0.30 + 0.01 * 5.0; // knot at the 6th of 66 points
        let points: Vec<(f64, f64)> = (0..66)
            .map(|i| {
                let x = 0.30 + 0.01 * i as f64;
                let y = 0.1 + 0.5 * x + 0.6 * (x - t).max(0.0) + (noise() - 0.5) * 0.01;
                (x, y)
            })
            .collect();
        let report = piecewise_fit(&pair_set(&points), 6).unwrap();
        assert!(
            (report.segments[0].slope - 0.5).abs() <= 0.05,
            "left slope {}",
            report.segments[0].slope
        );
        assert!(
            (report.segments[1].slope - 1.1).abs() <= 0.05,
            "right slope {}",
            report.segments[1].slope
        );
    }

    #[test]
    fn switch_index_bounds_are_enforced() {
        let points: Vec<(f64, f64)> = (0..6).map(|i| (0.1 * (i + 1) as f64, 0.5)).collect();
        let pairs = pair_set(&points);
        assert!(matches!(
            piecewise_fit(&pairs, 0),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            piecewise_fit(&pairs, 6),
            Err(Error::InvalidInput(_))
        ));
        // Rank 1 leaves a single point on the left: rejected.
        assert!(matches!(
            piecewise_fit(&pairs, 1),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn free_variant_tracks_discontinuous_data() {
        // Two parallel shelves with a jump: a hinge cannot follow, two free
        // segments can.
        let points: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let x = 0.1 + 0.05 * i as f64;
                let y = if i < 6 { 0.3 } else { 0.8 };
                (x, y)
            })
            .collect();
        let pairs = pair_set(&points);
        let free = piecewise_fit_free(&pairs, 6).unwrap();
        let hinge = piecewise_fit(&pairs, 6).unwrap();
        assert!(free.r_squared >= hinge.r_squared - 1e-12);
        assert!(!free.continuous);

        // On exact hinge data the free variant is continuous.
        let t = 0.1 + 0.05 * 5.0;
        let hinge_points: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let x = 0.1 + 0.05 * i as f64;
                (x, 0.2 + 0.4 * x + 0.8 * (x - t).max(0.0))
            })
            .collect();
        let exact = piecewise_fit_free(&pair_set(&hinge_points), 6).unwrap();
        assert!(exact.continuous);
    }

    #[test]
    fn comparison_orders_model_matched_fits_first() {
        // Probit-planted data: probit R² should beat the straight line.
        let probit_points: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let x = 0.05 + 0.9 * i as f64 / 39.0;
                let z = inverse_normal_cdf(x).unwrap();
                (x, normal_cdf(1.3 * z - 0.4))
            })
            .collect();
        let cmp = compare_fits(&pair_set(&probit_points), 10).unwrap();
        assert!(cmp.probit.r_squared >= cmp.linear.r_squared);
        assert_abs_diff_eq!(
            cmp.r_squared_differences["linear_minus_probit"],
            cmp.linear.r_squared - cmp.probit.r_squared,
            epsilon = 1e-15
        );

        // Hinge-planted data: piecewise R² should beat the straight line.
        let t = 0.3 + 0.02 * 7.0;
        let hinge_points: Vec<(f64, f64)> = (0..25)
            .map(|i| {
                let x = 0.3 + 0.02 * i as f64;
                (x, 0.1 + 0.3 * x + 1.0 * (x - t).max(0.0))
            })
            .collect();
        let cmp = compare_fits(&pair_set(&hinge_points), 8).unwrap();
        assert!(cmp.piecewise.r_squared >= cmp.linear.r_squared);
        assert_eq!(cmp.rows.len(), 3);

        // Identity data is collinear in both probability and probit
        // coordinates, so every family scores R² = 1.
        let collinear: Vec<(f64, f64)> = (0..10)
            .map(|i| {
                let x = 0.2 + 0.05 * i as f64;
                (x, x)
            })
            .collect();
        let cmp = compare_fits(&pair_set(&collinear), 5).unwrap();
        for row in &cmp.rows {
            assert_abs_diff_eq!(row.r_squared, 1.0, epsilon = 1e-9);
        }

        // A non-identity probability-space line is NOT collinear in probit
        // coordinates, so the probit row may lag the other two slightly.
        let tilted: Vec<(f64, f64)> = (0..10)
            .map(|i| {
                let x = 0.2 + 0.05 * i as f64;
                (x, 0.8 * x + 0.05)
            })
            .collect();
        let cmp = compare_fits(&pair_set(&tilted), 5).unwrap();
        assert_abs_diff_eq!(cmp.linear.r_squared, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(cmp.piecewise.r_squared, 1.0, epsilon = 1e-9);
        assert!(cmp.probit.r_squared > 0.99);
    }
}
