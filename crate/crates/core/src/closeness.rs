//! Distributional-closeness wedges: fitting and checking.
//!
//! Two distributions are (δ₁, δ₂, ν₁, ν₂)-close over a family of events when
//! every event satisfies `-ν₁ + (1-δ₁)·P(A) ≤ Q(A) ≤ ν₂ + (1+δ₂)·P(A)`. The
//! region between the two affine bounds is the *wedge*. An optional second
//! segment swaps in a looser upper bound `(δ₂ʰ, ν₂ʰ)` for events with
//! `P(A) < t`, which captures distributions whose small-probability events
//! shift proportionally more.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::events::TripletPoint;

/// Looser upper bound applied only to events with `p < threshold`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SecondSegment {
    pub threshold: f64,
    pub delta2_hi: f64,
    pub nu2_hi: f64,
}

/// The (δ₁, δ₂, ν₁, ν₂) wedge, an optional second upper-bound segment, and
/// the fraction of events the wedge is required to cover.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosenessParams {
    pub delta1: f64,
    pub delta2: f64,
    pub nu1: f64,
    pub nu2: f64,
    /// Required fraction of events inside the wedge, in (0, 1]; 1 demands
    /// every event.
    pub coverage: f64,
    pub second_segment: Option<SecondSegment>,
}

impl ClosenessParams {
    pub fn new(delta1: f64, delta2: f64, nu1: f64, nu2: f64) -> Result<Self> {
        let params = ClosenessParams {
            delta1,
            delta2,
            nu1,
            nu2,
            coverage: 1.0,
            second_segment: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_coverage(mut self, coverage: f64) -> Result<Self> {
        self.coverage = coverage;
        self.validate()?;
        Ok(self)
    }

    pub fn with_second_segment(
        mut self,
        threshold: f64,
        delta2_hi: f64,
        nu2_hi: f64,
    ) -> Result<Self> {
        self.second_segment = Some(SecondSegment {
            threshold,
            delta2_hi,
            nu2_hi,
        });
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("nu1", self.nu1),
            ("nu2", self.nu2),
        ];
        for (name, v) in nonneg {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} must be a nonnegative finite number, found {v}"
                )));
            }
        }
        if !(self.coverage > 0.0 && self.coverage <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "coverage must lie in (0, 1], found {}",
                self.coverage
            )));
        }
        if let Some(seg) = &self.second_segment {
            if !seg.threshold.is_finite() || seg.threshold <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "second-segment threshold must be positive, found {}",
                    seg.threshold
                )));
            }
            if seg.delta2_hi < 0.0 || seg.nu2_hi < 0.0 {
                return Err(Error::InvalidInput(
                    "second-segment delta2/nu2 must be nonnegative".into(),
                ));
            }
        }
        Ok(())
    }

    /// Lower wedge boundary at event probability `p`.
    pub fn lower_bound(&self, p: f64) -> f64 {
        -self.nu1 + (1.0 - self.delta1) * p
    }

    /// Upper wedge boundary at event probability `p`, honoring the second
    /// segment when configured.
    pub fn upper_bound(&self, p: f64) -> f64 {
        if let Some(seg) = &self.second_segment {
            if p < seg.threshold {
                return seg.nu2_hi + (1.0 + seg.delta2_hi) * p;
            }
        }
        self.nu2 + (1.0 + self.delta2) * p
    }

    /// Whether a single `(p, q)` event lies inside the wedge (inclusive).
    pub fn satisfied(&self, p: f64, q: f64) -> bool {
        self.lower_bound(p) <= q && q <= self.upper_bound(p)
    }
}

/// Which wedge boundary an event escaped through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationSide {
    Below,
    Above,
}

/// One event outside the wedge.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub triple: [usize; 3],
    pub pattern: crate::events::Pattern,
    pub p: f64,
    pub q: f64,
    pub side: ViolationSide,
}

/// Outcome of checking a point set against a wedge.
#[derive(Clone, Debug, Serialize)]
pub struct ViolationReport {
    pub total: u64,
    pub violating: u64,
    pub violations: Vec<Violation>,
    /// Violation count per model; every violating event is attributed to all
    /// three models of its triple. Models with zero violations are listed too.
    pub per_model: BTreeMap<String, u64>,
    /// `1 - violating/total` (1.0 for an empty point set).
    pub coverage_achieved: f64,
    pub params: ClosenessParams,
}

/// Checks every point against the wedge and tallies violations per model.
/// `model_names` maps the indices carried by the points to names.
pub fn check_closeness<I>(
    points: I,
    model_names: &[String],
    params: &ClosenessParams,
) -> Result<ViolationReport>
where
    I: IntoIterator<Item = TripletPoint>,
{
    params.validate()?;
    let points: Vec<TripletPoint> = points.into_iter().collect();
    let violations: Vec<Violation> = points
        .par_iter()
        .filter_map(|pt| {
            let side = if pt.q < params.lower_bound(pt.p) {
                ViolationSide::Below
            } else if pt.q > params.upper_bound(pt.p) {
                ViolationSide::Above
            } else {
                return None;
            };
            Some(Violation {
                triple: pt.triple,
                pattern: pt.pattern,
                p: pt.p,
                q: pt.q,
                side,
            })
        })
        .collect();

    let mut per_model: BTreeMap<String, u64> =
        model_names.iter().map(|n| (n.clone(), 0)).collect();
    for v in &violations {
        for &idx in &v.triple {
            let name = model_names.get(idx).ok_or(Error::IndexOutOfRange {
                index: idx,
                len: model_names.len(),
            })?;
            *per_model.get_mut(name).expect("key present") += 1;
        }
    }

    let total = points.len() as u64;
    let violating = violations.len() as u64;
    let coverage_achieved = if total == 0 {
        1.0
    } else {
        1.0 - violating as f64 / total as f64
    };
    Ok(ViolationReport {
        total,
        violating,
        violations,
        per_model,
        coverage_achieved,
        params: params.clone(),
    })
}

/// The ν grid scanned when fitting each wedge side: 0, 0.001, …, 0.02.
pub const NU_GRID_STEP: f64 = 0.001;
pub const NU_GRID_MAX_INDEX: usize = 20;

fn nu_grid() -> impl Iterator<Item = f64> {
    (0..=NU_GRID_MAX_INDEX).map(|i| i as f64 * NU_GRID_STEP)
}

/// Smallest δ₂ ≥ 0 such that `q ≤ ν + (1 + δ₂)·p`; infinite when `p = 0` and
/// `q > ν` (no slope can compensate).
fn required_delta_upper(p: f64, q: f64, nu: f64) -> f64 {
    if q <= nu + p {
        0.0
    } else if p <= 0.0 {
        f64::INFINITY
    } else {
        (q - nu) / p - 1.0
    }
}

/// Smallest δ₁ ≥ 0 such that `q ≥ -ν + (1 - δ₁)·p`; always finite (≤ 1) for
/// nonnegative q and ν.
fn required_delta_lower(p: f64, q: f64, nu: f64) -> f64 {
    if p <= 0.0 || q + nu >= p {
        0.0
    } else {
        1.0 - (q + nu) / p
    }
}

/// δ required to make `rank_keep` of the points satisfy a side at the given
/// ν: the `rank_keep`-th smallest per-point requirement.
fn side_delta_at_rank(
    points: &[(f64, f64)],
    nu: f64,
    rank_keep: usize,
    required: fn(f64, f64, f64) -> f64,
) -> f64 {
    debug_assert!(rank_keep >= 1 && rank_keep <= points.len());
    let mut requirements: Vec<f64> = points.iter().map(|&(p, q)| required(p, q, nu)).collect();
    let (_, kth, _) = requirements.select_nth_unstable_by(rank_keep - 1, f64::total_cmp);
    *kth
}

/// Fits one side: scans the ν grid, computes the δ needed to cover
/// `rank_keep` points at each ν, and returns the lexicographically minimal
/// (δ, ν) — smallest δ first, ties broken by smaller ν.
fn fit_side(
    points: &[(f64, f64)],
    rank_keep: usize,
    required: fn(f64, f64, f64) -> f64,
) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for nu in nu_grid() {
        let delta = side_delta_at_rank(points, nu, rank_keep, required);
        if !delta.is_finite() {
            continue;
        }
        if best.is_none_or(|(bd, _)| delta < bd) {
            best = Some((delta, nu));
        }
    }
    best
}

/// Fits the smallest wedge (per side, lexicographically minimal (δ, ν) over
/// the ν grid) covering at least `coverage` of the points, then verifies the
/// two sides jointly and widens the per-side rank until the combined coverage
/// is reached.
///
/// Each side alone admitting `coverage` of the points does not guarantee the
/// same for both together (different points may fail different sides), hence
/// the verification loop.
pub fn fit_wedge<I>(points: I, coverage: f64) -> Result<ClosenessParams>
where
    I: IntoIterator<Item = TripletPoint>,
{
    if !(coverage > 0.0 && coverage <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "coverage must lie in (0, 1], found {coverage}"
        )));
    }
    let pts: Vec<TripletPoint> = points.into_iter().collect();
    if pts.is_empty() {
        return Err(Error::EmptyPointStream);
    }
    let pq: Vec<(f64, f64)> = pts.iter().map(|pt| (pt.p, pt.q)).collect();
    let n = pq.len();
    let mut rank = ((coverage * n as f64).ceil() as usize).clamp(1, n);

    loop {
        let upper = fit_side(&pq, rank, required_delta_upper).ok_or_else(|| {
            Error::DegenerateFit(
                "no wedge on the ν grid can cover the required fraction of zero-probability \
                 events"
                    .into(),
            )
        })?;
        let lower = fit_side(&pq, rank, required_delta_lower)
            .expect("lower-side requirements are always finite");

        let params = ClosenessParams {
            delta1: lower.0,
            delta2: upper.0,
            nu1: lower.1,
            nu2: upper.1,
            coverage,
            second_segment: None,
        };
        let satisfied = pq
            .iter()
            .filter(|&&(p, q)| params.satisfied(p, q))
            .count();
        if satisfied as f64 >= coverage * n as f64 || rank == n {
            if (satisfied as f64) < coverage * n as f64 {
                return Err(Error::DegenerateFit(
                    "fitted wedge cannot reach the requested coverage".into(),
                ));
            }
            return Ok(params);
        }
        rank += 1;
    }
}

/// Models whose violation count exceeds `threshold`, sorted by descending
/// count (ties by name).
pub fn outlier_models(report: &ViolationReport, threshold: u64) -> Vec<String> {
    let mut outliers: Vec<(&String, u64)> = report
        .per_model
        .iter()
        .filter(|(_, &count)| count > threshold)
        .map(|(name, &count)| (name, count))
        .collect();
    outliers.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    outliers.into_iter().map(|(name, _)| name.clone()).collect()
}
