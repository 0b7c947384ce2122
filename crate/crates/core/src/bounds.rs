//! Analytic residual machinery: exact residuals from accuracy pairs or
//! triplet distributions, closed-form residual bounds for wedge-close
//! distributions, and feasible-band / lower-bound-curve generation.
//!
//! Throughout, a model's point is its accuracy pair (μᴾ, μᵠ) and residuals
//! are measured vertically (along the μᵠ axis) from a reference line drawn
//! through two other models' points.

use serde::Serialize;

use crate::closeness::ClosenessParams;
use crate::error::{Error, Result};
use crate::events::TripletDistribution;
use crate::gridbound::{self, GridSearchConfig};

/// A line `y = slope·x + intercept` in accuracy-pair space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Line through two points with distinct x coordinates.
pub fn line_through(a: (f64, f64), b: (f64, f64)) -> Result<Line> {
    if a.0 == b.0 {
        return Err(Error::DegenerateLine);
    }
    let slope = (b.1 - a.1) / (b.0 - a.0);
    Ok(Line {
        slope,
        intercept: a.1 - slope * a.0,
    })
}

/// The line through the midpoints of segments AB and BC for points ordered by
/// x. Every one of the three points has residual exactly half its residual
/// from the A–C chord, which is how a bound on the chord residual turns into
/// a bound half as large for a better-placed line.
pub fn halved_line(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Result<Line> {
    let m1 = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
    let m2 = ((b.0 + c.0) / 2.0, (b.1 + c.1) / 2.0);
    line_through(m1, m2)
}

/// Residual bound for the middle of three models, computed from their
/// source-distribution accuracies and a closeness wedge.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    /// The accuracy triple (μᵢ, μⱼ, μₖ) the bound was computed for.
    pub mu: [f64; 3],
    /// Bound on the residual of the middle model from the chord through the
    /// outer two points.
    pub bound_value: f64,
    /// Residual guarantee for the shifted line through the segment midpoints:
    /// exactly half of `bound_value`.
    pub halved_value: f64,
    /// The chord through the outer points, when their μᵠ values are known.
    pub line: Option<Line>,
}

/// Vertical residual of the middle point from the chord through the outer
/// points. Points are (μᴾ, μᵠ) pairs ordered `lo.0 ≤ mid.0 ≤ hi.0`.
pub fn residual_from_accuracies(lo: (f64, f64), mid: (f64, f64), hi: (f64, f64)) -> Result<f64> {
    if !(lo.0 <= mid.0 && mid.0 <= hi.0) {
        return Err(Error::InvalidInput(format!(
            "accuracies must be ordered: {} ≤ {} ≤ {} fails",
            lo.0, mid.0, hi.0
        )));
    }
    let line = line_through(lo, hi)?;
    Ok((line.at(mid.0) - mid.1).abs())
}

/// The same residual computed directly from the joint triplet cells of the
/// two distributions:
///
/// ```text
/// r = | (q̄₃+q̄₂₃−q̄₁−q̄₁₂)/(p₃+p₂₃−p₁−p₁₂) · (p₂+p₂₃−p₁−p₁₃) + q̄₁+q̄₁₃−q̄₂−q̄₂₃ |
/// ```
///
/// The denominator equals μ₃−μ₁ and the multiplied gap equals μ₂−μ₁, so this
/// agrees with `residual_from_accuracies` on the implied accuracy pairs.
pub fn residual_from_triplets(p: &TripletDistribution, q: &TripletDistribution) -> Result<f64> {
    let denom = p.p3() + p.p23() - p.p1() - p.p12();
    if denom == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let slope = (q.p3() + q.p23() - q.p1() - q.p12()) / denom;
    let mid_gap = p.p2() + p.p23() - p.p1() - p.p13();
    Ok((slope * mid_gap + q.p1() + q.p13() - q.p2() - q.p23()).abs())
}

fn require_segmentless(params: &ClosenessParams, what: &str) -> Result<()> {
    params.validate()?;
    if params.second_segment.is_some() {
        return Err(Error::InvalidInput(format!(
            "{what} requires a single-segment wedge; two-segment params are only supported by \
             the grid search"
        )));
    }
    Ok(())
}

/// Closed-form residual bound for the middle of three models whose
/// distributions are wedge-close and whose correct sets are nested:
///
/// ```text
/// (δ₁+δ₂)/2 · 2(μₖ−μⱼ)(μⱼ−μᵢ)/(μₖ−μᵢ) + max{ν₁,ν₂} + (1 + max{μₖ−μⱼ, μⱼ−μᵢ}/(μₖ−μᵢ))·ν₂
/// ```
pub fn prop1_bound(
    mu_i: f64,
    mu_j: f64,
    mu_k: f64,
    params: &ClosenessParams,
) -> Result<BoundReport> {
    require_segmentless(params, "the analytic residual bound")?;
    if !(mu_i <= mu_j && mu_j <= mu_k) {
        return Err(Error::InvalidInput(format!(
            "accuracies must be ordered: {mu_i} ≤ {mu_j} ≤ {mu_k} fails"
        )));
    }
    if mu_i == mu_k {
        return Err(Error::DegenerateLine);
    }
    let gap_ij = mu_j - mu_i;
    let gap_jk = mu_k - mu_j;
    let outer = mu_k - mu_i;
    let harmonic = 2.0 * gap_jk * gap_ij / outer;
    let bound = (params.delta1 + params.delta2) / 2.0 * harmonic
        + params.nu1.max(params.nu2)
        + (1.0 + gap_ij.max(gap_jk) / outer) * params.nu2;
    Ok(BoundReport {
        mu: [mu_i, mu_j, mu_k],
        bound_value: bound,
        halved_value: bound / 2.0,
        line: None,
    })
}

/// Residual bound independent of where the middle model sits:
/// `(25/64)(μ_max − μ_min)(δ₁+δ₂)/2 + 3·max{ν₁, ν₂}`.
pub fn corollary_bound(mu_min: f64, mu_max: f64, params: &ClosenessParams) -> Result<f64> {
    require_segmentless(params, "the range residual bound")?;
    if mu_min > mu_max {
        return Err(Error::InvalidInput(format!(
            "accuracy range inverted: {mu_min} > {mu_max}"
        )));
    }
    Ok(25.0 / 64.0 * (mu_max - mu_min) * (params.delta1 + params.delta2) / 2.0
        + 3.0 * params.nu1.max(params.nu2))
}

/// One feasible-band sample: the interval of μᵠ values consistent with the
/// anchors at a given μᴾ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BandPoint {
    pub mu_p: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Half-width provider for one bracketing anchor pair, so bands can switch
/// between the analytic bound (nested correct sets) and the grid search
/// (dominance budget ζ > 0).
struct WidthContext<'p> {
    params: &'p ClosenessParams,
    zeta: f64,
    cache: std::collections::BTreeMap<[i64; 3], f64>,
    step: f64,
}

impl<'p> WidthContext<'p> {
    fn new(params: &'p ClosenessParams, zeta: f64) -> Self {
        WidthContext {
            params,
            zeta,
            cache: std::collections::BTreeMap::new(),
            step: gridbound::DEFAULT_P_GRID_STEP,
        }
    }

    fn analytic(&self, lo: f64, mid: f64, hi: f64) -> Result<f64> {
        Ok(prop1_bound(lo, mid, hi, self.params)?.bound_value)
    }

    fn width(&mut self, lo: f64, mid: f64, hi: f64) -> Result<f64> {
        if self.zeta == 0.0 {
            return self.analytic(lo, mid, hi);
        }
        // Identical subproblems recur across grid points; round the triple to
        // the search grid and cache one solve per rounded key.
        let key = [lo, mid, hi].map(|m| (m / self.step).round() as i64);
        if let Some(&w) = self.cache.get(&key) {
            return Ok(w);
        }
        let [rlo, rmid0, rhi] = key.map(|k| (k as f64 * self.step).clamp(0.0, 1.0));
        let rmid = rmid0.clamp(rlo, rhi);
        let w = if rhi > rlo {
            let cfg = GridSearchConfig::new(self.zeta, [rlo, rmid, rhi], self.params.clone())?;
            gridbound::max_residual_grid(&cfg)?.max_value
        } else {
            // The pair collapsed onto one grid cell; fall back to the
            // analytic width of the unrounded triple.
            self.analytic(lo, mid, hi)?
        };
        self.cache.insert(key, w);
        Ok(w)
    }
}

/// For each grid μᴾ, the interval of μᵠ values a model at that accuracy could
/// take while every anchor pair bracketing it keeps its residual within the
/// bound. Anchors are measured (μᴾ, μᵠ) pairs; a grid point equal to an
/// anchor's μᴾ collapses to that anchor's μᵠ. With more anchors the
/// constraints intersect, so bands only shrink.
pub fn feasible_band(
    anchors: &[(f64, f64)],
    params: &ClosenessParams,
    zeta: f64,
    grid: &[f64],
) -> Result<Vec<BandPoint>> {
    require_segmentless(params, "band generation")?;
    if zeta < 0.0 {
        return Err(Error::InvalidInput(format!("zeta must be ≥ 0, found {zeta}")));
    }
    if anchors.len() < 2 {
        return Err(Error::InvalidInput(
            "band generation needs at least 2 anchors".into(),
        ));
    }
    let mut anchors: Vec<(f64, f64)> = anchors.to_vec();
    anchors.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let (min_mu, max_mu) = (anchors[0].0, anchors[anchors.len() - 1].0);
    if let Some(&mu) = grid.iter().find(|&&mu| mu < min_mu || mu > max_mu) {
        return Err(Error::InvalidInput(format!(
            "grid point {mu} lies outside the anchor hull [{min_mu}, {max_mu}]"
        )));
    }

    let mut ctx = WidthContext::new(params, zeta);
    let mut band = Vec::with_capacity(grid.len());
    for &mu in grid {
        if let Some(anchor) = anchors.iter().find(|a| a.0 == mu) {
            band.push(BandPoint {
                mu_p: mu,
                lower: anchor.1,
                upper: anchor.1,
            });
            continue;
        }
        let mut lower = 0.0f64;
        let mut upper = 1.0f64;
        for (ai, a) in anchors.iter().enumerate() {
            for b in anchors.iter().skip(ai + 1) {
                if !(a.0 <= mu && mu <= b.0) || a.0 == b.0 {
                    continue;
                }
                let chord = line_through(*a, *b)?.at(mu);
                let w = ctx.width(a.0, mu, b.0)?;
                lower = lower.max(chord - w);
                upper = upper.min(chord + w);
            }
        }
        band.push(BandPoint {
            mu_p: mu,
            lower: lower.clamp(0.0, 1.0),
            upper: upper.clamp(0.0, 1.0),
        });
    }
    Ok(band)
}

/// The lower envelope of `feasible_band`: the guaranteed-minimum μᵠ at each
/// grid accuracy.
pub fn lower_bound_curve(
    anchors: &[(f64, f64)],
    params: &ClosenessParams,
    zeta: f64,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    Ok(feasible_band(anchors, params, zeta, grid)?
        .into_iter()
        .map(|bp| (bp.mu_p, bp.lower))
        .collect())
}
