//! Numerical maximization of the middle-model residual over all triplet
//! distributions compatible with a dominance budget ζ and a closeness wedge.
//!
//! The search grids the source-distribution cells (p₁, p₁₂, p₁₃, p₂); the
//! equality constraints fixing the three accuracies then determine p₂₃ and
//! p₃ exactly, and p₁₂₃ absorbs the rest of μ₁. For each feasible source
//! point the shifted-distribution cells are maximized exactly: the residual
//! is affine in the six q cells with constant coefficients, so per-cell
//! interval endpoints plus a greedy allocation of the remaining probability
//! budget dominate any equally spaced q grid.

use rayon::prelude::*;
use serde::Serialize;

use crate::closeness::ClosenessParams;
use crate::error::{Error, Result};
use crate::events::TripletDistribution;

pub const DEFAULT_P_GRID_STEP: f64 = 0.05;
pub const DEFAULT_Q_GRID_POINTS: usize = 5;

/// Configuration of one residual-maximization run.
#[derive(Clone, Debug, Serialize)]
pub struct GridSearchConfig {
    /// Dominance budget: p₁+p₁₂, p₁+p₁₃, and p₂+p₁₂ may not exceed ζ.
    pub zeta: f64,
    /// Target accuracies (μ₁, μ₂, μ₃), nondecreasing with μ₁ < μ₃.
    pub mu: [f64; 3],
    pub params: ClosenessParams,
    /// Spacing of the source-cell grid.
    pub p_grid_step: f64,
    /// Requested density of the shifted-cell grid. The exact interval
    /// maximization used here dominates any equally spaced grid, so this
    /// knob is validated and reported but does not change the result.
    pub q_grid_points: usize,
}

impl GridSearchConfig {
    pub fn new(zeta: f64, mu: [f64; 3], params: ClosenessParams) -> Result<Self> {
        let cfg = GridSearchConfig {
            zeta,
            mu,
            params,
            p_grid_step: DEFAULT_P_GRID_STEP,
            q_grid_points: DEFAULT_Q_GRID_POINTS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_p_grid_step(mut self, step: f64) -> Result<Self> {
        self.p_grid_step = step;
        self.validate()?;
        Ok(self)
    }

    pub fn with_q_grid_points(mut self, points: usize) -> Result<Self> {
        self.q_grid_points = points;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !self.zeta.is_finite() || self.zeta < 0.0 {
            return Err(Error::InvalidInput(format!(
                "zeta must be ≥ 0, found {}",
                self.zeta
            )));
        }
        if self.mu.iter().any(|m| !(0.0..=1.0).contains(m)) {
            return Err(Error::InvalidInput(format!(
                "accuracies must lie in [0, 1], found {:?}",
                self.mu
            )));
        }
        if !(self.mu[0] <= self.mu[1] && self.mu[1] <= self.mu[2]) {
            return Err(Error::InvalidInput(format!(
                "accuracies must be nondecreasing, found {:?}",
                self.mu
            )));
        }
        if self.mu[0] == self.mu[2] {
            return Err(Error::ZeroDenominator);
        }
        if self.params.delta1 >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "delta1 must be < 1 for the lower wedge boundary to constrain anything, found {}",
                self.params.delta1
            )));
        }
        if !(self.p_grid_step > 0.0 && self.p_grid_step <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "p_grid_step must lie in (0, 1], found {}",
                self.p_grid_step
            )));
        }
        if self.q_grid_points < 2 {
            return Err(Error::InvalidInput(format!(
                "q_grid_points must be ≥ 2, found {}",
                self.q_grid_points
            )));
        }
        Ok(())
    }
}

/// Result of a residual maximization.
#[derive(Clone, Debug, Serialize)]
pub struct GridSearchOutcome {
    /// Largest residual found on the grid (a lower estimate of the true
    /// supremum).
    pub max_value: f64,
    /// `max_value` plus a conservative first-order slack covering source
    /// points between grid nodes: step × a bound on the residual's gradient.
    pub certified_upper: f64,
    pub witness_p: TripletDistribution,
    pub witness_q: TripletDistribution,
    /// Number of feasible source-distribution grid points evaluated.
    pub evaluated_p_points: u64,
}

/// Non-unanimous cells in canonical order `[p12, p13, p1, p23, p2, p3]`.
type Cells6 = [f64; 6];

const IDX_P12: usize = 0;
const IDX_P13: usize = 1;
const IDX_P1: usize = 2;
const IDX_P23: usize = 3;
const IDX_P2: usize = 4;
const IDX_P3: usize = 5;

/// Residual coefficients per q cell, in the order of [`Cells6`]. `w` is the
/// accuracy-gap ratio (μ₂−μ₁)/(μ₃−μ₁).
fn residual_coefficients(w: f64) -> Cells6 {
    let mut c = [0.0; 6];
    c[IDX_P12] = -w;
    c[IDX_P13] = 1.0;
    c[IDX_P1] = 1.0 - w;
    c[IDX_P23] = w - 1.0;
    c[IDX_P2] = -1.0;
    c[IDX_P3] = w;
    c
}

const FEASIBILITY_EPS: f64 = 1e-9;

fn grid_count(limit: f64, step: f64) -> i64 {
    if limit < -FEASIBILITY_EPS {
        -1
    } else {
        ((limit / step) + FEASIBILITY_EPS).floor() as i64
    }
}

fn clamp_cell(v: f64) -> Option<f64> {
    if v < -FEASIBILITY_EPS {
        None
    } else {
        Some(v.max(0.0))
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    value: f64,
    p: Cells6,
    q: Cells6,
    p123: f64,
    p_none: f64,
}

fn lex_less(a: &Cells6, b: &Cells6) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// Deterministic winner: larger value; ties resolved toward the
/// lexicographically smaller (p, q) cell tuple so the outcome is independent
/// of how work was partitioned.
fn better(a: Candidate, b: Candidate) -> Candidate {
    match a.value.total_cmp(&b.value) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => match lex_less(&a.p, &b.p).then_with(|| lex_less(&a.q, &b.q))
        {
            std::cmp::Ordering::Greater => b,
            _ => a,
        },
    }
}

/// Maximizes `Σ coef·q` over box `[lo, hi]` per cell subject to `Σq ≤ 1`:
/// start each cell at its lower endpoint and spend the remaining probability
/// budget on cells in decreasing coefficient order.
fn maximize_direction(
    coefs: &Cells6,
    order: &[usize; 6],
    lo: &Cells6,
    hi: &Cells6,
) -> (f64, Cells6) {
    let mut q = *lo;
    let mut value: f64 = coefs.iter().zip(lo).map(|(c, l)| c * l).sum();
    let mut budget = 1.0 - lo.iter().sum::<f64>();
    if budget < 0.0 {
        budget = 0.0;
    }
    for &idx in order {
        if coefs[idx] <= 0.0 || budget <= 0.0 {
            break;
        }
        let take = (hi[idx] - lo[idx]).min(budget);
        q[idx] += take;
        value += coefs[idx] * take;
        budget -= take;
    }
    (value, q)
}

struct SearchContext {
    coefs_pos: Cells6,
    coefs_neg: Cells6,
    order_pos: [usize; 6],
    order_neg: [usize; 6],
    params: ClosenessParams,
}

impl SearchContext {
    fn new(mu: &[f64; 3], params: &ClosenessParams) -> Self {
        let w = (mu[1] - mu[0]) / (mu[2] - mu[0]);
        let coefs_pos = residual_coefficients(w);
        let coefs_neg = coefs_pos.map(|c| -c);
        let order_for = |coefs: &Cells6| {
            let mut order = [0, 1, 2, 3, 4, 5];
            order.sort_by(|&a, &b| coefs[b].total_cmp(&coefs[a]).then(a.cmp(&b)));
            order
        };
        SearchContext {
            order_pos: order_for(&coefs_pos),
            order_neg: order_for(&coefs_neg),
            coefs_pos,
            coefs_neg,
            params: params.clone(),
        }
    }

    /// Best |residual| over admissible q for a fixed source point.
    fn eval(&self, p: &Cells6) -> (f64, Cells6) {
        let mut lo = [0.0; 6];
        let mut hi = [0.0; 6];
        for i in 0..6 {
            lo[i] = self.params.lower_bound(p[i]).max(0.0);
            hi[i] = self.params.upper_bound(p[i]).min(1.0);
        }
        let (v_pos, q_pos) = maximize_direction(&self.coefs_pos, &self.order_pos, &lo, &hi);
        let (v_neg, q_neg) = maximize_direction(&self.coefs_neg, &self.order_neg, &lo, &hi);
        if v_pos.total_cmp(&v_neg).is_ge() {
            (v_pos, q_pos)
        } else {
            (v_neg, q_neg)
        }
    }
}

// `let ... else` keeps the nested feasibility checks flat.
macro_rules! feasible {
    ($cells:expr) => {
        match clamp_cell($cells) {
            Some(v) => v,
            None => continue,
        }
    };
}

/// Enumerates feasible source points for one fixed (p₁, p₁₂) pair and folds
/// the best candidate. Returns `(best, evaluated)`.
fn search_slice(
    cfg: &GridSearchConfig,
    ctx: &SearchContext,
    p1: f64,
    p12: f64,
) -> (Option<Candidate>, u64) {
    let step = cfg.p_grid_step;
    let [mu1, mu2, mu3] = cfg.mu;
    let mut best: Option<Candidate> = None;
    let mut evaluated = 0u64;

    let p13_max = (cfg.zeta - p1).min(mu1 - p1 - p12);
    for i13 in 0..=grid_count(p13_max, step) {
        let p13 = i13 as f64 * step;
        // p₂ range: p₂₃ ≥ 0 caps it above, p₃ ≥ 0 bounds it below, the
        // dominance budget and the all-wrong cell cap it above too.
        let p2_max = (cfg.zeta - p12)
            .min(1.0 - mu3 - p1 - p12)
            .min(mu2 - mu1 + p1 + p13);
        let p2_min_val = (p13 - p12 - (mu3 - mu2)).max(0.0);
        let i2_min = ((p2_min_val / step) - FEASIBILITY_EPS).ceil().max(0.0) as i64;
        for i2 in i2_min..=grid_count(p2_max, step) {
            let p2 = i2 as f64 * step;
            let p23 = feasible!((mu2 - mu1) + p1 + p13 - p2);
            let p3 = feasible!((mu3 - mu2) + p2 + p12 - p13);
            let p123 = feasible!(mu1 - p1 - p12 - p13);
            let sum7 = p123 + p12 + p13 + p1 + p23 + p2 + p3;
            let p_none = feasible!(1.0 - sum7);

            let p_cells: Cells6 = [p12, p13, p1, p23, p2, p3];
            evaluated += 1;
            let (value, q_cells) = ctx.eval(&p_cells);
            let candidate = Candidate {
                value,
                p: p_cells,
                q: q_cells,
                p123,
                p_none,
            };
            best = Some(match best {
                None => candidate,
                Some(b) => better(b, candidate),
            });
        }
    }
    (best, evaluated)
}

fn assemble_p(c: &Candidate) -> Result<TripletDistribution> {
    let [p12, p13, p1, p23, p2, p3] = c.p;
    TripletDistribution::from_cells([c.p123, p12, p13, p1, p23, p2, p3, c.p_none])
}

fn assemble_q(c: &Candidate) -> Result<TripletDistribution> {
    let [q12, q13, q1, q23, q2, q3] = c.q;
    let q123 = 1.0 - (q12 + q13 + q1 + q23 + q2 + q3);
    TripletDistribution::from_cells([q123, q12, q13, q1, q23, q2, q3, 0.0])
}

/// Largest residual over the constrained grid, with a witness distribution
/// pair attaining it.
pub fn max_residual_grid(cfg: &GridSearchConfig) -> Result<GridSearchOutcome> {
    cfg.validate()?;
    let step = cfg.p_grid_step;
    let ctx = SearchContext::new(&cfg.mu, &cfg.params);

    // Work is split over the (p₁, p₁₂) plane; the slices are independent and
    // the reduction has a deterministic tie-break.
    let mut slices = Vec::new();
    for i1 in 0..=grid_count(cfg.zeta.min(cfg.mu[0]), step) {
        let p1 = i1 as f64 * step;
        let p12_max = (cfg.zeta - p1)
            .min(cfg.mu[0] - p1)
            .min(1.0 - cfg.mu[2] - p1);
        for i12 in 0..=grid_count(p12_max, step) {
            slices.push((p1, i12 as f64 * step));
        }
    }

    let (best, evaluated) = slices
        .par_iter()
        .map(|&(p1, p12)| search_slice(cfg, &ctx, p1, p12))
        .reduce(
            || (None, 0),
            |(a, na), (b, nb)| {
                let merged = match (a, b) {
                    (Some(x), Some(y)) => Some(better(x, y)),
                    (x, None) => x,
                    (None, y) => y,
                };
                (merged, na + nb)
            },
        );

    let best = best.ok_or_else(|| {
        Error::Infeasible(format!(
            "no source grid point satisfies the constraints (zeta = {}, mu = {:?}, step = {})",
            cfg.zeta, cfg.mu, step
        ))
    })?;

    let outcome = GridSearchOutcome {
        max_value: best.value,
        certified_upper: best.value + certification_slack(cfg),
        witness_p: assemble_p(&best)?,
        witness_q: assemble_q(&best)?,
        evaluated_p_points: evaluated,
    };
    debug_assert!(
        verify_witness(cfg, &outcome.witness_p, &outcome.witness_q, 1e-9).is_empty(),
        "grid-search witness failed revalidation"
    );
    Ok(outcome)
}

/// Conservative slack for source points between grid nodes: the residual is
/// affine in the q cells with coefficient magnitudes summing to 4, each q
/// interval endpoint moves at most (1+δ₂) per unit of source-cell movement,
/// and a one-step move of the four gridded cells shifts the six source cells
/// by at most 2 steps per gridded dimension.
fn certification_slack(cfg: &GridSearchConfig) -> f64 {
    let delta2_eff = match &cfg.params.second_segment {
        Some(seg) => cfg.params.delta2.max(seg.delta2_hi),
        None => cfg.params.delta2,
    };
    8.0 * (1.0 + delta2_eff) * cfg.p_grid_step
}

/// `max_residual_grid` halved — the guarantee for the line shifted toward the
/// middle point.
pub fn halved_bound(cfg: &GridSearchConfig) -> Result<f64> {
    Ok(max_residual_grid(cfg)?.max_value / 2.0)
}

/// Re-validates a witness pair against every stated constraint; returns the
/// list of violated constraint descriptions (empty when the witness is
/// sound).
pub fn verify_witness(
    cfg: &GridSearchConfig,
    p: &TripletDistribution,
    q: &TripletDistribution,
    tol: f64,
) -> Vec<String> {
    let mut problems = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            problems.push(name.to_string());
        }
    };
    check("p1+p12 ≤ zeta", p.p1() + p.p12() <= cfg.zeta + tol);
    check("p1+p13 ≤ zeta", p.p1() + p.p13() <= cfg.zeta + tol);
    check("p2+p12 ≤ zeta", p.p2() + p.p12() <= cfg.zeta + tol);
    let acc = p.accuracies();
    for (i, (got, want)) in acc.iter().zip(cfg.mu).enumerate() {
        check(&format!("accuracy {}", i + 1), (got - want).abs() <= tol);
    }
    for (pat, q_cell) in q.non_unanimous_cells() {
        let p_cell = p.cell(pat);
        check(
            &format!("q{} within wedge", pat),
            q_cell >= cfg.params.lower_bound(p_cell).max(0.0) - tol
                && q_cell <= cfg.params.upper_bound(p_cell) + tol,
        );
    }
    problems
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds;

    fn config(zeta: f64, mu: [f64; 3], wedge: (f64, f64, f64, f64)) -> GridSearchConfig {
        let params = ClosenessParams::new(wedge.0, wedge.1, wedge.2, wedge.3).unwrap();
        GridSearchConfig::new(zeta, mu, params).unwrap()
    }

    #[test]
    fn exact_closeness_forces_zero_residual() {
        let cfg = config(0.0, [0.6, 0.7, 0.8], (0.0, 0.0, 0.0, 0.0));
        let outcome = max_residual_grid(&cfg).unwrap();
        assert!(outcome.max_value.abs() < 1e-12);
        assert_eq!(outcome.evaluated_p_points, 1);
        // ζ = 0 pins the four dominance cells at zero.
        assert!(outcome.witness_p.is_ordered());
    }

    #[test]
    fn reference_windows() {
        let cfg = config(0.05, [0.6, 0.7, 0.8], (0.31, 0.38, 0.005, 0.008));
        let a = max_residual_grid(&cfg).unwrap();
        assert!(
            (0.074..=0.094).contains(&a.max_value),
            "max {} outside window",
            a.max_value
        );
        assert!(a.certified_upper >= a.max_value);
        assert_eq!(halved_bound(&cfg).unwrap(), a.max_value / 2.0);

        let cfg = config(0.05, [0.6, 0.7, 0.8], (0.0, 0.25, 0.005, 0.005));
        let b = max_residual_grid(&cfg).unwrap();
        assert!(
            (0.037..=0.053).contains(&b.max_value),
            "max {} outside window",
            b.max_value
        );
    }

    #[test]
    fn refinement_never_decreases() {
        let base = config(0.05, [0.55, 0.7, 0.85], (0.2, 0.3, 0.004, 0.006));
        let mut last = -1.0;
        for step in [0.05, 0.025, 0.0125] {
            let cfg = base.clone().with_p_grid_step(step).unwrap();
            let outcome = max_residual_grid(&cfg).unwrap();
            assert!(
                outcome.max_value >= last,
                "refinement decreased: {} < {last} at step {step}",
                outcome.max_value
            );
            last = outcome.max_value;
        }
        // More q points cannot change the exact interval maximization.
        let five = max_residual_grid(&base).unwrap();
        let ten = max_residual_grid(&base.clone().with_q_grid_points(10).unwrap()).unwrap();
        assert_eq!(five.max_value, ten.max_value);
    }

    #[test]
    fn witness_revalidates_and_reproduces_value() {
        let cfg = config(0.05, [0.6, 0.7, 0.8], (0.31, 0.38, 0.005, 0.008));
        let outcome = max_residual_grid(&cfg).unwrap();
        assert!(verify_witness(&cfg, &outcome.witness_p, &outcome.witness_q, 1e-9).is_empty());
        let recomputed =
            bounds::residual_from_triplets(&outcome.witness_p, &outcome.witness_q).unwrap();
        assert!((recomputed - outcome.max_value).abs() < 1e-9);
    }

    #[test]
    fn ordered_grid_respects_analytic_bound() {
        // With ζ = 0 the grid maximum cannot exceed the closed-form bound.
        let cases = [
            ([0.6, 0.7, 0.8], (0.31, 0.38, 0.005, 0.008)),
            ([0.5, 0.65, 0.9], (0.1, 0.5, 0.0, 0.01)),
            ([0.3, 0.4, 0.5], (0.0, 0.25, 0.005, 0.005)),
        ];
        for (mu, wedge) in cases {
            let cfg = config(0.0, mu, wedge);
            let outcome = max_residual_grid(&cfg).unwrap();
            let analytic = bounds::prop1_bound(mu[0], mu[1], mu[2], &cfg.params)
                .unwrap()
                .bound_value;
            assert!(
                outcome.max_value <= analytic + 1e-12,
                "grid {} exceeded analytic {analytic} for {mu:?}",
                outcome.max_value
            );
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let cfg = config(0.1, [0.6, 0.7, 0.8], (0.31, 0.38, 0.005, 0.008));
        let a = max_residual_grid(&cfg).unwrap();
        let b = max_residual_grid(&cfg).unwrap();
        assert_eq!(a.max_value, b.max_value);
        assert_eq!(a.witness_p.cells(), b.witness_p.cells());
        assert_eq!(a.witness_q.cells(), b.witness_q.cells());
        assert_eq!(a.evaluated_p_points, b.evaluated_p_points);
    }

    #[test]
    fn rejects_invalid_configs() {
        let params = ClosenessParams::new(0.1, 0.1, 0.0, 0.0).unwrap();
        assert!(GridSearchConfig::new(-0.1, [0.6, 0.7, 0.8], params.clone()).is_err());
        assert!(GridSearchConfig::new(0.05, [0.8, 0.7, 0.6], params.clone()).is_err());
        assert!(matches!(
            GridSearchConfig::new(0.05, [0.7, 0.7, 0.7], params.clone()),
            Err(Error::ZeroDenominator)
        ));
        let steep = ClosenessParams::new(1.0, 0.1, 0.0, 0.0).unwrap();
        assert!(GridSearchConfig::new(0.05, [0.6, 0.7, 0.8], steep).is_err());
        assert!(GridSearchConfig::new(0.05, [0.6, 0.7, 0.8], params.clone())
            .unwrap()
            .with_p_grid_step(0.0)
            .is_err());
        assert!(GridSearchConfig::new(0.05, [0.6, 0.7, 0.8], params)
            .unwrap()
            .with_q_grid_points(1)
            .is_err());
    }
}
