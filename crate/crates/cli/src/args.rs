//! Command-line surface: one subcommand per analysis, shared wedge flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use driftline::closeness::{ClosenessParams, SecondSegment};
use driftline::gridbound::{DEFAULT_P_GRID_STEP, DEFAULT_Q_GRID_POINTS};
use driftline::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "driftline",
    version,
    about = "Dominance, wedge-closeness, residual-bound, and trend analysis for paired model evaluations"
)]
pub struct Cli {
    /// Directory where output files are written.
    #[arg(long, short = 'o', global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Pairwise dominance probabilities of one correctness matrix.
    Dominance(DominanceArgs),
    /// Fit or check the closeness wedge over triplet events of two matrices.
    Closeness(ClosenessArgs),
    /// Analytic residual bound for an accuracy triple, plus the many-model corollary.
    Bound(BoundArgs),
    /// Grid-search residual maximization under dominance and wedge budgets.
    GridBound(GridBoundArgs),
    /// Linear, probit, and piecewise trend fits over accuracy pairs.
    Trend(TrendArgs),
    /// Feasible band and lower-bound curve between anchor models.
    Band(BandArgs),
    /// Emit built-in fixtures: worked examples, nested chains, sampled matrices.
    Scenario(ScenarioArgs),
    /// Full analysis bundle over two matrices.
    Report(ReportArgs),
}

/// Wedge parameters for commands where they are mandatory.
#[derive(Args, Debug)]
pub struct WedgeArgs {
    /// Lower-bound slope deficit δ₁ in −ν₁ + (1−δ₁)·p ≤ q.
    #[arg(long)]
    pub delta1: f64,
    /// Upper-bound slope excess δ₂ in q ≤ ν₂ + (1+δ₂)·p.
    #[arg(long)]
    pub delta2: f64,
    /// Lower-bound intercept ν₁.
    #[arg(long, default_value_t = 0.0)]
    pub nu1: f64,
    /// Upper-bound intercept ν₂.
    #[arg(long, default_value_t = 0.0)]
    pub nu2: f64,
    /// Looser upper segment as "threshold,delta2,nu2", applied when p < threshold.
    #[arg(long)]
    pub segment2: Option<String>,
}

pub fn parse_segment2(text: &str) -> Result<SecondSegment> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::InvalidInput(format!(
            "--segment2 expects \"threshold,delta2,nu2\", found {text:?}"
        )));
    }
    let mut values = [0.0f64; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part.parse().map_err(|_| {
            Error::InvalidInput(format!("--segment2 component {part:?} is not a number"))
        })?;
    }
    Ok(SecondSegment {
        threshold: values[0],
        delta2_hi: values[1],
        nu2_hi: values[2],
    })
}

impl WedgeArgs {
    pub fn to_params(&self) -> Result<ClosenessParams> {
        let params = ClosenessParams::new(self.delta1, self.delta2, self.nu1, self.nu2)?;
        match &self.segment2 {
            Some(text) => {
                let seg = parse_segment2(text)?;
                params.with_second_segment(seg.threshold, seg.delta2_hi, seg.nu2_hi)
            }
            None => Ok(params),
        }
    }
}

#[derive(Args, Debug)]
pub struct DominanceArgs {
    /// Correctness matrix CSV (`example_id,<model>,...` with 0/1 cells).
    #[arg(long)]
    pub matrix: PathBuf,
    /// Threshold for the "small dominance" summary fraction.
    #[arg(long, default_value_t = driftline::events::DOMINANCE_SUMMARY_THRESHOLD)]
    pub threshold: f64,
}

#[derive(Args, Debug)]
pub struct ClosenessArgs {
    /// Correctness matrix under the first distribution.
    #[arg(long)]
    pub matrix_p: PathBuf,
    /// Correctness matrix under the second distribution.
    #[arg(long)]
    pub matrix_q: PathBuf,
    /// Fraction of events the wedge must cover (used when fitting).
    #[arg(long, default_value_t = 1.0)]
    pub coverage: f64,
    /// Check this δ₁ instead of fitting (requires --delta2 as well).
    #[arg(long)]
    pub delta1: Option<f64>,
    #[arg(long)]
    pub delta2: Option<f64>,
    #[arg(long)]
    pub nu1: Option<f64>,
    #[arg(long)]
    pub nu2: Option<f64>,
    /// Looser upper segment "threshold,delta2,nu2" (check mode only).
    #[arg(long)]
    pub segment2: Option<String>,
}

impl ClosenessArgs {
    /// `Some(params)` when the invocation pins the wedge, `None` to fit it.
    pub fn explicit_params(&self) -> Result<Option<ClosenessParams>> {
        let any_given = self.delta1.is_some()
            || self.delta2.is_some()
            || self.nu1.is_some()
            || self.nu2.is_some()
            || self.segment2.is_some();
        if !any_given {
            return Ok(None);
        }
        let (delta1, delta2) = match (self.delta1, self.delta2) {
            (Some(d1), Some(d2)) => (d1, d2),
            _ => {
                return Err(Error::InvalidInput(
                    "checking a wedge requires both --delta1 and --delta2 \
                     (omit all wedge flags to fit one instead)"
                        .into(),
                ))
            }
        };
        let params = ClosenessParams::new(
            delta1,
            delta2,
            self.nu1.unwrap_or(0.0),
            self.nu2.unwrap_or(0.0),
        )?
        .with_coverage(self.coverage)?;
        let params = match &self.segment2 {
            Some(text) => {
                let seg = parse_segment2(text)?;
                params.with_second_segment(seg.threshold, seg.delta2_hi, seg.nu2_hi)?
            }
            None => params,
        };
        Ok(Some(params))
    }
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// Three first-domain accuracies, nondecreasing: "0.6,0.7,0.8".
    #[arg(long, value_delimiter = ',', required = true)]
    pub mu: Vec<f64>,
    #[command(flatten)]
    pub wedge: WedgeArgs,
}

#[derive(Args, Debug)]
pub struct GridBoundArgs {
    /// Dominance budget ζ (largest allowed dominance probability).
    #[arg(long)]
    pub zeta: f64,
    /// Three first-domain accuracies, nondecreasing: "0.6,0.7,0.8".
    #[arg(long, value_delimiter = ',', required = true)]
    pub mu: Vec<f64>,
    #[command(flatten)]
    pub wedge: WedgeArgs,
    /// Grid step for the gridded source-distribution cells.
    #[arg(long, default_value_t = DEFAULT_P_GRID_STEP)]
    pub p_step: f64,
    /// Grid points per admissible second-distribution cell interval.
    #[arg(long, default_value_t = DEFAULT_Q_GRID_POINTS)]
    pub q_points: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TrendKind {
    Linear,
    Probit,
    Piecewise,
    All,
}

#[derive(Args, Debug)]
pub struct TrendArgs {
    #[arg(long)]
    pub matrix_p: PathBuf,
    #[arg(long)]
    pub matrix_q: PathBuf,
    /// Which fit family to run (`all` compares the three).
    #[arg(long, value_enum, default_value_t = TrendKind::All)]
    pub kind: TrendKind,
    /// 1-based rank (by first-domain accuracy) of the piecewise knot model.
    #[arg(long, default_value_t = 6)]
    pub switch: usize,
    /// Fit the two piecewise segments independently instead of hinged.
    #[arg(long)]
    pub free_knot: bool,
}

#[derive(Args, Debug)]
pub struct BandArgs {
    /// Anchor accuracy pairs as "muP:muQ", e.g. "0.4:0.3,0.8:0.7".
    #[arg(long, value_delimiter = ',', required = true)]
    pub anchors: Vec<String>,
    #[command(flatten)]
    pub wedge: WedgeArgs,
    /// Dominance budget ζ; 0 uses the analytic width, > 0 the grid search.
    #[arg(long, default_value_t = 0.0)]
    pub zeta: f64,
    /// Number of evenly spaced grid accuracies across the anchor span.
    #[arg(long, default_value_t = 21)]
    pub grid_points: usize,
}

pub fn parse_anchor(text: &str) -> Result<(f64, f64)> {
    let (p, q) = text.split_once(':').ok_or_else(|| {
        Error::InvalidInput(format!("anchor {text:?} must look like \"muP:muQ\""))
    })?;
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("anchor component {s:?} is not a number")))
    };
    Ok((parse(p)?, parse(q)?))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScenarioName {
    /// Ordered pair of distributions with a large middle-model residual.
    Example1,
    /// Independent-prediction source with a tightly wedge-bounded target.
    Example2,
    /// Exactly nested correctness matrix at given accuracies.
    Ordered,
    /// Matrix sampled from an independent triplet at given accuracies.
    Independent,
}

#[derive(Args, Debug)]
pub struct ScenarioArgs {
    /// Which fixture to emit.
    #[arg(long, value_enum)]
    pub name: ScenarioName,
    /// Accuracies for `ordered` (any length) or `independent` (exactly 3).
    #[arg(long, value_delimiter = ',')]
    pub accuracies: Vec<f64>,
    /// Number of examples to sample.
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    /// Seed for the deterministic generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[arg(long)]
    pub matrix_p: PathBuf,
    #[arg(long)]
    pub matrix_q: PathBuf,
    /// Fraction of events the fitted wedge must cover.
    #[arg(long, default_value_t = 1.0)]
    pub coverage: f64,
    /// Dominance budgets for the grid-bound and curve sections.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.05])]
    pub zeta_values: Vec<f64>,
    /// 1-based knot rank for the piecewise fit (clamped to the valid range).
    #[arg(long, default_value_t = 6)]
    pub switch: usize,
    /// Grid step for grid-bound sections.
    #[arg(long, default_value_t = DEFAULT_P_GRID_STEP)]
    pub p_step: f64,
    /// Threshold for the "small dominance" summary fraction.
    #[arg(long, default_value_t = driftline::events::DOMINANCE_SUMMARY_THRESHOLD)]
    pub threshold: f64,
    /// Grid resolution of the lower-bound curves.
    #[arg(long, default_value_t = 21)]
    pub band_grid_points: usize,
}
