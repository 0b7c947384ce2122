//! Quantitative tools for the "accuracy on a line" phenomenon: when a set
//! of classifiers is evaluated on two distributions, their accuracy pairs
//! (μᴾᵢ, μᵠᵢ) often fall near a single line. This crate measures how far
//! that can be pushed and when it must hold:
//!
//! - [`corrdata`] — per-example correctness matrices, accuracy pairs, and
//!   alignment of model sets across two evaluations.
//! - [`events`] — joint correctness patterns of model triples, dominance
//!   probabilities ("lower-accuracy model right where a higher one is
//!   wrong"), and streaming enumeration of comparable event probabilities.
//! - [`closeness`] — the multiplicative/additive wedge relating event
//!   probabilities across distributions: fitting, checking, and violation
//!   reporting.
//! - [`bounds`] — the analytic mid-model residual bound implied by ordering
//!   plus wedge-closeness, its corollary over many models, and feasible
//!   bands around anchor models.
//! - [`gridbound`] — a certified grid search maximizing the residual over
//!   all distribution pairs compatible with given accuracies, dominance
//!   budget, and wedge parameters.
//! - [`trends`] — linear, probit-domain, and piecewise trend fits over
//!   accuracy pairs.
//! - [`probit`] — the standard normal CDF and inverse used by the trend
//!   fits.
//! - [`synth`] — hand-built scenarios with known answers, independent
//!   triplets, nested matrices, and seeded sampling, used as oracles.

pub mod bits;
pub mod bounds;
pub mod closeness;
pub mod corrdata;
pub mod error;
pub mod events;
pub mod gridbound;
pub mod probit;
pub mod synth;
pub mod trends;

pub use bounds::{
    corollary_bound, feasible_band, prop1_bound, residual_from_accuracies,
    residual_from_triplets, BandPoint, BoundReport, Line,
};
pub use closeness::{
    check_closeness, fit_wedge, outlier_models, ClosenessParams, SecondSegment, Violation,
    ViolationReport, ViolationSide,
};
pub use corrdata::{align, align_matrices, AccuracyPairSet, Alignment, CorrectnessMatrix};
pub use error::{Error, Result};
pub use events::{
    dominance_probability, dominance_table, enumerate_triplet_points, similarity,
    triplet_events, triplet_points, DominancePair, DominanceReport, Pattern, TripletDistribution,
    TripletPoint,
};
pub use gridbound::{max_residual_grid, GridSearchConfig, GridSearchOutcome};
pub use probit::{inverse_normal_cdf, normal_cdf};
pub use synth::{
    example1, example2, independent_triplet, ordered_chain, sample_matrix, PlantedScenario,
    RNG_ALGORITHM,
};
pub use trends::{
    compare_fits, ols_fit, piecewise_fit, piecewise_fit_free, probit_fit, FitComparison,
    FitKind, FitReport, Knot, ProbitStats, Segment,
};
