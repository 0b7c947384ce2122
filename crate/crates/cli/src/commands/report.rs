//! `report`: runs the full analysis bundle over two matrices. Sections fail
//! independently — a degenerate fit in one analysis never hides the others —
//! and every failure is listed in the payload's manifest. The process exits
//! with the infeasibility code when any section failed.

use std::path::Path;

use driftline::bounds::{corollary_bound, lower_bound_curve, prop1_bound, BoundReport};
use driftline::closeness::{check_closeness, fit_wedge, ClosenessParams};
use driftline::corrdata::{align, align_matrices, CorrectnessMatrix};
use driftline::events::{dominance_table, enumerate_triplet_points, DominanceReport};
use driftline::gridbound::{max_residual_grid, GridSearchConfig};
use driftline::trends::{compare_fits, FitComparison, FitReport};
use driftline::{Error, Result};
use serde::Serialize;

use crate::args::ReportArgs;
use crate::commands::linspace;
use crate::out;
use crate::plot::Plot;

#[derive(Serialize)]
struct Section<T: Serialize> {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<T>,
}

impl<T: Serialize> Section<T> {
    fn capture(name: &str, result: Result<T>, failures: &mut Vec<String>) -> Self {
        match result {
            Ok(value) => Section {
                status: "ok",
                error: None,
                value: Some(value),
            },
            Err(error) => {
                failures.push(name.to_string());
                Section {
                    status: "failed",
                    error: Some(error.to_string()),
                    value: None,
                }
            }
        }
    }

    fn ok_value(&self) -> Option<&T> {
        self.value.as_ref()
    }
}

#[derive(Serialize)]
struct ModelRow {
    model: String,
    mu_p: f64,
    mu_q: f64,
}

#[derive(Serialize)]
struct WedgeSection {
    params: ClosenessParams,
    total_points: u64,
    violating_points: u64,
    coverage_achieved: f64,
}

#[derive(Serialize)]
struct TripleBound {
    models: [String; 3],
    analytic: BoundReport,
    range_bound: f64,
}

#[derive(Serialize)]
struct GridValue {
    mu: [f64; 3],
    max_value: f64,
    certified_upper: f64,
    evaluated_p_points: u64,
}

#[derive(Serialize)]
struct GridBoundRow {
    zeta: f64,
    #[serde(flatten)]
    section: Section<GridValue>,
}

#[derive(Serialize)]
struct CurveRow {
    zeta: f64,
    #[serde(flatten)]
    section: Section<Vec<(f64, f64)>>,
}

#[derive(Serialize)]
struct Payload {
    matrix_p: String,
    matrix_q: String,
    n_models: usize,
    models: Vec<ModelRow>,
    dominance_p: Section<DominanceReport>,
    dominance_q: Section<DominanceReport>,
    wedge: Section<WedgeSection>,
    analytic_bounds: Section<Vec<TripleBound>>,
    grid_bounds: Vec<GridBoundRow>,
    trends: Section<FitComparison>,
    curves: Vec<CurveRow>,
    artifacts: Vec<String>,
    failures: Vec<String>,
}

fn retuned_dominance(matrix: &CorrectnessMatrix, threshold: f64) -> Result<DominanceReport> {
    let mut report = dominance_table(matrix)?;
    if threshold != report.threshold {
        report.threshold = threshold;
        report.fraction_below_threshold = report
            .pairs
            .iter()
            .filter(|pair| pair.dominance <= threshold)
            .count() as f64
            / report.pairs.len() as f64;
    }
    Ok(report)
}

fn fit_curve(fit: &FitReport, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    (0..=100)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / 100.0;
            (x, fit.predict(x))
        })
        .collect()
}

pub fn run(out_dir: &Path, args: &ReportArgs, command_line: &str) -> Result<()> {
    let mp = CorrectnessMatrix::load(&args.matrix_p)?;
    let mq = CorrectnessMatrix::load(&args.matrix_q)?;
    let (mp, mq) = align_matrices(&mp, &mq)?;
    let alignment = align(&mp, &mq)?;
    let pairs = &alignment.pairs;
    let h = pairs.len();
    let mut failures: Vec<String> = Vec::new();

    // Models sorted by source accuracy; every later section refers to them.
    let models: Vec<ModelRow> = pairs
        .iter()
        .map(|(model, mu_p, mu_q)| ModelRow {
            model: model.to_string(),
            mu_p,
            mu_q,
        })
        .collect();
    let mu_p_sorted: Vec<f64> = models.iter().map(|m| m.mu_p).collect();
    let anchors: Vec<(f64, f64)> = models.iter().map(|m| (m.mu_p, m.mu_q)).collect();
    let (mu_lo, mu_hi) = (mu_p_sorted[0], mu_p_sorted[h - 1]);

    let dominance_p = Section::capture(
        "dominance_p",
        retuned_dominance(&mp, args.threshold),
        &mut failures,
    );
    let dominance_q = Section::capture(
        "dominance_q",
        retuned_dominance(&mq, args.threshold),
        &mut failures,
    );

    let wedge_result: Result<WedgeSection> = (|| {
        let points = enumerate_triplet_points(&mp, &mq)?;
        let params = fit_wedge(points.iter().cloned(), args.coverage)?;
        let report = check_closeness(points, mp.model_names(), &params)?;
        Ok(WedgeSection {
            params,
            total_points: report.total,
            violating_points: report.violating,
            coverage_achieved: report.coverage_achieved,
        })
    })();
    let wedge = Section::capture("wedge", wedge_result, &mut failures);
    let fitted_params = wedge.ok_value().map(|w| w.params.clone());
    let missing_wedge = || Error::Infeasible("no fitted wedge available".into());

    let bounds_result: Result<Vec<TripleBound>> = fitted_params
        .as_ref()
        .ok_or_else(missing_wedge)
        .and_then(|params| {
            models
                .windows(3)
                .map(|w| {
                    Ok(TripleBound {
                        models: [w[0].model.clone(), w[1].model.clone(), w[2].model.clone()],
                        analytic: prop1_bound(w[0].mu_p, w[1].mu_p, w[2].mu_p, params)?,
                        range_bound: corollary_bound(w[0].mu_p, w[2].mu_p, params)?,
                    })
                })
                .collect()
        });
    let analytic_bounds = Section::capture("analytic_bounds", bounds_result, &mut failures);

    // Grid search on the (lowest, median, highest) source-accuracy triple.
    let grid_mu = [mu_lo, mu_p_sorted[(h - 1) / 2], mu_hi];
    let grid_bounds: Vec<GridBoundRow> = args
        .zeta_values
        .iter()
        .map(|&zeta| {
            let result: Result<GridValue> = fitted_params
                .as_ref()
                .ok_or_else(missing_wedge)
                .and_then(|params| {
                    let cfg = GridSearchConfig::new(zeta, grid_mu, params.clone())?
                        .with_p_grid_step(args.p_step)?;
                    let outcome = max_residual_grid(&cfg)?;
                    Ok(GridValue {
                        mu: grid_mu,
                        max_value: outcome.max_value,
                        certified_upper: outcome.certified_upper,
                        evaluated_p_points: outcome.evaluated_p_points,
                    })
                });
            GridBoundRow {
                zeta,
                section: Section::capture(&format!("grid_bounds[zeta={zeta}]"), result, &mut failures),
            }
        })
        .collect();

    let switch = args.switch.clamp(2, (h - 1).max(2));
    let trends = Section::capture("trends", compare_fits(pairs, switch), &mut failures);

    let curves: Vec<CurveRow> = args
        .zeta_values
        .iter()
        .map(|&zeta| {
            let result: Result<Vec<(f64, f64)>> = fitted_params
                .as_ref()
                .ok_or_else(missing_wedge)
                .and_then(|params| {
                    let grid = linspace(mu_lo, mu_hi, args.band_grid_points)?;
                    lower_bound_curve(&anchors, params, zeta, &grid)
                });
            CurveRow {
                zeta,
                section: Section::capture(&format!("curves[zeta={zeta}]"), result, &mut failures),
            }
        })
        .collect();

    // Accuracy scatter with the identity reference.
    let mut artifacts: Vec<String> = Vec::new();
    let mut acc_plot = Plot::new(
        "Model accuracies across distributions",
        "accuracy under P",
        "accuracy under Q",
    );
    acc_plot.points("models", &anchors);
    acc_plot.line("identity", &[(mu_lo, mu_lo), (mu_hi, mu_hi)]);
    out::write_text(out_dir, "report_accuracies.svg", &acc_plot.render())?;
    artifacts.push("report_accuracies.svg".into());

    if let Some(cmp) = trends.ok_value() {
        let mut trend_plot = Plot::new(
            "Fitted accuracy trends",
            "accuracy under P",
            "accuracy under Q",
        );
        trend_plot.points("models", &anchors);
        trend_plot.line("linear", &fit_curve(&cmp.linear, mu_lo, mu_hi));
        trend_plot.line("probit", &fit_curve(&cmp.probit, mu_lo, mu_hi));
        trend_plot.line("piecewise", &fit_curve(&cmp.piecewise, mu_lo, mu_hi));
        out::write_text(out_dir, "report_trends.svg", &trend_plot.render())?;
        artifacts.push("report_trends.svg".into());
    }

    let ok_curves: Vec<(f64, &Vec<(f64, f64)>)> = curves
        .iter()
        .filter_map(|row| row.section.ok_value().map(|c| (row.zeta, c)))
        .collect();
    if !ok_curves.is_empty() {
        let mut curve_plot = Plot::new(
            "Guaranteed-minimum accuracy curves",
            "accuracy under P",
            "accuracy under Q",
        );
        curve_plot.points("models", &anchors);
        for (zeta, curve) in ok_curves {
            curve_plot.line(&format!("lower bound, zeta={zeta}"), curve);
        }
        out::write_text(out_dir, "report_curves.svg", &curve_plot.render())?;
        artifacts.push("report_curves.svg".into());
    }

    let payload = Payload {
        matrix_p: mp.label().to_string(),
        matrix_q: mq.label().to_string(),
        n_models: h,
        models,
        dominance_p,
        dominance_q,
        wedge,
        analytic_bounds,
        grid_bounds,
        trends,
        curves,
        artifacts,
        failures: failures.clone(),
    };
    out::emit_json(out_dir, "report.json", command_line, None, &payload)?;

    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::Infeasible(format!(
            "report completed with {} failed section(s): {}",
            failures.len(),
            failures.join(", ")
        )))
    }
}
