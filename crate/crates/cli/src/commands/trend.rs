//! `trend`: linear, probit, and piecewise fits of target accuracies against
//! source accuracies over the models two matrices share.

use std::fmt::Write as _;
use std::path::Path;

use driftline::corrdata::{align, AccuracyPairSet, CorrectnessMatrix};
use driftline::trends::{
    compare_fits, ols_fit, piecewise_fit, piecewise_fit_free, probit_fit, FitComparison, FitReport,
};
use driftline::{Error, Result};
use serde::Serialize;

use crate::args::{TrendArgs, TrendKind};
use crate::out;
use crate::plot::Plot;

#[derive(Serialize)]
#[serde(untagged)]
enum Fits {
    Single(FitReport),
    Comparison(Box<FitComparison>),
}

#[derive(Serialize)]
struct ModelRow {
    model: String,
    mu_p: f64,
    mu_q: f64,
}

#[derive(Serialize)]
struct Payload {
    matrix_p: String,
    matrix_q: String,
    models: Vec<ModelRow>,
    fits: Fits,
}

fn curve(fit: &FitReport, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    (0..=100)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / 100.0;
            (x, fit.predict(x))
        })
        .collect()
}

fn label(kind: TrendKind) -> &'static str {
    match kind {
        TrendKind::Linear => "linear",
        TrendKind::Probit => "probit",
        TrendKind::Piecewise => "piecewise",
        TrendKind::All => "all",
    }
}

pub fn run(out_dir: &Path, args: &TrendArgs, command_line: &str) -> Result<()> {
    let mp = CorrectnessMatrix::load(&args.matrix_p)?;
    let mq = CorrectnessMatrix::load(&args.matrix_q)?;
    let alignment = align(&mp, &mq)?;
    let pairs: &AccuracyPairSet = &alignment.pairs;
    if args.free_knot && args.kind != TrendKind::Piecewise {
        return Err(Error::InvalidInput(
            "--free-knot only applies to --kind piecewise".into(),
        ));
    }

    let fits = match args.kind {
        TrendKind::Linear => Fits::Single(ols_fit(pairs)?),
        TrendKind::Probit => Fits::Single(probit_fit(pairs)?),
        TrendKind::Piecewise if args.free_knot => {
            Fits::Single(piecewise_fit_free(pairs, args.switch)?)
        }
        TrendKind::Piecewise => Fits::Single(piecewise_fit(pairs, args.switch)?),
        TrendKind::All => Fits::Comparison(Box::new(compare_fits(pairs, args.switch)?)),
    };

    let named: Vec<(&str, &FitReport)> = match &fits {
        Fits::Single(fit) => vec![(label(args.kind), fit)],
        Fits::Comparison(cmp) => vec![
            ("linear", &cmp.linear),
            ("probit", &cmp.probit),
            ("piecewise", &cmp.piecewise),
        ],
    };

    let mut csv = String::from("model,mu_p,mu_q");
    for (name, _) in &named {
        let _ = write!(csv, ",predicted_{name}");
    }
    csv.push('\n');
    for (model, mu_p, mu_q) in pairs.iter() {
        let _ = write!(csv, "{model},{mu_p},{mu_q}");
        for (_, fit) in &named {
            let _ = write!(csv, ",{}", fit.predict(mu_p));
        }
        csv.push('\n');
    }
    out::write_text(out_dir, "trend_points.csv", &csv)?;

    let scatter: Vec<(f64, f64)> = pairs.iter().map(|(_, p, q)| (p, q)).collect();
    let lo = scatter.iter().map(|d| d.0).fold(f64::INFINITY, f64::min);
    let hi = scatter.iter().map(|d| d.0).fold(f64::NEG_INFINITY, f64::max);
    let mut plot = Plot::new(
        "Accuracy trend across distributions",
        "accuracy under P",
        "accuracy under Q",
    );
    plot.points("models", &scatter);
    for (name, fit) in &named {
        plot.line(name, &curve(fit, lo, hi));
    }
    out::write_text(out_dir, "trend.svg", &plot.render())?;

    let payload = Payload {
        matrix_p: mp.label().to_string(),
        matrix_q: mq.label().to_string(),
        models: pairs
            .iter()
            .map(|(model, mu_p, mu_q)| ModelRow {
                model: model.to_string(),
                mu_p,
                mu_q,
            })
            .collect(),
        fits,
    };
    out::emit_json(out_dir, "trend.json", command_line, None, &payload)?;
    Ok(())
}
