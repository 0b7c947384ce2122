//! `closeness`: fit or check the (δ₁, δ₂, ν₁, ν₂) wedge over the triplet
//! events of two correctness matrices.

use std::fmt::Write as _;
use std::path::Path;

use driftline::closeness::{check_closeness, fit_wedge, ViolationReport};
use driftline::corrdata::{align_matrices, CorrectnessMatrix};
use driftline::events::enumerate_triplet_points;
use driftline::Result;
use serde::Serialize;

use crate::args::ClosenessArgs;
use crate::out;
use crate::plot::Plot;

/// Violations listed verbatim in the JSON payload; the full count is always
/// reported, the itemized list is capped to keep documents readable.
const MAX_LISTED_VIOLATIONS: usize = 200;

#[derive(Serialize)]
struct Payload {
    matrix_p: String,
    matrix_q: String,
    n_models: usize,
    n_points: usize,
    /// `"fitted"` when the wedge was derived from the data, `"checked"` when
    /// it was supplied on the command line.
    mode: &'static str,
    violations_truncated: bool,
    report: ViolationReport,
}

pub fn run(out_dir: &Path, args: &ClosenessArgs, command_line: &str) -> Result<()> {
    let mp = CorrectnessMatrix::load(&args.matrix_p)?;
    let mq = CorrectnessMatrix::load(&args.matrix_q)?;
    let (mp, mq) = align_matrices(&mp, &mq)?;
    let points = enumerate_triplet_points(&mp, &mq)?;

    let (mode, params) = match args.explicit_params()? {
        Some(params) => ("checked", params),
        None => ("fitted", fit_wedge(points.iter().cloned(), args.coverage)?),
    };
    let mut report = check_closeness(points.iter().cloned(), mp.model_names(), &params)?;

    let mut csv = String::from("model_i,model_j,model_k,pattern,p,q\n");
    for point in &points {
        let [i, j, k] = point.triple;
        let names = mp.model_names();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            names[i],
            names[j],
            names[k],
            point.pattern.code(),
            point.p,
            point.q
        );
    }
    out::write_text(out_dir, "triplet_points.csv", &csv)?;

    let scatter: Vec<(f64, f64)> = points.iter().map(|pt| (pt.p, pt.q)).collect();
    let p_max = scatter.iter().map(|d| d.0).fold(0.0f64, f64::max).max(1e-3);
    let boundary = |f: &dyn Fn(f64) -> f64| -> Vec<(f64, f64)> {
        (0..=50)
            .map(|i| {
                let p = p_max * i as f64 / 50.0;
                (p, f(p))
            })
            .collect()
    };
    let mut plot = Plot::new(
        "Triplet events and closeness wedge",
        "event probability under P",
        "event probability under Q",
    );
    plot.points("triplet events", &scatter);
    plot.line("wedge lower", &boundary(&|p| params.lower_bound(p)));
    plot.line("wedge upper", &boundary(&|p| params.upper_bound(p)));
    out::write_text(out_dir, "closeness.svg", &plot.render())?;

    let violations_truncated = report.violations.len() > MAX_LISTED_VIOLATIONS;
    report.violations.truncate(MAX_LISTED_VIOLATIONS);
    let payload = Payload {
        matrix_p: mp.label().to_string(),
        matrix_q: mq.label().to_string(),
        n_models: mp.n_models(),
        n_points: points.len(),
        mode,
        violations_truncated,
        report,
    };
    out::emit_json(out_dir, "closeness.json", command_line, None, &payload)?;
    Ok(())
}
