//! `band`: feasible accuracy band between anchor models and its lower
//! envelope, under wedge and dominance budgets.

use std::fmt::Write as _;
use std::path::Path;

use driftline::bounds::{feasible_band, BandPoint};
use driftline::closeness::ClosenessParams;
use driftline::Result;
use serde::Serialize;

use crate::args::{parse_anchor, BandArgs};
use crate::commands::linspace;
use crate::out;
use crate::plot::Plot;

#[derive(Serialize)]
struct Payload {
    anchors: Vec<(f64, f64)>,
    params: ClosenessParams,
    zeta: f64,
    band: Vec<BandPoint>,
}

pub fn run(out_dir: &Path, args: &BandArgs, command_line: &str) -> Result<()> {
    let params = args.wedge.to_params()?;
    let mut anchors = args
        .anchors
        .iter()
        .map(|text| parse_anchor(text))
        .collect::<Result<Vec<_>>>()?;
    anchors.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let lo = anchors.first().map(|a| a.0).unwrap_or(0.0);
    let hi = anchors.last().map(|a| a.0).unwrap_or(1.0);
    let grid = linspace(lo, hi, args.grid_points)?;
    let band = feasible_band(&anchors, &params, args.zeta, &grid)?;

    let mut csv = String::from("mu_p,lower,upper\n");
    for point in &band {
        let _ = writeln!(csv, "{},{},{}", point.mu_p, point.lower, point.upper);
    }
    out::write_text(out_dir, "band.csv", &csv)?;

    let lower: Vec<(f64, f64)> = band.iter().map(|b| (b.mu_p, b.lower)).collect();
    let upper: Vec<(f64, f64)> = band.iter().map(|b| (b.mu_p, b.upper)).collect();
    let mut plot = Plot::new(
        "Feasible accuracy band",
        "accuracy under P",
        "accuracy under Q",
    );
    plot.points("anchors", &anchors);
    plot.line("lower envelope", &lower);
    plot.line("upper envelope", &upper);
    out::write_text(out_dir, "band.svg", &plot.render())?;

    let payload = Payload {
        anchors,
        params,
        zeta: args.zeta,
        band,
    };
    out::emit_json(out_dir, "band.json", command_line, None, &payload)?;
    Ok(())
}
