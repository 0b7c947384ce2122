//! `dominance`: pairwise dominance probabilities of one correctness matrix.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use driftline::corrdata::CorrectnessMatrix;
use driftline::events::{dominance_table, DominanceReport};
use driftline::Result;
use serde::Serialize;

use crate::args::DominanceArgs;
use crate::out;
use crate::plot::Plot;

#[derive(Serialize)]
struct Payload {
    matrix: String,
    n_models: usize,
    n_examples: usize,
    model_accuracies: BTreeMap<String, f64>,
    dominance: DominanceReport,
}

pub fn run(out_dir: &Path, args: &DominanceArgs, command_line: &str) -> Result<()> {
    let matrix = CorrectnessMatrix::load(&args.matrix)?;
    let mut report = dominance_table(&matrix)?;
    if args.threshold != report.threshold {
        report.threshold = args.threshold;
        report.fraction_below_threshold = report
            .pairs
            .iter()
            .filter(|pair| pair.dominance <= args.threshold)
            .count() as f64
            / report.pairs.len() as f64;
    }

    let mut csv = String::from("lower,higher,mu_lower,mu_higher,gap,dominance,similarity\n");
    for pair in &report.pairs {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            pair.lower,
            pair.higher,
            pair.mu_lower,
            pair.mu_higher,
            pair.gap,
            pair.dominance,
            pair.similarity
        );
    }
    out::write_text(out_dir, "dominance_pairs.csv", &csv)?;

    let scatter: Vec<(f64, f64)> = report.pairs.iter().map(|p| (p.gap, p.dominance)).collect();
    let mut plot = Plot::new(
        "Dominance vs. accuracy gap",
        "accuracy gap (higher - lower)",
        "P[lower correct, higher wrong]",
    );
    plot.points("model pairs", &scatter);
    out::write_text(out_dir, "dominance.svg", &plot.render())?;

    let payload = Payload {
        matrix: matrix.label().to_string(),
        n_models: matrix.n_models(),
        n_examples: matrix.n_examples(),
        model_accuracies: matrix
            .model_names()
            .iter()
            .cloned()
            .zip(matrix.accuracies())
            .collect(),
        dominance: report,
    };
    out::emit_json(out_dir, "dominance.json", command_line, None, &payload)?;
    Ok(())
}
