//! `scenario`: emits built-in fixtures — planted two-distribution examples
//! with their expected analysis values, exactly nested chains, and matrices
//! sampled from independent per-model correctness.

use std::collections::BTreeMap;
use std::path::Path;

use driftline::corrdata::CorrectnessMatrix;
use driftline::events::TripletDistribution;
use driftline::synth::{
    example1, example2, independent_triplet, ordered_chain, sample_matrix, PlantedScenario,
    RNG_ALGORITHM,
};
use driftline::{Error, Result};
use serde::Serialize;

use crate::args::{ScenarioArgs, ScenarioName};
use crate::out::{self, RngInfo};

#[derive(Serialize)]
struct PlantedPayload<'a> {
    scenario: &'a PlantedScenario,
    n_examples: usize,
    seed: u64,
    /// CSV matrices sampled from the two distributions; the second uses
    /// `seed + 1` so the draws are independent.
    files: Vec<String>,
}

#[derive(Serialize)]
struct MatrixPayload {
    name: String,
    accuracies: Vec<f64>,
    n_examples: usize,
    seed: u64,
    model_accuracies: BTreeMap<String, f64>,
    file: String,
}

fn emit_planted(
    out_dir: &Path,
    scenario: &PlantedScenario,
    args: &ScenarioArgs,
    command_line: &str,
) -> Result<()> {
    let sample = |t: &TripletDistribution, seed: u64| -> Result<CorrectnessMatrix> {
        sample_matrix(t, args.n, seed)
    };
    let matrix_p = sample(&scenario.p, args.seed)?;
    let matrix_q = sample(&scenario.q, args.seed.wrapping_add(1))?;
    out::write_text(out_dir, "scenario_p.csv", &matrix_p.to_csv())?;
    out::write_text(out_dir, "scenario_q.csv", &matrix_q.to_csv())?;
    let payload = PlantedPayload {
        scenario,
        n_examples: args.n,
        seed: args.seed,
        files: vec!["scenario_p.csv".into(), "scenario_q.csv".into()],
    };
    out::emit_json(
        out_dir,
        "scenario.json",
        command_line,
        Some(RngInfo {
            algorithm: RNG_ALGORITHM,
            seed: args.seed,
        }),
        &payload,
    )?;
    Ok(())
}

fn emit_matrix(
    out_dir: &Path,
    name: &str,
    matrix: &CorrectnessMatrix,
    args: &ScenarioArgs,
    command_line: &str,
) -> Result<()> {
    out::write_text(out_dir, "matrix.csv", &matrix.to_csv())?;
    let payload = MatrixPayload {
        name: name.to_string(),
        accuracies: args.accuracies.clone(),
        n_examples: matrix.n_examples(),
        seed: args.seed,
        model_accuracies: matrix
            .model_names()
            .iter()
            .cloned()
            .zip(matrix.accuracies())
            .collect(),
        file: "matrix.csv".into(),
    };
    out::emit_json(
        out_dir,
        "scenario.json",
        command_line,
        Some(RngInfo {
            algorithm: RNG_ALGORITHM,
            seed: args.seed,
        }),
        &payload,
    )?;
    Ok(())
}

pub fn run(out_dir: &Path, args: &ScenarioArgs, command_line: &str) -> Result<()> {
    match args.name {
        ScenarioName::Example1 => emit_planted(out_dir, &example1(), args, command_line),
        ScenarioName::Example2 => emit_planted(out_dir, &example2(), args, command_line),
        ScenarioName::Ordered => {
            let matrix = ordered_chain(&args.accuracies, args.n, args.seed)?;
            emit_matrix(out_dir, "ordered", &matrix, args, command_line)
        }
        ScenarioName::Independent => {
            if args.accuracies.len() != 3 {
                return Err(Error::InvalidInput(format!(
                    "the independent scenario needs exactly 3 accuracies, found {}",
                    args.accuracies.len()
                )));
            }
            let triplet =
                independent_triplet(args.accuracies[0], args.accuracies[1], args.accuracies[2])?;
            let matrix = sample_matrix(&triplet, args.n, args.seed)?;
            emit_matrix(out_dir, "independent", &matrix, args, command_line)
        }
    }
}
