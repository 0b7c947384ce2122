//! One module per subcommand. Each loads its inputs, runs the corresponding
//! library analysis, prints a JSON envelope to stdout, and mirrors the
//! document (plus any CSV/SVG artifacts) into the output directory.

pub mod band;
pub mod bound;
pub mod closeness;
pub mod dominance;
pub mod gridbound;
pub mod report;
pub mod scenario;
pub mod trend;

use driftline::{Error, Result};

use crate::args::{Cli, Command};

pub fn dispatch(cli: &Cli, command_line: &str) -> Result<()> {
    match &cli.command {
        Command::Dominance(args) => dominance::run(&cli.out, args, command_line),
        Command::Closeness(args) => closeness::run(&cli.out, args, command_line),
        Command::Bound(args) => bound::run(&cli.out, args, command_line),
        Command::GridBound(args) => gridbound::run(&cli.out, args, command_line),
        Command::Trend(args) => trend::run(&cli.out, args, command_line),
        Command::Band(args) => band::run(&cli.out, args, command_line),
        Command::Scenario(args) => scenario::run(&cli.out, args, command_line),
        Command::Report(args) => report::run(&cli.out, args, command_line),
    }
}

/// Exactly three comma-separated accuracies, as an array.
pub(crate) fn mu_triple(mu: &[f64]) -> Result<[f64; 3]> {
    match mu {
        [a, b, c] => Ok([*a, *b, *c]),
        other => Err(Error::InvalidInput(format!(
            "--mu needs exactly 3 comma-separated accuracies, found {}",
            other.len()
        ))),
    }
}

/// `count` evenly spaced values covering `[lo, hi]` inclusive.
pub(crate) fn linspace(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::InvalidInput(format!(
            "a grid needs at least 2 points, found {count}"
        )));
    }
    // Pin both endpoints: accumulated rounding must not push the final
    // value past `hi` (downstream hull checks are exact).
    Ok((0..count)
        .map(|i| {
            if i == count - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (count - 1) as f64
            }
        })
        .collect())
}
