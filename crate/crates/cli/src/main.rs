//! Command-line front end for the paired-evaluation analysis library:
//! dominance tables, closeness wedges, residual bounds, trend fits, feasible
//! bands, fixture generation, and a combined report.
//!
//! Exit codes: 0 on success, 1 when an analysis is infeasible on the given
//! data (degenerate fits, empty accuracy spans, unsatisfiable constraints),
//! 2 on input errors (unreadable files, malformed CSV, bad flags).

mod args;
mod commands;
mod out;
mod plot;

use clap::Parser;

use crate::args::Cli;

/// Honors a `COLLAB_THREADS` cap on the worker pool before any parallel
/// analysis starts.
fn configure_threads() {
    if let Ok(value) = std::env::var("COLLAB_THREADS") {
        match value.trim().parse::<usize>() {
            Ok(threads) if threads > 0 => {
                if let Err(error) = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global()
                {
                    log::warn!("could not apply COLLAB_THREADS={threads}: {error}");
                }
            }
            _ => log::warn!("ignoring COLLAB_THREADS={value:?}: not a positive integer"),
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    configure_threads();

    let command_line: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();

    if let Err(error) = commands::dispatch(&cli, &command_line.join(" ")) {
        eprintln!("error: {error}");
        std::process::exit(if error.is_infeasibility() { 1 } else { 2 });
    }
}
