//! `grid-bound`: numerical residual maximization over gridded source cells
//! under dominance and wedge budgets.

use std::path::Path;

use driftline::gridbound::{max_residual_grid, GridSearchConfig, GridSearchOutcome};
use driftline::Result;
use serde::Serialize;

use crate::args::GridBoundArgs;
use crate::commands::mu_triple;
use crate::out;

#[derive(Serialize)]
struct Payload {
    config: GridSearchConfig,
    outcome: GridSearchOutcome,
}

pub fn run(out_dir: &Path, args: &GridBoundArgs, command_line: &str) -> Result<()> {
    let params = args.wedge.to_params()?;
    let config = GridSearchConfig::new(args.zeta, mu_triple(&args.mu)?, params)?
        .with_p_grid_step(args.p_step)?
        .with_q_grid_points(args.q_points)?;
    let outcome = max_residual_grid(&config)?;
    let payload = Payload { config, outcome };
    out::emit_json(out_dir, "grid_bound.json", command_line, None, &payload)?;
    Ok(())
}
