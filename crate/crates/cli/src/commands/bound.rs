//! `bound`: closed-form residual bound for an ordered accuracy triple, plus
//! the position-independent range bound.

use std::path::Path;

use driftline::bounds::{corollary_bound, prop1_bound, BoundReport};
use driftline::closeness::ClosenessParams;
use driftline::Result;
use serde::Serialize;

use crate::args::BoundArgs;
use crate::commands::mu_triple;
use crate::out;

#[derive(Serialize)]
struct Payload {
    params: ClosenessParams,
    /// Bound for the middle model of the given triple.
    analytic: BoundReport,
    /// Bound valid wherever the middle model sits in `[mu_min, mu_max]`.
    range_bound: f64,
}

pub fn run(out_dir: &Path, args: &BoundArgs, command_line: &str) -> Result<()> {
    let params = args.wedge.to_params()?;
    let mu = mu_triple(&args.mu)?;
    let analytic = prop1_bound(mu[0], mu[1], mu[2], &params)?;
    let range_bound = corollary_bound(mu[0], mu[2], &params)?;
    let payload = Payload {
        params,
        analytic,
        range_bound,
    };
    out::emit_json(out_dir, "bound.json", command_line, None, &payload)?;
    Ok(())
}
