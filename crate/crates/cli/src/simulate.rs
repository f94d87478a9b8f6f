use noisemoments::simulator::{infeasible_estimates, simulate_path, InfeasibleRow};
use noisemoments::ticks::write_ticks_path;
use noisemoments::SimulationConfig;
use serde::Serialize;

use crate::args::{with_suffix, SimulateArgs};
use crate::output::write_json;
use crate::Failure;

#[derive(Serialize)]
struct Report<'a> {
    version: &'static str,
    config: &'a SimulationConfig,
    rescaled: bool,
    observations: usize,
    n_jumps: usize,
    gamma_integral_2: Option<f64>,
    gamma_integral_4: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    infeasible: Option<Vec<InfeasibleRow>>,
}

pub fn run(args: &SimulateArgs) -> Result<(), Failure> {
    let config = args.design.config()?;
    let path = simulate_path(&config)?;
    write_ticks_path(&path.series, with_suffix(&args.output, ".csv"))?;
    let infeasible = args.infeasible.map(|j| infeasible_estimates(&path, j)).transpose()?;
    let report = Report {
        version: env!("CARGO_PKG_VERSION"),
        config: &config,
        rescaled: args.design.rescale,
        observations: path.series.len(),
        n_jumps: path.latent.n_jumps,
        gamma_integral_2: path.gamma_integral(2),
        gamma_integral_4: path.gamma_integral(4),
        infeasible,
    };
    write_json(&with_suffix(&args.output, ".json"), &report)
}
