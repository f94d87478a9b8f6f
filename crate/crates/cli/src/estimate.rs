use noisemoments::exec::{map_indices, Execution};
use noisemoments::inference::{autocor_estimate, autocov_estimate};
use noisemoments::ticks::read_ticks_path;
use log::warn;
use noisemoments::{Error, IndexTuple, NoiseEstimator, NoiseRegime, ObservationSeries};
use serde::Serialize;

use crate::args::{with_suffix, EstimateArgs, RegimeChoice, ResolvedWindows};
use crate::output::{write_json, write_table, Row};
use crate::{Failure, EXIT_DEGENERATE, EXIT_OK};

#[derive(Serialize)]
struct RunInfo<'a> {
    version: &'static str,
    input: String,
    log_prices: bool,
    regime: NoiseRegime,
    regime_choice: RegimeChoice,
    observations: usize,
    n_index: usize,
    horizon: f64,
    delta_n: Option<f64>,
    duplicates: usize,
    windows: &'a ResolvedWindows,
    level: f64,
    lags: &'a [usize],
}

#[derive(Serialize)]
struct Report<'a> {
    config: RunInfo<'a>,
    autocov: &'a [Row],
    autocor: &'a [Row],
    all_degenerate: bool,
}

/// Resolve the regime, attaching the grid spacing when needed.
fn resolve_regime(series: ObservationSeries, choice: RegimeChoice) -> Result<(ObservationSeries, NoiseRegime), Failure> {
    let grid = series.detect_grid();
    match (choice, grid) {
        (RegimeChoice::No1, _) | (RegimeChoice::Auto, None) => Ok((series, NoiseRegime::Independent)),
        (RegimeChoice::No2 | RegimeChoice::Auto, Some(delta)) => Ok((series.with_delta_n(delta)?, NoiseRegime::Scaled)),
        (RegimeChoice::No2, None) => Err(Error::RegimeMismatch.into()),
    }
}

pub fn run(args: &EstimateArgs) -> Result<u8, Failure> {
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(Failure::Usage(format!("--level {} must lie in (0, 1)", args.level)));
    }
    let ticks = read_ticks_path(&args.input, args.log_prices)?;
    let (series, regime) = resolve_regime(ticks.series, args.regime)?;
    let windows = args.windows.resolve(series.n_index())?;
    let est = NoiseEstimator::new(&series, windows.windows());
    let lags = &args.lags.0;
    let far: Vec<String> = lags
        .iter()
        .filter(|&&l| {
            let pair = IndexTuple::pair(l as i64);
            est.reach_exceeded(&pair, &pair)
        })
        .map(usize::to_string)
        .collect();
    if !far.is_empty() {
        warn!(
            "lags {} reach past 2 k_n = {} in the variance estimators; treat their z and p with care",
            far.join(","),
            2 * windows.k_n
        );
    }

    let cov: Vec<Result<Row, Error>> = map_indices(lags.len(), Execution::Parallel, |i| {
        autocov_estimate(&est, lags[i], regime, 0.0, args.level).map(|e| Row::new(lags[i], &e))
    });
    let cor: Vec<Result<Row, Error>> = map_indices(lags.len(), Execution::Parallel, |i| {
        autocor_estimate(&est, lags[i], regime, 0.0, args.level).map(|e| Row::new(lags[i], &e))
    });
    let cov = cov.into_iter().collect::<Result<Vec<_>, _>>()?;
    let cor = cor.into_iter().collect::<Result<Vec<_>, _>>()?;
    let all_degenerate = !lags.is_empty() && cov.iter().chain(&cor).all(Row::is_degenerate);

    write_table(&with_suffix(&args.output, "_cov.csv"), &cov)?;
    write_table(&with_suffix(&args.output, "_cor.csv"), &cor)?;
    let report = Report {
        config: RunInfo {
            version: env!("CARGO_PKG_VERSION"),
            input: args.input.display().to_string(),
            log_prices: args.log_prices,
            regime,
            regime_choice: args.regime,
            observations: series.len(),
            n_index: series.n_index(),
            horizon: series.horizon(),
            delta_n: series.delta_n(),
            duplicates: ticks.duplicates,
            windows: &windows,
            level: args.level,
            lags,
        },
        autocov: &cov,
        autocor: &cor,
        all_degenerate,
    };
    write_json(&with_suffix(&args.output, ".json"), &report)?;

    if all_degenerate {
        eprintln!("error: every lag is numerically degenerate");
        Ok(EXIT_DEGENERATE)
    } else {
        Ok(EXIT_OK)
    }
}
