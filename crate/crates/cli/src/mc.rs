use std::io::{BufWriter, Write};

use noisemoments::montecarlo::{run_replications, write_coverage_csv, write_qq_csv, McReport, Statistic};
use noisemoments::SimulationConfig;
use serde::Serialize;

use crate::args::{with_suffix, McArgs, ResolvedWindows};
use crate::output::{create, write_json};
use crate::Failure;

#[derive(Serialize)]
struct Report<'a> {
    version: &'static str,
    config: &'a SimulationConfig,
    rescaled: bool,
    replications: usize,
    windows: &'a ResolvedWindows,
    reports: &'a [McReport],
}

fn file_tag(s: &Statistic) -> String {
    match s {
        Statistic::Moment { tuple } => {
            let lags: Vec<String> = tuple.lags().iter().map(i64::to_string).collect();
            format!("moment{}", lags.join("-"))
        }
        Statistic::Autocov { lag } => format!("autocov{lag}"),
        Statistic::Autocor { lag } => format!("autocor{lag}"),
    }
}

pub fn run(args: &McArgs) -> Result<(), Failure> {
    let config = args.design.config()?;
    // the windows follow the nominal sample size; N_n(T) varies by path
    let windows = args.windows.resolve(config.n)?;
    let lags = &args.lags.0;
    let statistics: Vec<Statistic> = lags
        .iter()
        .map(|&lag| Statistic::Autocov { lag })
        .chain(lags.iter().filter(|&&l| l > 0).map(|&lag| Statistic::Autocor { lag }))
        .collect();
    let reports = run_replications(&config, windows.windows(), &statistics, args.replications)?;

    for r in &reports {
        let tag = file_tag(&r.statistic);
        let mut w = BufWriter::new(create(&with_suffix(&args.output, &format!("_{tag}_qq.csv")))?);
        write_qq_csv(r, &mut w)?;
        w.flush()?;
        let mut w = BufWriter::new(create(&with_suffix(&args.output, &format!("_{tag}_coverage.csv")))?);
        write_coverage_csv(r, &mut w)?;
        w.flush()?;
    }
    let report = Report {
        version: env!("CARGO_PKG_VERSION"),
        config: &config,
        rescaled: args.design.rescale,
        replications: args.replications,
        windows: &windows,
        reports: &reports,
    };
    write_json(&with_suffix(&args.output, ".json"), &report)
}
