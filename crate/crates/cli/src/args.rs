use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use noisemoments::{NoiseRegime, SimulationConfig, TuningWindows, WindowRule};
use serde::Serialize;

use crate::Failure;

/// Estimate moments of market microstructure noise from tick data.
#[derive(Parser, Debug)]
#[command(name = "noisemoments", version, about)]
pub struct Cli {
    /// Only print errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Auto-covariances and auto-correlations of the noise in a tick file.
    Estimate(EstimateArgs),
    /// Simulate a price path with AR(1) noise and export it as ticks.
    Simulate(SimulateArgs),
    /// Monte Carlo coverage and normality report.
    Mc(McArgs),
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// CSV with header `time,price` or `time,logprice`.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Treat the price column as log-prices.
    #[arg(long)]
    pub log_prices: bool,
    #[arg(long, value_enum, default_value_t = RegimeChoice::Auto)]
    pub regime: RegimeChoice,
    /// Lags, e.g. `0-30`, `1,2,5` or `0-3,10`. Empty for none.
    #[arg(long, default_value = "0-30", value_parser = parse_lags)]
    pub lags: Lags,
    #[command(flatten)]
    pub windows: WindowArgs,
    /// Confidence level of the bands.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Output prefix: writes PREFIX_cov.csv, PREFIX_cor.csv and PREFIX.json.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    /// Output prefix: writes PREFIX.csv (ticks) and PREFIX.json.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also report infeasible noise auto-covariances up to this lag.
    #[arg(long)]
    pub infeasible: Option<usize>,
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[command(flatten)]
    pub design: DesignArgs,
    /// Number of replications.
    #[arg(short = 'm', long, default_value_t = 400)]
    pub replications: usize,
    /// Lags for covariance statistics; correlations use the positive ones.
    #[arg(long, default_value = "0-4", value_parser = parse_lags)]
    pub lags: Lags,
    #[command(flatten)]
    pub windows: WindowArgs,
    /// Output prefix: writes PREFIX.json and per-statistic qq/coverage CSVs.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeChoice {
    /// Grid regime when times form an exact grid, else independent noise.
    Auto,
    /// Independent noise at irregular times.
    No1,
    /// Noise scaled by a volatility-like process on a regular grid.
    No2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SimRegime {
    No1,
    No2,
}

impl From<SimRegime> for NoiseRegime {
    fn from(r: SimRegime) -> Self {
        match r {
            SimRegime::No1 => NoiseRegime::Independent,
            SimRegime::No2 => NoiseRegime::Scaled,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Lags(pub Vec<usize>);

pub fn parse_lags(s: &str) -> Result<Lags, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad lag {x:?}"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty lag range {part}"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    Ok(Lags(out))
}

#[derive(Args, Debug, Clone)]
pub struct WindowArgs {
    /// Block length k_n; replaces the automatic rule.
    #[arg(long, conflicts_with_all = ["eta", "eta_p", "v_lower", "c", "c_p"])]
    pub kn: Option<usize>,
    /// Truncation lag k'_n of the variance estimators (default min(4, k_n)).
    #[arg(long, requires = "kn")]
    pub kpn: Option<usize>,
    /// Rule exponent: k_n = c N^eta.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub eta: f64,
    /// Rule exponent: k'_n = c' N^eta'.
    #[arg(long, default_value_t = 0.15)]
    pub eta_p: f64,
    /// Mixing rate assumed by the rule.
    #[arg(long, default_value_t = 2.0)]
    pub v_lower: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_p: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolvedWindows {
    pub k_n: usize,
    pub kp_n: usize,
    /// `explicit` or `auto`.
    pub source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<WindowRule>,
}

impl WindowArgs {
    pub fn resolve(&self, n: usize) -> Result<ResolvedWindows, Failure> {
        match self.kn {
            Some(k) => {
                let kp = self.kpn.unwrap_or(k.min(TuningWindows::default().kp_n));
                let w = TuningWindows::new(k, kp)?;
                Ok(ResolvedWindows {
                    k_n: w.k_n,
                    kp_n: w.kp_n,
                    source: "explicit",
                    rule: None,
                })
            }
            None => {
                let rule = WindowRule {
                    v_lower: self.v_lower,
                    eta: self.eta,
                    eta_p: self.eta_p,
                    c: self.c,
                    c_p: self.c_p,
                };
                let w = rule.choose(n)?;
                Ok(ResolvedWindows {
                    k_n: w.k_n,
                    kp_n: w.kp_n,
                    source: "auto",
                    rule: Some(rule),
                })
            }
        }
    }
}

impl ResolvedWindows {
    pub fn windows(&self) -> TuningWindows {
        TuningWindows {
            k_n: self.k_n,
            kp_n: self.kp_n,
        }
    }
}

/// Simulation design, starting from the reference parameter set.
#[derive(Args, Debug, Clone)]
pub struct DesignArgs {
    /// Observations per path.
    #[arg(short, long, default_value_t = 93_600)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SimRegime::No1)]
    pub regime: SimRegime,
    /// Keep the reference per-observation dynamics at this n (rates and
    /// diffusion coefficients follow the shorter time span).
    #[arg(long)]
    pub rescale: bool,
    /// Drop the latent price (no diffusion, no jumps).
    #[arg(long)]
    pub noise_only: bool,
    /// AR(1) coefficient of the noise.
    #[arg(long)]
    pub phi: Option<f64>,
    /// Innovation standard deviation of the noise.
    #[arg(long)]
    pub sigma0: Option<f64>,
}

impl DesignArgs {
    pub fn config(&self) -> Result<SimulationConfig, Failure> {
        let mut cfg = match self.regime {
            SimRegime::No1 => SimulationConfig::reference_irregular(self.n, self.seed),
            SimRegime::No2 => SimulationConfig::reference_regular(self.n, self.seed),
        };
        if self.rescale {
            cfg = cfg.rescaled_to(self.n);
        }
        if self.noise_only {
            cfg = cfg.noise_only();
        }
        if let Some(phi) = self.phi {
            cfg.phi = phi;
        }
        if let Some(s) = self.sigma0 {
            cfg.sigma0 = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `PREFIX` + `suffix` as a path.
pub fn with_suffix(prefix: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
