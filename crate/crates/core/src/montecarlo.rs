//! Replication engine for coverage and normality checks.
//!
//! Each replication simulates one path on its own random streams, computes
//! the feasible z-statistic of every requested quantity against its true
//! value, and stores it in the slot of its replication index. Reports are
//! therefore identical for any number of worker threads.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::NoiseEstimator;
use crate::exec::{map_indices, Execution};
use crate::index::IndexTuple;
use crate::inference::{autocor_estimate, autocov_estimate, moment_estimate, Estimate, DEFAULT_LEVEL};
use crate::normal;
use crate::oracle::{ar1_autocor, ar1_autocov, gaussian_joint_moment, CovarianceFunction};
use crate::series::NoiseRegime;
use crate::simulator::{simulate_replication, SimulatedPath, SimulationConfig};
use crate::ticks::format_f64;
use crate::windows::TuningWindows;

/// Levels reported in every coverage map.
pub const COVERAGE_LEVELS: [f64; 4] = [0.8, 0.9, 0.95, 0.99];

/// Quantity whose standardized estimate is collected.
///
/// Under the grid regime moments and covariances are the integrated versions
/// and correlations are ratios of integrated covariances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Statistic {
    Moment { tuple: IndexTuple },
    Autocov { lag: usize },
    Autocor { lag: usize },
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Moment { tuple } => write!(f, "moment{tuple}"),
            Statistic::Autocov { lag } => write!(f, "autocov({lag})"),
            Statistic::Autocor { lag } => write!(f, "autocor({lag})"),
        }
    }
}

/// Standardized statistics of one quantity over all replications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub statistic: Statistic,
    pub regime: NoiseRegime,
    pub windows: TuningWindows,
    pub replications: usize,
    /// Replications whose statistic was undefined, not part of `sample`.
    pub excluded: usize,
    pub exclusion_reasons: BTreeMap<String, usize>,
    /// z-statistics in replication order.
    pub sample: Vec<f64>,
    /// Point estimates of the retained replications, same order as `sample`.
    pub estimates: Vec<f64>,
    pub sample_mean: Option<f64>,
    pub sample_sd: Option<f64>,
    pub coverage: BTreeMap<String, f64>,
    pub qq: Vec<(f64, f64)>,
    pub ks: Option<f64>,
    /// Asymptotic 1% critical value of the KS distance for this sample size.
    pub ks_critical_1pct: Option<f64>,
}

impl McReport {
    pub fn coverage_at(&self, level: f64) -> Option<f64> {
        self.coverage.get(&level_key(level)).copied()
    }

    pub fn exclusion_rate(&self) -> f64 {
        if self.replications == 0 {
            0.0
        } else {
            self.excluded as f64 / self.replications as f64
        }
    }

    fn from_outcomes(
        statistic: Statistic,
        regime: NoiseRegime,
        windows: TuningWindows,
        outcomes: &[Outcome],
    ) -> Result<Self> {
        let mut sample = Vec::new();
        let mut estimates = Vec::new();
        let mut exclusion_reasons = BTreeMap::new();
        for o in outcomes {
            match o {
                Outcome::Kept { z, point } => {
                    sample.push(*z);
                    estimates.push(*point);
                }
                Outcome::Excluded(reason) => *exclusion_reasons.entry(reason.clone()).or_insert(0) += 1,
            }
        }
        let mut coverage_map = BTreeMap::new();
        let (mut qq, mut ks, mut ks_crit, mut mean, mut sd) = (Vec::new(), None, None, None, None);
        if !sample.is_empty() {
            for level in COVERAGE_LEVELS {
                coverage_map.insert(level_key(level), coverage(&sample, level)?);
            }
            qq = qq_data(&sample)?;
            ks = Some(ks_normal(&sample)?);
            ks_crit = Some(ks_critical_1pct(sample.len()));
            let m = sample.iter().sum::<f64>() / sample.len() as f64;
            mean = Some(m);
            if sample.len() > 1 {
                let ss: f64 = sample.iter().map(|z| (z - m) * (z - m)).sum();
                sd = Some((ss / (sample.len() - 1) as f64).sqrt());
            }
        }
        Ok(McReport {
            statistic,
            regime,
            windows,
            replications: outcomes.len(),
            excluded: outcomes.len() - sample.len(),
            exclusion_reasons,
            sample,
            estimates,
            sample_mean: mean,
            sample_sd: sd,
            coverage: coverage_map,
            qq,
            ks,
            ks_critical_1pct: ks_crit,
        })
    }
}

fn level_key(level: f64) -> String {
    format!("{level}")
}

#[derive(Clone, Debug)]
enum Outcome {
    Kept { z: f64, point: f64 },
    Excluded(String),
}

/// True value of `statistic` on a simulated path.
///
/// Independent noise uses the AR(1) values. On a grid, moments of order `q`
/// are multiplied by the path's Riemann sum of `gamma^q`.
pub fn true_value(statistic: &Statistic, config: &SimulationConfig, path: &SimulatedPath) -> Result<f64> {
    let scale = |q: usize| -> Result<f64> {
        match config.regime {
            NoiseRegime::Independent => Ok(1.0),
            NoiseRegime::Scaled => path.gamma_integral(q as i32).ok_or(Error::MissingLatent),
        }
    };
    match statistic {
        Statistic::Moment { tuple } => {
            let cov = CovarianceFunction::ar1(config.phi, config.sigma0)?;
            Ok(gaussian_joint_moment(tuple, &cov)? * scale(tuple.len())?)
        }
        Statistic::Autocov { lag } => Ok(ar1_autocov(config.phi, config.sigma0, *lag as i64)? * scale(2)?),
        Statistic::Autocor { lag } => ar1_autocor(config.phi, *lag as i64),
    }
}

/// Estimate of `statistic` centred at `truth`.
pub fn standardized_estimate(
    est: &NoiseEstimator<'_>,
    statistic: &Statistic,
    regime: NoiseRegime,
    truth: f64,
) -> Result<Estimate> {
    match statistic {
        Statistic::Moment { tuple } => moment_estimate(est, tuple, regime, truth, DEFAULT_LEVEL),
        Statistic::Autocov { lag } => autocov_estimate(est, *lag, regime, truth, DEFAULT_LEVEL),
        Statistic::Autocor { lag } => autocor_estimate(est, *lag, regime, truth, DEFAULT_LEVEL),
    }
}

fn replicate(
    config: &SimulationConfig,
    windows: TuningWindows,
    statistics: &[Statistic],
    rep: usize,
) -> Vec<Outcome> {
    let path = match simulate_replication(config, rep as u64) {
        Ok(p) => p,
        Err(e) => return vec![Outcome::Excluded(format!("simulation: {e}")); statistics.len()],
    };
    let est = NoiseEstimator::new(&path.series, windows).with_execution(Execution::Sequential);
    statistics
        .iter()
        .map(|s| {
            let outcome = true_value(s, config, &path)
                .and_then(|truth| standardized_estimate(&est, s, config.regime, truth));
            match outcome {
                Ok(e) => match e.z {
                    Some(z) => Outcome::Kept { z, point: e.point },
                    None => Outcome::Excluded(
                        e.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>().join("|"),
                    ),
                },
                Err(err) => Outcome::Excluded(err.to_string()),
            }
        })
        .collect()
}

/// One report per statistic over `m` replications, using all worker threads.
pub fn run_replications(
    config: &SimulationConfig,
    windows: TuningWindows,
    statistics: &[Statistic],
    m: usize,
) -> Result<Vec<McReport>> {
    run_replications_with(config, windows, statistics, m, Execution::default())
}

pub fn run_replications_with(
    config: &SimulationConfig,
    windows: TuningWindows,
    statistics: &[Statistic],
    m: usize,
    exec: Execution,
) -> Result<Vec<McReport>> {
    config.validate()?;
    if m == 0 {
        return Err(Error::InvalidArgument("at least one replication is required".into()));
    }
    let per_rep = map_indices(m, exec, |rep| replicate(config, windows, statistics, rep));
    statistics
        .iter()
        .enumerate()
        .map(|(s, stat)| {
            let outcomes: Vec<Outcome> = per_rep.iter().map(|row| row[s].clone()).collect();
            McReport::from_outcomes(stat.clone(), config.regime, windows, &outcomes)
        })
        .collect()
}

fn sorted(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// Pairs `(Phi^{-1}((i - 0.5)/M), z_(i))` of the sorted sample.
pub fn qq_data(sample: &[f64]) -> Result<Vec<(f64, f64)>> {
    let s = sorted(sample)?;
    let m = s.len() as f64;
    Ok(s
        .into_iter()
        .enumerate()
        .map(|(i, z)| (normal::quantile((i as f64 + 0.5) / m), z))
        .collect())
}

/// Fraction of `|z| <= z_{(1+level)/2}`.
pub fn coverage(sample: &[f64], level: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(0.0..=1.0).contains(&level) {
        return Err(Error::InvalidArgument(format!("level {level} must lie in [0, 1]")));
    }
    let crit = normal::two_sided_critical(level);
    let inside = sample.iter().filter(|z| z.abs() <= crit).count();
    Ok(inside as f64 / sample.len() as f64)
}

/// Kolmogorov-Smirnov distance between the sample and a continuous cdf.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let s = sorted(sample)?;
    let m = s.len() as f64;
    Ok(s.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / m - f).max(f - i as f64 / m)
    }))
}

pub fn ks_normal(sample: &[f64]) -> Result<f64> {
    ks_distance(sample, normal::cdf)
}

pub fn ks_uniform(sample: &[f64]) -> Result<f64> {
    ks_distance(sample, |x| x.clamp(0.0, 1.0))
}

/// `sqrt(-ln(0.005)/2) / sqrt(m)`, the large-sample 1% KS critical value.
pub fn ks_critical_1pct(m: usize) -> f64 {
    (-(0.005f64).ln() / 2.0).sqrt() / (m as f64).sqrt()
}

/// `theoretical,empirical` rows.
pub fn write_qq_csv<W: Write>(report: &McReport, mut w: W) -> std::io::Result<()> {
    writeln!(w, "theoretical,empirical")?;
    for (t, e) in &report.qq {
        writeln!(w, "{},{}", format_f64(*t), format_f64(*e))?;
    }
    Ok(())
}

/// `level,coverage` rows.
pub fn write_coverage_csv<W: Write>(report: &McReport, mut w: W) -> std::io::Result<()> {
    writeln!(w, "level,coverage")?;
    for level in COVERAGE_LEVELS {
        if let Some(c) = report.coverage_at(level) {
            writeln!(w, "{level},{}", format_f64(c))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn qq_examples() {
        assert_eq!(qq_data(&[3.0]).unwrap(), vec![(0.0, 3.0)]);
        assert_eq!(qq_data(&[]).unwrap_err(), Error::EmptySample);
        let qq = qq_data(&normals(10_000, 1)).unwrap();
        assert!(qq.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
        // the extreme order statistics scatter widely, compare the central bulk
        let gap = qq[100..9900].iter().map(|(t, e)| (t - e).abs()).fold(0.0, f64::max);
        assert!(gap < 0.1, "{gap}");
    }

    #[test]
    fn coverage_examples() {
        assert_eq!(coverage(&[0.0; 5], 0.95).unwrap(), 1.0);
        assert_eq!(coverage(&[5.0, -7.0], 1.0).unwrap(), 1.0);
        assert_eq!(coverage(&[], 0.95).unwrap_err(), Error::EmptySample);
        let c = coverage(&normals(100_000, 2), 0.95).unwrap();
        assert!((c - 0.95).abs() < 0.005, "{c}");
    }

    #[test]
    fn ks_examples() {
        assert!((ks_uniform(&[0.5]).unwrap() - 0.5).abs() < 1e-15);
        let d = ks_normal(&normals(2000, 3)).unwrap();
        assert!(d < ks_critical_1pct(2000), "{d}");
        let shifted: Vec<f64> = normals(2000, 3).iter().map(|z| z + 0.5).collect();
        assert!(ks_normal(&shifted).unwrap() > 0.1);
        assert!((ks_critical_1pct(400) - 0.0814).abs() < 1e-3);
    }

    #[test]
    fn degenerate_dynamics_exclude_everything() {
        let mut cfg = SimulationConfig::reference_irregular(500, 1).noise_only();
        cfg.sigma0 = 0.0;
        let reports = run_replications(&cfg, TuningWindows::default(), &[Statistic::Autocov { lag: 1 }], 1).unwrap();
        let r = &reports[0];
        assert_eq!((r.replications, r.excluded), (1, 1));
        assert!(r.sample.is_empty() && r.coverage.is_empty() && r.ks.is_none());
        assert_eq!(run_replications(&cfg, TuningWindows::default(), &[], 0).unwrap_err().to_string(),
            Error::InvalidArgument("at least one replication is required".into()).to_string());
    }

    #[test]
    fn reports_do_not_depend_on_execution() {
        let cfg = SimulationConfig::reference_regular(2000, 9).rescaled_to(2000);
        let stats = [Statistic::Autocov { lag: 0 }, Statistic::Autocor { lag: 3 }];
        let w = TuningWindows::default();
        let a = run_replications_with(&cfg, w, &stats, 12, Execution::Sequential).unwrap();
        let b = run_replications_with(&cfg, w, &stats, 12, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert_eq!(r.excluded + r.sample.len(), r.replications);
            assert_eq!(r.coverage.len(), COVERAGE_LEVELS.len(), "{:?}", r.exclusion_reasons);
        }
        let mut csv = Vec::new();
        write_coverage_csv(&a[0], &mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("level,coverage\n0.8,"));
    }

    proptest! {
        #[test]
        fn coverage_is_monotone(sample in proptest::collection::vec(-5.0f64..5.0, 1..50),
                                a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(coverage(&sample, lo).unwrap() <= coverage(&sample, hi).unwrap());
        }

        #[test]
        fn ks_is_a_distance(sample in proptest::collection::vec(-5.0f64..5.0, 1..50)) {
            let d = ks_normal(&sample).unwrap();
            prop_assert!((0.0..=1.0).contains(&d));
        }
    }
}
