//! Feasible z-statistics, p-values and confidence bands.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::NoiseEstimator;
use crate::index::IndexTuple;
use crate::normal;
use crate::series::{NoiseRegime, ObservationSeries};
use crate::windows::TuningWindows;

pub const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sided {
    /// Null `theta <= theta_0`, rejected for large positive z.
    One,
    Two,
}

/// Which quantity an [`Estimate`] refers to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    /// Joint moment `R(j)` (scaled by `int gamma^q` under the scaled regime).
    Moment { tuple: IndexTuple },
    /// Auto-covariance `r(j)`.
    Autocov { lag: usize },
    /// Auto-correlation `Cor(j)`.
    Autocor { lag: usize },
    /// Integrated auto-covariance `r(j) int_0^T gamma^2`.
    IntegratedAutocov { lag: usize },
    /// Auto-correlation estimated from integrated covariances.
    ScaledAutocor { lag: usize },
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Moment { tuple } => write!(f, "R{tuple}"),
            Target::Autocov { lag } => write!(f, "r({lag})"),
            Target::Autocor { lag } => write!(f, "Cor({lag})"),
            Target::IntegratedAutocov { lag } => write!(f, "R({lag})_T"),
            Target::ScaledAutocor { lag } => write!(f, "Cor'({lag})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    NonPositiveVariance,
    EmptySum,
    ZeroDenominator,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::NonPositiveVariance => "non-positive-variance",
            Flag::EmptySum => "empty-sum",
            Flag::ZeroDenominator => "zero-denominator",
        }
    }
}

/// A point estimate with its feasible standardisation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub target: Target,
    pub regime: NoiseRegime,
    pub point: f64,
    pub null_value: f64,
    pub variance_est: f64,
    /// `N_n(T)` under independent noise, `1/Delta_n` on a regular grid.
    pub n_eff: f64,
    pub z: Option<f64>,
    pub p_two_sided: Option<f64>,
    pub p_one_sided: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub level: f64,
    pub flags: Vec<Flag>,
}

impl Estimate {
    pub fn is_degenerate(&self) -> bool {
        self.flags
            .iter()
            .any(|f| matches!(f, Flag::NonPositiveVariance | Flag::EmptySum))
    }

    pub fn standard_error(&self) -> f64 {
        (self.variance_est / self.n_eff).sqrt()
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        target: Target,
        regime: NoiseRegime,
        point: f64,
        variance_est: f64,
        n_eff: f64,
        null_value: f64,
        level: f64,
        mut flags: Vec<Flag>,
    ) -> Result<Self> {
        if !(variance_est > 0.0) || !variance_est.is_finite() {
            flags.push(Flag::NonPositiveVariance);
        }
        if !point.is_finite() {
            flags.push(Flag::EmptySum);
        }
        flags.sort();
        flags.dedup();
        let mut e = Estimate {
            target,
            regime,
            point,
            null_value,
            variance_est,
            n_eff,
            z: None,
            p_two_sided: None,
            p_one_sided: None,
            ci: None,
            level,
            flags,
        };
        if !e.is_degenerate() {
            let z = z_moment(point, null_value, variance_est, n_eff, regime)?;
            if z.is_finite() {
                e.z = Some(z);
                e.p_two_sided = Some(p_value(z, Sided::Two));
                e.p_one_sided = Some(p_value(z, Sided::One));
                e.ci = Some(conf_band_cov(point, variance_est, n_eff, level)?);
            }
        }
        Ok(e)
    }
}

fn check_variance(variance_est: f64, n_eff: f64) -> Result<()> {
    if !(variance_est > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "variance estimate must be positive, got {variance_est}"
        )));
    }
    if !(n_eff > 0.0) {
        return Err(Error::InvalidArgument(format!("n_eff must be positive, got {n_eff}")));
    }
    Ok(())
}

/// Feasible z-statistic of a moment-type estimate.
///
/// Independent noise: `sqrt(n_eff / V) (point - target)`.
/// Regular grid: `(point - target) / sqrt(Delta_n V)` with `Delta_n = 1/n_eff`.
pub fn z_moment(
    point: f64,
    target_value: f64,
    variance_est: f64,
    n_eff: f64,
    regime: NoiseRegime,
) -> Result<f64> {
    check_variance(variance_est, n_eff)?;
    Ok(match regime {
        NoiseRegime::Independent => (n_eff / variance_est).sqrt() * (point - target_value),
        NoiseRegime::Scaled => {
            let delta_n = 1.0 / n_eff;
            (point - target_value) / (delta_n * variance_est).sqrt()
        }
    })
}

pub fn p_value(z: f64, sided: Sided) -> f64 {
    match sided {
        Sided::Two => (2.0 * normal::sf(z.abs())).min(1.0),
        Sided::One => normal::sf(z),
    }
}

fn check_level(level: f64) -> Result<()> {
    if !(0.0..1.0).contains(&level) {
        return Err(Error::InvalidArgument(format!("level {level} must lie in [0, 1)")));
    }
    Ok(())
}

/// `r̂ ± z_{(1+level)/2} sqrt(Sigmâ / N)`.
pub fn conf_band_cov(r_hat: f64, sigma_hat: f64, n: f64, level: f64) -> Result<(f64, f64)> {
    check_variance(sigma_hat, n)?;
    check_level(level)?;
    let half = normal::two_sided_critical(level) * (sigma_hat / n).sqrt();
    Ok((r_hat - half, r_hat + half))
}

/// `Cor̂ ± z_{(1+level)/2} sqrt(Ŝ / N)`.
pub fn conf_band_cor(cor_hat: f64, s_hat: f64, n: f64, level: f64) -> Result<(f64, f64)> {
    conf_band_cov(cor_hat, s_hat, n, level)
}

fn lift<T>(r: Result<T>, flags: &mut Vec<Flag>, fallback: T) -> Result<T> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::EmptySum(_)) | Err(Error::NoObservations) => {
            flags.push(Flag::EmptySum);
            Ok(fallback)
        }
        Err(Error::ZeroDenominator) => {
            flags.push(Flag::ZeroDenominator);
            flags.push(Flag::NonPositiveVariance);
            Ok(fallback)
        }
        Err(e) => Err(e),
    }
}

fn n_eff(est: &NoiseEstimator<'_>, regime: NoiseRegime) -> Result<f64> {
    match regime {
        NoiseRegime::Independent => Ok(est.n_index() as f64),
        NoiseRegime::Scaled => Ok(1.0 / est.delta_n()?),
    }
}

/// Moment estimate `U(j)/N` or `Delta_n U(j)` standardised with `Sigmâ^{j,j}`.
pub fn moment_estimate(
    est: &NoiseEstimator<'_>,
    j: &IndexTuple,
    regime: NoiseRegime,
    null_value: f64,
    level: f64,
) -> Result<Estimate> {
    check_level(level)?;
    let n_eff = n_eff(est, regime)?;
    let mut flags = Vec::new();
    let u = est.u(j)?;
    if u.is_empty() {
        flags.push(Flag::EmptySum);
    }
    let point = match regime {
        NoiseRegime::Independent => u.value / n_eff,
        NoiseRegime::Scaled => est.delta_n()? * u.value,
    };
    let var = lift(est.sigma_hat(j, j, regime), &mut flags, f64::NAN)?;
    Estimate::assemble(
        Target::Moment { tuple: j.clone() },
        regime,
        point,
        var,
        n_eff,
        null_value,
        level,
        flags,
    )
}

/// Auto-covariance (independent noise) or integrated auto-covariance (grid).
pub fn autocov_estimate(
    est: &NoiseEstimator<'_>,
    lag: usize,
    regime: NoiseRegime,
    null_value: f64,
    level: f64,
) -> Result<Estimate> {
    check_level(level)?;
    let n_eff = n_eff(est, regime)?;
    let mut flags = Vec::new();
    if est.u(&IndexTuple::pair(lag as i64))?.is_empty() {
        flags.push(Flag::EmptySum);
    }
    let (target, point, var) = match regime {
        NoiseRegime::Independent => (
            Target::Autocov { lag },
            lift(est.r_hat(lag), &mut flags, f64::NAN)?,
            lift(est.sigma_hat_cov(lag), &mut flags, f64::NAN)?,
        ),
        NoiseRegime::Scaled => (
            Target::IntegratedAutocov { lag },
            lift(est.r_script_hat(lag), &mut flags, f64::NAN)?,
            lift(est.sigma_prime_hat(lag), &mut flags, f64::NAN)?,
        ),
    };
    Estimate::assemble(target, regime, point, var, n_eff, null_value, level, flags)
}

/// Auto-correlation with its delta-method variance.
pub fn autocor_estimate(
    est: &NoiseEstimator<'_>,
    lag: usize,
    regime: NoiseRegime,
    null_value: f64,
    level: f64,
) -> Result<Estimate> {
    check_level(level)?;
    let n_eff = n_eff(est, regime)?;
    let mut flags = Vec::new();
    if est.u(&IndexTuple::pair(lag as i64))?.is_empty() {
        flags.push(Flag::EmptySum);
    }
    let (target, point, var) = match regime {
        NoiseRegime::Independent => (
            Target::Autocor { lag },
            lift(est.cor_hat(lag), &mut flags, f64::NAN)?,
            lift(est.s_hat(lag), &mut flags, f64::NAN)?,
        ),
        NoiseRegime::Scaled => (
            Target::ScaledAutocor { lag },
            lift(est.cor_prime_hat(lag), &mut flags, f64::NAN)?,
            lift(est.s_prime_hat(lag), &mut flags, f64::NAN)?,
        ),
    };
    Estimate::assemble(target, regime, point, var, n_eff, null_value, level, flags)
}

/// Test of `r(j) = 0` (or `R(j)_T = 0`) with a 95% band.
pub fn test_autocov_zero(
    series: &ObservationSeries,
    lag: usize,
    windows: TuningWindows,
    regime: NoiseRegime,
) -> Result<Estimate> {
    let est = NoiseEstimator::new(series, windows);
    autocov_estimate(&est, lag, regime, 0.0, DEFAULT_LEVEL)
}

/// Test of `Cor(j) = 0` with a 95% band.
pub fn test_autocor(
    series: &ObservationSeries,
    lag: usize,
    windows: TuningWindows,
    regime: NoiseRegime,
) -> Result<Estimate> {
    let est = NoiseEstimator::new(series, windows);
    autocor_estimate(&est, lag, regime, 0.0, DEFAULT_LEVEL)
}
