//! Block statistics for noise moments and their variance estimators.
//!
//! Every observation `Y_i` is paired with forward block averages far enough
//! ahead that the noise in the two is nearly independent. Products of these
//! centered increments summed over `i` estimate joint noise moments. The
//! latent price largely cancels inside each centered factor.
//!
//! [`NoiseEstimator`] caches the block averages for one `(series, k_n)` pair
//! and exposes every estimator. The free functions at the bottom are thin
//! wrappers for one-off calls.

use log::debug;

use crate::accum::NeumaierSum;
use crate::error::{Error, Result};
use crate::exec::{chunked_sum, Execution};
use crate::index::IndexTuple;
use crate::series::{NoiseRegime, ObservationSeries};
use crate::windows::TuningWindows;

/// A block statistic together with the number of summands that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockSum {
    pub value: f64,
    pub n_terms: usize,
}

impl BlockSum {
    pub fn is_empty(&self) -> bool {
        self.n_terms == 0
    }
}

/// `(1/k) * sum_{l<k} Y_{i+l}`.
pub fn bar_average(series: &ObservationSeries, i: usize, k_n: usize) -> Result<f64> {
    let values = series.values();
    if k_n == 0 || i + k_n > values.len() {
        return Err(Error::OutOfRange {
            index: i,
            k_n,
            len: values.len(),
        });
    }
    Ok(block_mean(&values[i..i + k_n]))
}

#[inline]
fn block_mean(block: &[f64]) -> f64 {
    block.iter().sum::<f64>() / block.len() as f64
}

/// Observations within the horizon together with their block averages.
///
/// Block averages are stored relative to the first value of each block,
/// `d_c = (1/k) sum_s (Y_{c+s} - Y_c)`, and centered factors are formed as
/// `(Y_l - Y_c) - d_c`. This avoids cancellation against a large price level
/// and makes every factor of a constant series exactly zero.
#[derive(Clone, Debug)]
pub struct PreAveraged<'a> {
    values: &'a [f64],
    n_index: usize,
    k_n: usize,
    offsets: Vec<f64>,
    exec: Execution,
}

impl<'a> PreAveraged<'a> {
    pub fn new(series: &'a ObservationSeries, k_n: usize) -> Self {
        let values = series.within_horizon();
        let offsets = if k_n == 0 || values.len() < k_n {
            Vec::new()
        } else {
            values
                .windows(k_n)
                .map(|w| w.iter().map(|y| y - w[0]).sum::<f64>() / k_n as f64)
                .collect()
        };
        Self {
            values,
            n_index: series.n_index(),
            k_n,
            offsets,
            exec: Execution::default(),
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn n_index(&self) -> usize {
        self.n_index
    }

    pub fn k_n(&self) -> usize {
        self.k_n
    }

    /// Number of summands `i = 0..=upper` given the largest offset consumed.
    fn term_count(&self, reach: i64) -> usize {
        let upper = self.n_index as i64 + 1 - reach;
        if upper < 0 {
            0
        } else {
            upper as usize + 1
        }
    }

    /// `U(j)`: sum over `i` of `prod_r (Y_{i+j_r} - Ybar_{i+mu+(2r-1)k_n})`.
    pub fn u(&self, j: &IndexTuple) -> Result<BlockSum> {
        j.require_nonnegative()?;
        let k = self.k_n as i64;
        let q = j.len() as i64;
        let mu = j.mu();
        let n_terms = self.term_count(mu + 2 * q * k);
        let lags: Vec<usize> = j.lags().iter().map(|&l| l as usize).collect();
        let centers: Vec<usize> = (1..=q).map(|r| (mu + (2 * r - 1) * k) as usize).collect();
        let (y, d) = (self.values, &self.offsets);
        let value = chunked_sum(n_terms, self.exec, |i| {
            let mut p = 1.0;
            for (l, c) in lags.iter().zip(&centers) {
                p *= (y[i + l] - y[i + c]) - d[i + c];
            }
            p
        });
        Ok(BlockSum { value, n_terms })
    }

    /// `Ubar(j, j')`: the two-block statistic estimating `R(j) R(j')`.
    pub fn u_bar(&self, j: &IndexTuple, j2: &IndexTuple) -> Result<BlockSum> {
        j.require_nonnegative()?;
        j2.require_nonnegative()?;
        let k = self.k_n as i64;
        let q = j.len() as i64;
        let q2 = j2.len() as i64;
        let mu = j.mu();
        let mu2 = mu + j2.mu();
        let n_terms = self.term_count(mu2 + (2 * (q + q2) + 1) * k);

        let first: Vec<(usize, usize)> = j
            .lags()
            .iter()
            .zip(1..=q)
            .map(|(&l, r)| (l as usize, (mu + (2 * r - 1) * k) as usize))
            .collect();
        let offset = mu + (2 * q + 1) * k;
        let second: Vec<(usize, usize)> = j2
            .lags()
            .iter()
            .zip(1..=q2)
            .map(|(&l, r)| ((offset + l) as usize, (mu2 + (2 * r + 2 * q) * k) as usize))
            .collect();
        let (y, d) = (self.values, &self.offsets);
        let value = chunked_sum(n_terms, self.exec, |i| {
            let mut p = 1.0;
            for &(l, c) in first.iter().chain(&second) {
                p *= (y[i + l] - y[i + c]) - d[i + c];
            }
            p
        });
        Ok(BlockSum { value, n_terms })
    }
}

/// All estimators for one series under fixed tuning windows.
#[derive(Clone, Debug)]
pub struct NoiseEstimator<'a> {
    pre: PreAveraged<'a>,
    windows: TuningWindows,
    delta_n: Option<f64>,
}

impl<'a> NoiseEstimator<'a> {
    pub fn new(series: &'a ObservationSeries, windows: TuningWindows) -> Self {
        Self {
            pre: PreAveraged::new(series, windows.k_n),
            windows,
            delta_n: series.delta_n(),
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.pre = self.pre.with_execution(exec);
        self
    }

    pub fn windows(&self) -> TuningWindows {
        self.windows
    }

    /// `N_n(T)`.
    pub fn n_index(&self) -> usize {
        self.pre.n_index()
    }

    pub fn delta_n(&self) -> Result<f64> {
        self.delta_n.ok_or(Error::RegimeMismatch)
    }

    pub fn u(&self, j: &IndexTuple) -> Result<BlockSum> {
        self.pre.u(j)
    }

    pub fn u_bar(&self, j: &IndexTuple, j2: &IndexTuple) -> Result<BlockSum> {
        self.pre.u_bar(j, j2)
    }

    fn n_f64(&self) -> Result<f64> {
        match self.n_index() {
            0 => Err(Error::NoObservations),
            n => Ok(n as f64),
        }
    }

    /// Whether `mu(j) + mu(j') + k'_n` exceeds `2 k_n`, where the shifted
    /// blocks start to overlap the centering averages.
    pub fn reach_exceeded(&self, j: &IndexTuple, j2: &IndexTuple) -> bool {
        j.mu() + j2.mu() + self.windows.kp_n as i64 > 2 * self.windows.k_n as i64
    }

    fn check_reach(&self, j: &IndexTuple, j2: &IndexTuple) {
        if self.reach_exceeded(j, j2) {
            debug!("mu(j) + mu(j') + k'_n exceeds 2 k_n for {j}, {j2}; variance estimate may be unreliable");
        }
    }

    /// Leading `U(j ⊕ j')`, failing when the series is too short for it.
    fn leading(&self, j: &IndexTuple, j2: &IndexTuple) -> Result<f64> {
        let joined = j.oplus(j2);
        let u = self.u(&joined)?;
        if u.is_empty() {
            return Err(Error::EmptySum(joined));
        }
        Ok(u.value)
    }

    /// Long-run covariance estimate of the `(j, j')` block statistics.
    ///
    /// Under [`NoiseRegime::Independent`] this is the `1/N_n(T)` normalised
    /// sum with one-sided shifts `U(j ⊕ j'_{+m})` and correction
    /// `(2k'+1) U(j) U(j') / N^2`. Under [`NoiseRegime::Scaled`] it is the
    /// `Delta_n` normalised sum over both `U(j ⊕ j'_{+m})` and `U(j_{+m} ⊕ j')`
    /// with correction `(2k'+1) Delta_n Ubar(j, j')`.
    pub fn sigma_hat(&self, j: &IndexTuple, j2: &IndexTuple, regime: NoiseRegime) -> Result<f64> {
        j.require_nonnegative()?;
        j2.require_nonnegative()?;
        self.check_reach(j, j2);
        let kp = self.windows.kp_n as i64;
        let correction_weight = (2 * kp + 1) as f64;
        match regime {
            NoiseRegime::Independent => {
                let n = self.n_f64()?;
                let mut acc = NeumaierSum::new();
                acc.add(self.leading(j, j2)?);
                for m in 1..=kp {
                    acc.add(2.0 * self.u(&j.oplus(&j2.shift(m)))?.value);
                }
                let uj = self.u(j)?.value / n;
                let uj2 = self.u(j2)?.value / n;
                Ok(acc.value() / n - correction_weight * uj * uj2)
            }
            NoiseRegime::Scaled => {
                let delta = self.delta_n()?;
                let mut acc = NeumaierSum::new();
                acc.add(self.leading(j, j2)?);
                for m in 1..=kp {
                    acc.add(self.u(&j.oplus(&j2.shift(m)))?.value);
                    acc.add(self.u(&j.shift(m).oplus(j2))?.value);
                }
                let ubar = self.u_bar(j, j2)?.value;
                Ok(delta * acc.value() - correction_weight * delta * ubar)
            }
        }
    }

    /// `r̂(j) = U((0, j)) / N_n(T)`.
    pub fn r_hat(&self, lag: usize) -> Result<f64> {
        let n = self.n_f64()?;
        Ok(self.u(&IndexTuple::pair(lag as i64))?.value / n)
    }

    /// Asymptotic variance estimate for `r̂(j)`.
    pub fn sigma_hat_cov(&self, lag: usize) -> Result<f64> {
        let n = self.n_f64()?;
        let pair = IndexTuple::pair(lag as i64);
        self.check_reach(&pair, &pair);
        let mut acc = NeumaierSum::new();
        acc.add(self.leading(&pair, &pair)?);
        for m in 1..=self.windows.kp_n as i64 {
            acc.add(2.0 * self.u(&pair.oplus(&pair.shift(m)))?.value);
        }
        let r = self.r_hat(lag)?;
        Ok(acc.value() / n - (2 * self.windows.kp_n + 1) as f64 * r * r)
    }

    /// `Cor̂(j) = r̂(j) / r̂(0)`.
    pub fn cor_hat(&self, lag: usize) -> Result<f64> {
        ratio(self.r_hat(lag)?, self.r_hat(0)?)
    }

    /// Delta-method variance of `Cor̂(j)`.
    pub fn s_hat(&self, lag: usize) -> Result<f64> {
        let r0 = self.r_hat(0)?;
        let rj = self.r_hat(lag)?;
        let regime = NoiseRegime::Independent;
        self.delta_method(r0, rj, lag, regime)
    }

    /// `R̂(j)_T = Delta_n U((0, j))`, the integrated covariance.
    pub fn r_script_hat(&self, lag: usize) -> Result<f64> {
        let delta = self.delta_n()?;
        Ok(delta * self.u(&IndexTuple::pair(lag as i64))?.value)
    }

    /// Asymptotic variance estimate for `R̂(j)_T`.
    pub fn sigma_prime_hat(&self, lag: usize) -> Result<f64> {
        let delta = self.delta_n()?;
        let pair = IndexTuple::pair(lag as i64);
        self.check_reach(&pair, &pair);
        let mut acc = NeumaierSum::new();
        acc.add(self.leading(&pair, &pair)?);
        for m in 1..=self.windows.kp_n as i64 {
            acc.add(2.0 * self.u(&pair.oplus(&pair.shift(m)))?.value);
        }
        let ubar = self.u_bar(&pair, &pair)?.value;
        Ok(delta * acc.value() - (2 * self.windows.kp_n + 1) as f64 * delta * ubar)
    }

    /// `Cor̂'(j) = R̂(j)_T / R̂(0)_T`.
    pub fn cor_prime_hat(&self, lag: usize) -> Result<f64> {
        ratio(self.r_script_hat(lag)?, self.r_script_hat(0)?)
    }

    /// Delta-method variance of `Cor̂'(j)`.
    pub fn s_prime_hat(&self, lag: usize) -> Result<f64> {
        let r0 = self.r_script_hat(0)?;
        let rj = self.r_script_hat(lag)?;
        self.delta_method(r0, rj, lag, NoiseRegime::Scaled)
    }

    fn delta_method(&self, r0: f64, rj: f64, lag: usize, regime: NoiseRegime) -> Result<f64> {
        if r0 == 0.0 {
            return Err(Error::ZeroDenominator);
        }
        let zero = IndexTuple::pair(0);
        let pair = IndexTuple::pair(lag as i64);
        let s_jj = self.sigma_hat(&pair, &pair, regime)?;
        let s_00 = self.sigma_hat(&zero, &zero, regime)?;
        let s_0j = self.sigma_hat(&zero, &pair, regime)?;
        let r0_sq = r0 * r0;
        Ok((r0_sq * s_jj + rj * rj * s_00 - 2.0 * rj * r0 * s_0j) / (r0_sq * r0_sq))
    }
}

fn ratio(num: f64, den: f64) -> Result<f64> {
    if den == 0.0 {
        Err(Error::ZeroDenominator)
    } else {
        Ok(num / den)
    }
}

fn default_windows(k_n: usize) -> TuningWindows {
    TuningWindows {
        k_n,
        kp_n: TuningWindows::default().kp_n.min(k_n),
    }
}

pub fn u_stat(series: &ObservationSeries, j: &IndexTuple, k_n: usize) -> Result<BlockSum> {
    PreAveraged::new(series, k_n).u(j)
}

pub fn u_bar_stat(
    series: &ObservationSeries,
    j: &IndexTuple,
    j2: &IndexTuple,
    k_n: usize,
) -> Result<BlockSum> {
    PreAveraged::new(series, k_n).u_bar(j, j2)
}

pub fn sigma_hat(
    series: &ObservationSeries,
    j: &IndexTuple,
    j2: &IndexTuple,
    windows: TuningWindows,
    regime: NoiseRegime,
) -> Result<f64> {
    NoiseEstimator::new(series, windows).sigma_hat(j, j2, regime)
}

pub fn r_hat(series: &ObservationSeries, lag: usize, k_n: usize) -> Result<f64> {
    NoiseEstimator::new(series, default_windows(k_n)).r_hat(lag)
}

pub fn sigma_hat_cov(series: &ObservationSeries, lag: usize, windows: TuningWindows) -> Result<f64> {
    NoiseEstimator::new(series, windows).sigma_hat_cov(lag)
}

pub fn cor_hat(series: &ObservationSeries, lag: usize, k_n: usize) -> Result<f64> {
    NoiseEstimator::new(series, default_windows(k_n)).cor_hat(lag)
}

pub fn s_hat(series: &ObservationSeries, lag: usize, windows: TuningWindows) -> Result<f64> {
    NoiseEstimator::new(series, windows).s_hat(lag)
}

pub fn r_script_hat(series: &ObservationSeries, lag: usize, windows: TuningWindows) -> Result<f64> {
    NoiseEstimator::new(series, windows).r_script_hat(lag)
}

pub fn sigma_prime_hat(series: &ObservationSeries, lag: usize, windows: TuningWindows) -> Result<f64> {
    NoiseEstimator::new(series, windows).sigma_prime_hat(lag)
}

pub fn cor_prime_hat(series: &ObservationSeries, lag: usize, windows: TuningWindows) -> Result<f64> {
    NoiseEstimator::new(series, windows).cor_prime_hat(lag)
}

pub fn s_prime_hat(series: &ObservationSeries, lag: usize, windows: TuningWindows) -> Result<f64> {
    NoiseEstimator::new(series, windows).s_prime_hat(lag)
}
