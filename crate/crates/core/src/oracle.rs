//! Analytic ground truth for Gaussian linear noise.
//!
//! Joint moments of a centered Gaussian sequence are sums over perfect
//! pairings of pairwise covariances (Isserlis). Everything here assumes that
//! structure, which holds for the AR(1) noise used by the simulator. These
//! functions are reference values for tests and validation runs and are never
//! called from the estimation path.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::IndexTuple;

/// Longest tuple accepted by the pairing enumeration (10395 pairings).
pub const MAX_PAIRING_LEN: usize = 12;

/// Stationary covariance function `m -> r(m)`, symmetric in `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CovarianceFunction {
    /// `chi_{i+1} = phi chi_i + N(0, sigma0^2)`.
    Ar1 { phi: f64, sigma0: f64 },
    /// `r(m) = table[|m|]`, zero beyond the table.
    Tabulated(Vec<f64>),
}

impl CovarianceFunction {
    pub fn ar1(phi: f64, sigma0: f64) -> Result<Self> {
        if !(phi.abs() < 1.0) {
            return Err(Error::InvalidArgument(format!("|phi| = {} must be below 1", phi.abs())));
        }
        if !(sigma0 >= 0.0) {
            return Err(Error::InvalidArgument(format!("sigma0 = {sigma0} must be non-negative")));
        }
        Ok(Self::Ar1 { phi, sigma0 })
    }

    pub fn white(variance: f64) -> Self {
        Self::Tabulated(vec![variance])
    }

    pub fn at(&self, m: i64) -> f64 {
        let m = m.unsigned_abs();
        match self {
            Self::Ar1 { phi, sigma0 } => phi.powi(m as i32) * sigma0 * sigma0 / (1.0 - phi * phi),
            Self::Tabulated(t) => t.get(m as usize).copied().unwrap_or(0.0),
        }
    }

    /// `|r(m+1)/r(m)|` when the decay is geometric.
    pub fn geometric_rate(&self) -> Option<f64> {
        match self {
            Self::Ar1 { phi, .. } => Some(phi.abs()),
            Self::Tabulated(_) => Some(0.0),
        }
    }

    /// Smallest `L` with `|r(m)| / r(0) < 1e-12` for all `|m| > L`.
    pub fn default_truncation(&self) -> i64 {
        let r0 = self.at(0);
        match self {
            Self::Tabulated(t) => t.len() as i64,
            Self::Ar1 { phi, .. } => {
                if r0 == 0.0 || *phi == 0.0 {
                    return 1;
                }
                let mut m = 0;
                while (self.at(m + 1) / r0).abs() >= 1e-12 {
                    m += 1;
                }
                m + 1
            }
        }
    }
}

/// `r(j) = phi^|j| sigma0^2 / (1 - phi^2)`.
pub fn ar1_autocov(phi: f64, sigma0: f64, lag: i64) -> Result<f64> {
    Ok(CovarianceFunction::ar1(phi, sigma0)?.at(lag))
}

/// `Cor(j) = phi^|j|`.
pub fn ar1_autocor(phi: f64, lag: i64) -> Result<f64> {
    if !(phi.abs() < 1.0) {
        return Err(Error::InvalidArgument(format!("|phi| = {} must be below 1", phi.abs())));
    }
    Ok(phi.powi(lag.unsigned_abs() as i32))
}

/// Sum over perfect pairings of `{0..n}` of the product of `pair_cov(a, b)`.
fn pairing_sum<F: Fn(usize, usize) -> f64>(n: usize, pair_cov: &F) -> f64 {
    fn rec<F: Fn(usize, usize) -> f64>(rest: &mut Vec<usize>, pair_cov: &F) -> f64 {
        if rest.is_empty() {
            return 1.0;
        }
        let first = rest.remove(0);
        let mut total = 0.0;
        for idx in 0..rest.len() {
            let partner = rest.remove(idx);
            let c = pair_cov(first, partner);
            if c != 0.0 {
                total += c * rec(rest, pair_cov);
            }
            rest.insert(idx, partner);
        }
        rest.insert(0, first);
        total
    }
    if n % 2 == 1 {
        return 0.0;
    }
    let mut items: Vec<usize> = (0..n).collect();
    rec(&mut items, pair_cov)
}

/// `R(j) = E[prod_r chi_{j_r}]` for centered Gaussian noise.
pub fn gaussian_joint_moment(j: &IndexTuple, cov: &CovarianceFunction) -> Result<f64> {
    if j.len() > MAX_PAIRING_LEN {
        return Err(Error::EnumerationBound(j.len()));
    }
    let lags = j.lags();
    Ok(pairing_sum(lags.len(), &|a, b| cov.at(lags[a] - lags[b])))
}

/// Truncated long-run covariance with the magnitude of its last retained term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSum {
    pub value: f64,
    pub last_term: f64,
}

/// `sum_{|m| <= max_lag} (R(j ⊕ j'_{+m}) - R(j) R(j'))`.
pub fn sigma_theoretical(
    j: &IndexTuple,
    j2: &IndexTuple,
    cov: &CovarianceFunction,
    max_lag: i64,
) -> Result<TruncatedSum> {
    let product = gaussian_joint_moment(j, cov)? * gaussian_joint_moment(j2, cov)?;
    let term = |m: i64| -> Result<f64> { Ok(gaussian_joint_moment(&j.oplus(&j2.shift(m)), cov)? - product) };
    let mut value = term(0)?;
    let mut last_term = value.abs();
    for m in 1..=max_lag {
        let (a, b) = (term(m)?, term(-m)?);
        value += a + b;
        last_term = a.abs().max(b.abs());
    }
    Ok(TruncatedSum { value, last_term })
}

/// `sigma_theoretical` truncated where the covariance has decayed below 1e-12.
pub fn sigma_theoretical_default(j: &IndexTuple, j2: &IndexTuple, cov: &CovarianceFunction) -> Result<f64> {
    let reach = j.mu().max(j2.mu()) - j.lags().iter().chain(j2.lags()).min().copied().unwrap_or(0);
    Ok(sigma_theoretical(j, j2, cov, cov.default_truncation() + reach)?.value)
}

/// Linear form `sum_s w_s chi_{t_s}`.
type LinearForm = Vec<(i64, f64)>;

fn form_cov(a: &LinearForm, b: &LinearForm, cov: &CovarianceFunction) -> f64 {
    a.iter()
        .flat_map(|&(s, ws)| b.iter().map(move |&(t, wt)| ws * wt * cov.at(s - t)))
        .sum()
}

/// Finite-window centering `R(k_n; j)`: the expectation of
/// `prod_r (chi_{j_r} - chibar_{mu + (2r-1) k_n})`.
///
/// Each factor is a linear form in the Gaussian noise, so the expectation is
/// a pairing sum over the factors' mutual covariances.
pub fn r_kn(j: &IndexTuple, k_n: usize, cov: &CovarianceFunction) -> Result<f64> {
    if j.len() > MAX_PAIRING_LEN {
        return Err(Error::EnumerationBound(j.len()));
    }
    if k_n == 0 {
        return Err(Error::InvalidArgument("k_n must be positive".into()));
    }
    let k = k_n as i64;
    let mu = j.mu();
    let w = -1.0 / k_n as f64;
    let forms: Vec<LinearForm> = j
        .lags()
        .iter()
        .zip(1i64..)
        .map(|(&l, r)| {
            let start = mu + (2 * r - 1) * k;
            std::iter::once((l, 1.0))
                .chain((0..k).map(|s| (start + s, w)))
                .collect()
        })
        .collect();
    let n = forms.len();
    let mut pair = vec![0.0; n * n];
    for a in 0..n {
        for b in a..n {
            let c = form_cov(&forms[a], &forms[b], cov);
            pair[a * n + b] = c;
            pair[b * n + a] = c;
        }
    }
    Ok(pairing_sum(n, &|a, b| pair[a * n + b]))
}

/// `Var(chibar) = (1/k^2) sum_{0 <= i, j < k} r(i - j)`.
pub fn chi_bar_variance(k_n: usize, cov: &CovarianceFunction) -> f64 {
    let k = k_n as i64;
    let mut total = k as f64 * cov.at(0);
    for d in 1..k {
        total += 2.0 * (k - d) as f64 * cov.at(d);
    }
    total / (k * k) as f64
}

/// Delta-method variance of `Cor̂(j)` implied by the theoretical long-run covariances.
pub fn cor_variance(lag: i64, cov: &CovarianceFunction) -> Result<f64> {
    let zero = IndexTuple::pair(0);
    let pair = IndexTuple::pair(lag);
    let (r0, rj) = (cov.at(0), cov.at(lag));
    let s_jj = sigma_theoretical_default(&pair, &pair, cov)?;
    let s_00 = sigma_theoretical_default(&zero, &zero, cov)?;
    let s_0j = sigma_theoretical_default(&zero, &pair, cov)?;
    Ok((r0 * r0 * s_jj + rj * rj * s_00 - 2.0 * r0 * rj * s_0j) / r0.powi(4))
}
