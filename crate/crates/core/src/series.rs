//! Observed high-frequency series and the two noise regimes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for recognising a regular grid `t_i = i * delta_n`.
pub const GRID_TOLERANCE: f64 = 1e-9;

/// Which set of assumptions the noise is analysed under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseRegime {
    /// Irregular observation times, noise independent of the price.
    #[serde(rename = "NO1")]
    Independent,
    /// Regular grid, noise scaled by a volatility-like process `gamma`.
    #[serde(rename = "NO2")]
    Scaled,
}

impl NoiseRegime {
    pub fn tag(self) -> &'static str {
        match self {
            NoiseRegime::Independent => "NO1",
            NoiseRegime::Scaled => "NO2",
        }
    }
}

impl std::str::FromStr for NoiseRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "").as_str() {
            "NO1" => Ok(NoiseRegime::Independent),
            "NO2" => Ok(NoiseRegime::Scaled),
            _ => Err(Error::InvalidArgument(format!("unknown regime {s:?}"))),
        }
    }
}

/// Observation times (fraction of the trading day) with observed log-prices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservationSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    horizon: f64,
    delta_n: Option<f64>,
}

impl ObservationSeries {
    /// Irregularly observed series; the horizon defaults to the last time.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::LengthMismatch {
                times: times.len(),
                values: values.len(),
            });
        }
        if times.is_empty() {
            return Err(Error::EmptySeries);
        }
        if !(times[0] >= 0.0) {
            return Err(Error::NonMonotoneTimes(0));
        }
        for i in 1..times.len() {
            if !(times[i] > times[i - 1]) {
                return Err(Error::NonMonotoneTimes(i));
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let horizon = *times.last().unwrap();
        Ok(Self {
            times,
            values,
            horizon: if horizon > 0.0 { horizon } else { 1.0 },
            delta_n: None,
        })
    }

    /// Regular grid `t_i = i * delta_n`.
    pub fn regular(values: Vec<f64>, delta_n: f64) -> Result<Self> {
        if !(delta_n > 0.0 && delta_n.is_finite()) {
            return Err(Error::BadSpacing(delta_n));
        }
        let times = (0..values.len()).map(|i| i as f64 * delta_n).collect();
        let mut s = Self::new(times, values)?;
        s.delta_n = Some(delta_n);
        Ok(s)
    }

    /// Index-only series on the unit grid, convenient for tests.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::regular(values, 1.0)
    }

    pub fn with_horizon(mut self, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::BadHorizon(horizon));
        }
        self.horizon = horizon;
        Ok(self)
    }

    /// Declares the series regularly spaced; fails if the times disagree.
    pub fn with_delta_n(mut self, delta_n: f64) -> Result<Self> {
        if !(delta_n > 0.0 && delta_n.is_finite()) {
            return Err(Error::BadSpacing(delta_n));
        }
        if !grid_matches(&self.times, delta_n) {
            return Err(Error::RegimeMismatch);
        }
        self.delta_n = Some(delta_n);
        Ok(self)
    }

    /// Spacing of an exact arithmetic grid starting at zero, if the times form one.
    pub fn detect_grid(&self) -> Option<f64> {
        if self.times.len() < 2 || self.times[0] != 0.0 {
            return None;
        }
        let delta = self.times[1];
        grid_matches(&self.times, delta).then_some(delta)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn delta_n(&self) -> Option<f64> {
        self.delta_n
    }

    /// `N_n(T)`: index of the last observation at or before the horizon.
    /// Zero when only the first observation is inside `[0, T]`.
    pub fn n_index(&self) -> usize {
        self.times
            .partition_point(|&t| t <= self.horizon)
            .saturating_sub(1)
    }

    /// Observations with time at most `T`.
    pub fn within_horizon(&self) -> &[f64] {
        let end = self.times.partition_point(|&t| t <= self.horizon);
        &self.values[..end]
    }

    /// Spacing required by the scaled-noise regime.
    pub fn require_grid(&self) -> Result<f64> {
        self.delta_n.ok_or(Error::RegimeMismatch)
    }

    /// Replace every value with `c * y + b`.
    pub fn affine(&self, c: f64, b: f64) -> Self {
        let mut s = self.clone();
        for v in &mut s.values {
            *v = c * *v + b;
        }
        s
    }
}

fn grid_matches(times: &[f64], delta: f64) -> bool {
    times
        .iter()
        .enumerate()
        .all(|(i, &t)| (t - i as f64 * delta).abs() <= GRID_TOLERANCE * delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            ObservationSeries::new(vec![0.0, 1.0], vec![1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            ObservationSeries::new(vec![0.0, 0.0], vec![1.0, 2.0]),
            Err(Error::NonMonotoneTimes(1))
        ));
        assert!(matches!(
            ObservationSeries::new(vec![-0.1, 0.0], vec![1.0, 2.0]),
            Err(Error::NonMonotoneTimes(0))
        ));
        assert!(ObservationSeries::new(vec![], vec![]).is_err());
        assert!(ObservationSeries::new(vec![0.0], vec![f64::NAN]).is_err());
    }

    #[test]
    fn counting_function() {
        let s = ObservationSeries::new(vec![0.0, 0.2, 0.5, 0.9, 1.3], vec![0.0; 5]).unwrap();
        assert_eq!(s.horizon(), 1.3);
        assert_eq!(s.n_index(), 4);
        let s = s.with_horizon(1.0).unwrap();
        assert_eq!(s.n_index(), 3);
        assert_eq!(s.within_horizon().len(), 4);
        let s = s.with_horizon(0.1).unwrap();
        assert_eq!(s.n_index(), 0);
    }

    #[test]
    fn regular_grid_is_exact() {
        let s = ObservationSeries::regular(vec![0.0; 5], 0.25).unwrap();
        assert_eq!(s.times(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(s.detect_grid(), Some(0.25));
        assert_eq!(s.n_index(), 4);
    }

    #[test]
    fn grid_check_tolerance() {
        let t = vec![0.0, 0.1, 0.2 + 1e-12, 0.3];
        let s = ObservationSeries::new(t, vec![0.0; 4]).unwrap();
        assert!(s.clone().with_delta_n(0.1).is_ok());
        let t = vec![0.0, 0.1, 0.2 + 1e-6, 0.3];
        let s = ObservationSeries::new(t, vec![0.0; 4]).unwrap();
        assert_eq!(s.clone().with_delta_n(0.1), Err(Error::RegimeMismatch));
        assert_eq!(s.detect_grid(), None);
        assert_eq!(s.require_grid(), Err(Error::RegimeMismatch));
    }

    #[test]
    fn regime_parse() {
        assert_eq!("no-1".parse::<NoiseRegime>().unwrap(), NoiseRegime::Independent);
        assert_eq!("NO2".parse::<NoiseRegime>().unwrap(), NoiseRegime::Scaled);
        assert!("x".parse::<NoiseRegime>().is_err());
    }
}
