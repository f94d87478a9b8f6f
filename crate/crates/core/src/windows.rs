//! Block length `k_n` and variance truncation lag `k'_n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuningWindows {
    /// Pre-averaging block length.
    pub k_n: usize,
    /// Truncation lag of the long-run variance sum.
    pub kp_n: usize,
}

impl TuningWindows {
    pub fn new(k_n: usize, kp_n: usize) -> Result<Self> {
        if k_n < 2 {
            return Err(Error::InvalidWindows(format!("k_n = {k_n} must be at least 2")));
        }
        if kp_n < 1 || kp_n > k_n {
            return Err(Error::InvalidWindows(format!(
                "k'_n = {kp_n} must lie in 1..={k_n}"
            )));
        }
        Ok(Self { k_n, kp_n })
    }
}

impl Default for TuningWindows {
    fn default() -> Self {
        Self { k_n: 8, kp_n: 4 }
    }
}

/// Parameters of the data-driven rule `k_n ~ c N^eta`, `k'_n ~ c' N^eta'`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowRule {
    /// Known lower bound `v' > 1` on the mixing exponent.
    pub v_lower: f64,
    pub eta: f64,
    pub eta_p: f64,
    pub c: f64,
    pub c_p: f64,
}

impl Default for WindowRule {
    fn default() -> Self {
        Self {
            v_lower: 2.0,
            eta: 1.0 / 3.0,
            eta_p: 0.15,
            c: 1.0,
            c_p: 1.0,
        }
    }
}

impl WindowRule {
    pub fn validate(&self) -> Result<()> {
        let WindowRule { v_lower, eta, eta_p, c, c_p } = *self;
        if !(v_lower > 1.0) {
            return Err(Error::InvalidWindows(format!("v' = {v_lower} must exceed 1")));
        }
        if !(eta > 1.0 / (2.0 * v_lower) && eta < 0.5) {
            return Err(Error::InvalidWindows(format!(
                "eta = {eta} must lie in ({}, 0.5)",
                1.0 / (2.0 * v_lower)
            )));
        }
        let cap = ((1.0 - eta) / 2.0).min(eta);
        if !(eta_p < cap) || !eta_p.is_finite() {
            return Err(Error::InvalidWindows(format!("eta' = {eta_p} must be below {cap}")));
        }
        if !(c > 0.0 && c_p > 0.0 && c.is_finite() && c_p.is_finite()) {
            return Err(Error::InvalidWindows("proportionality constants must be positive".into()));
        }
        Ok(())
    }

    /// Windows for a sample with `N_n(T) = n` observations.
    pub fn choose(&self, n: usize) -> Result<TuningWindows> {
        self.validate()?;
        let n = n as f64;
        let round_half_up = |x: f64| (x + 0.5).floor().max(0.0) as usize;
        let k_n = round_half_up(self.c * n.powf(self.eta)).max(2);
        let kp_n = round_half_up(self.c_p * n.powf(self.eta_p)).min(k_n).max(1);
        Ok(TuningWindows { k_n, kp_n })
    }
}

pub fn choose_windows(
    n: usize,
    v_lower: f64,
    eta: f64,
    eta_p: f64,
    c: f64,
    c_p: f64,
) -> Result<TuningWindows> {
    WindowRule { v_lower, eta, eta_p, c, c_p }.choose(n)
}
