//! Simulation of noisy high-frequency prices.
//!
//! The efficient log-price is an Ornstein-Uhlenbeck process with compound
//! Poisson jumps, advanced with its exact Gaussian transition between
//! consecutive observation times. Noise is a stationary Gaussian AR(1). On a
//! regular grid the noise can be scaled by a second OU process `gamma` driven
//! by the same Brownian motion as the price.
//!
//! Randomness comes from ChaCha streams keyed by the seed. Each replication
//! owns a block of stream ids with separate sub-streams for observation times,
//! Brownian shocks, jumps and noise, so changing the jump intensity leaves the
//! Brownian draws untouched.

use log::warn;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{NoiseRegime, ObservationSeries};

const STREAMS_PER_REPLICATION: u64 = 8;
const STREAM_TIMES: u64 = 0;
const STREAM_DIFFUSION: u64 = 1;
const STREAM_JUMPS: u64 = 2;
const STREAM_NOISE: u64 = 3;

/// Observations per day in the reference design.
pub const REFERENCE_N: usize = 93_600;

/// Random stream for one replication and one purpose.
pub fn substream(seed: u64, replication: u64, purpose: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(replication * STREAMS_PER_REPLICATION + purpose);
    rng
}

/// OU parameters of the noise scale `d gamma = -rho (gamma - mu) dt + sigma dW`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub rho: f64,
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Mean reversion speed of the price (per day).
    pub rho: f64,
    /// Long-run mean of the log-price.
    pub mu: f64,
    /// Diffusion coefficient of the log-price (per sqrt day).
    pub sigma: f64,
    /// Jump intensity (jumps per day).
    pub lambda: f64,
    /// Mean of the jump magnitude before the random sign.
    pub mu_p: f64,
    /// Standard deviation of the jump magnitude.
    pub sigma_p: f64,
    /// AR(1) coefficient of the noise.
    pub phi: f64,
    /// Innovation standard deviation of the noise.
    pub sigma0: f64,
    /// Observation rate (irregular) or grid size `1/Delta_n` (regular).
    pub n: usize,
    pub regime: NoiseRegime,
    /// Noise scale process, required on the regular grid.
    pub gamma: Option<GammaParams>,
    pub seed: u64,
    /// Initial log-price; the OU mean when absent.
    pub x0: Option<f64>,
}

impl SimulationConfig {
    /// Irregular-times design with the parameter set used for the validation figures.
    pub fn reference_irregular(n: usize, seed: u64) -> Self {
        let sigma = 0.01;
        Self {
            rho: 0.5,
            mu: 0.002,
            sigma,
            lambda: 3.0,
            mu_p: sigma / 10.0,
            sigma_p: sigma / 30.0,
            phi: 0.8,
            sigma0: 0.0003,
            n,
            regime: NoiseRegime::Independent,
            gamma: None,
            seed,
            x0: None,
        }
    }

    /// Regular-grid design with the OU noise scale.
    pub fn reference_regular(n: usize, seed: u64) -> Self {
        Self {
            regime: NoiseRegime::Scaled,
            gamma: Some(GammaParams {
                rho: 0.5,
                mu: 1.0,
                sigma: 0.01,
            }),
            ..Self::reference_irregular(n, seed)
        }
    }

    /// Same observation rate as the reference design (`REFERENCE_N` per day)
    /// but only `n` observations: the reference dynamics over the first
    /// `n / REFERENCE_N` of a day, mapped onto `[0, 1]`.
    ///
    /// Rates (`rho`, `lambda`) scale by that fraction and diffusion
    /// coefficients by its square root. Jump sizes and the noise are per
    /// event and per observation, so they stay as they are.
    pub fn rescaled_to(self, n: usize) -> Self {
        let f = n as f64 / REFERENCE_N as f64;
        Self {
            rho: self.rho * f,
            sigma: self.sigma * f.sqrt(),
            lambda: self.lambda * f,
            gamma: self.gamma.map(|g| GammaParams {
                rho: g.rho * f,
                sigma: g.sigma * f.sqrt(),
                ..g
            }),
            n,
            ..self
        }
    }

    /// Price-only parameters with pure AR(1) noise (no diffusion, no jumps).
    pub fn noise_only(mut self) -> Self {
        self.sigma = 0.0;
        self.lambda = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.phi.abs() < 1.0) {
            return bad(format!("|phi| = {} must be below 1", self.phi.abs()));
        }
        for (name, v) in [
            ("rho", self.rho),
            ("sigma", self.sigma),
            ("lambda", self.lambda),
            ("sigma_p", self.sigma_p),
            ("sigma0", self.sigma0),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be finite and non-negative"));
            }
        }
        if !self.mu.is_finite() || !self.mu_p.is_finite() {
            return bad("mu and mu_p must be finite".into());
        }
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        match (self.regime, &self.gamma) {
            (NoiseRegime::Scaled, None) => bad("regular-grid regime needs gamma parameters".into()),
            (_, Some(g)) if !(g.rho >= 0.0 && g.sigma >= 0.0 && g.mu.is_finite()) => {
                bad("gamma parameters must be finite with rho, sigma >= 0".into())
            }
            _ => Ok(()),
        }
    }

    pub fn delta_n(&self) -> f64 {
        1.0 / self.n as f64
    }
}

/// Latent components at each observation time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatentPath {
    pub x: Vec<f64>,
    pub eps: Vec<f64>,
    pub chi: Vec<f64>,
    pub gamma: Option<Vec<f64>>,
    /// Standard normal shock driving the diffusion over step `i-1 -> i` (index 0 unused).
    pub shocks: Vec<f64>,
    /// Independent normal completing the `gamma` shock on each step (regular grid only).
    pub gamma_shocks: Option<Vec<f64>>,
    /// Jump contribution to `X` accumulated over step `i-1 -> i`.
    pub jump_part: Vec<f64>,
    /// Number of jumps in `[0, T]`.
    pub n_jumps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaIntegrals {
    /// `Delta_n sum_i gamma_i^2`.
    pub int2: f64,
    /// `Delta_n sum_i gamma_i^4`.
    pub int4: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulatedPath {
    pub series: ObservationSeries,
    pub latent: LatentPath,
    pub integrals: Option<GammaIntegrals>,
}

impl SimulatedPath {
    /// Riemann sum `Delta_n sum_{i=0}^{n} gamma_i^q` over the observation grid.
    pub fn gamma_integral(&self, q: i32) -> Option<f64> {
        let gamma = self.latent.gamma.as_ref()?;
        let delta = self.series.delta_n()?;
        Some(delta * gamma.iter().map(|g| g.powi(q)).sum::<f64>())
    }
}

/// Observation times on `[0, 1]`.
pub fn simulate_times(config: &SimulationConfig) -> Result<Vec<f64>> {
    simulate_times_rep(config, 0)
}

fn simulate_times_rep(config: &SimulationConfig, replication: u64) -> Result<Vec<f64>> {
    config.validate()?;
    match config.regime {
        NoiseRegime::Scaled => {
            let delta = config.delta_n();
            Ok((0..=config.n).map(|i| i as f64 * delta).collect())
        }
        NoiseRegime::Independent => {
            let mut rng = substream(config.seed, replication, STREAM_TIMES);
            let gap = Exp::new(config.n as f64).expect("positive rate");
            let mut times = Vec::with_capacity(config.n + 8 * (config.n as f64).sqrt() as usize);
            times.push(0.0);
            let mut t = 0.0;
            loop {
                t += rng.sample(gap);
                // Consecutive arrivals can coincide only through rounding.
                if t > 1.0 {
                    break;
                }
                if t > *times.last().unwrap() {
                    times.push(t);
                }
            }
            Ok(times)
        }
    }
}

/// Jump arrival times and signed sizes on `[0, 1]`.
fn simulate_jumps(config: &SimulationConfig, replication: u64) -> Vec<(f64, f64)> {
    if config.lambda == 0.0 {
        return Vec::new();
    }
    let mut rng = substream(config.seed, replication, STREAM_JUMPS);
    let gap = Exp::new(config.lambda).expect("positive intensity");
    let mut jumps = Vec::new();
    let mut t = 0.0;
    loop {
        t += rng.sample(gap);
        if t > 1.0 {
            break;
        }
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let z: f64 = rng.sample(StandardNormal);
        jumps.push((t, sign * (config.mu_p + config.sigma_p * z)));
    }
    jumps
}

/// `Var(int_0^h e^{-rho (h-s)} dW_s)`.
fn ou_variance(rho: f64, h: f64) -> f64 {
    if rho == 0.0 {
        h
    } else {
        -(-2.0 * rho * h).exp_m1() / (2.0 * rho)
    }
}

/// `Cov` of the two OU stochastic integrals sharing one Brownian motion.
fn ou_covariance(rho_a: f64, rho_b: f64, h: f64) -> f64 {
    let s = rho_a + rho_b;
    if s == 0.0 {
        h
    } else {
        -(-s * h).exp_m1() / s
    }
}

pub fn simulate_path(config: &SimulationConfig) -> Result<SimulatedPath> {
    simulate_replication(config, 0)
}

/// Path for replication `replication` of the configured seed.
pub fn simulate_replication(config: &SimulationConfig, replication: u64) -> Result<SimulatedPath> {
    config.validate()?;
    let times = simulate_times_rep(config, replication)?;
    let len = times.len();
    let jumps = simulate_jumps(config, replication);
    let n_jumps = jumps.len();

    let mut diffusion_rng = substream(config.seed, replication, STREAM_DIFFUSION);
    let mut noise_rng = substream(config.seed, replication, STREAM_NOISE);

    let x0 = config.x0.unwrap_or(config.mu);
    let mut x = Vec::with_capacity(len);
    let mut shocks = Vec::with_capacity(len);
    let mut jump_part = Vec::with_capacity(len);
    x.push(x0);
    shocks.push(0.0);
    jump_part.push(0.0);

    let gamma_params = match config.regime {
        NoiseRegime::Scaled => config.gamma,
        NoiseRegime::Independent => None,
    };
    let mut gamma = gamma_params.map(|g| {
        let mut v = Vec::with_capacity(len);
        v.push(g.mu);
        v
    });
    let mut gamma_shocks = gamma_params.map(|_| {
        let mut v = Vec::with_capacity(len);
        v.push(0.0);
        v
    });

    let mut next_jump = 0;
    for i in 1..len {
        let h = times[i] - times[i - 1];
        let z1: f64 = diffusion_rng.sample(StandardNormal);
        let decay = (-config.rho * h).exp();
        let var_x = ou_variance(config.rho, h);

        let mut jump_sum = 0.0;
        while next_jump < n_jumps && jumps[next_jump].0 <= times[i] {
            let (s, size) = jumps[next_jump];
            jump_sum += size * (-config.rho * (times[i] - s)).exp();
            next_jump += 1;
        }

        let prev = x[i - 1];
        x.push(config.mu + (prev - config.mu) * decay + config.sigma * var_x.sqrt() * z1 + jump_sum);
        shocks.push(z1);
        jump_part.push(jump_sum);

        if let (Some(g), Some(gv), Some(gs)) = (gamma_params, gamma.as_mut(), gamma_shocks.as_mut()) {
            let z2: f64 = diffusion_rng.sample(StandardNormal);
            let var_g = ou_variance(g.rho, h);
            let cov = ou_covariance(config.rho, g.rho, h);
            let corr = if config.rho == g.rho {
                1.0
            } else if var_x > 0.0 && var_g > 0.0 {
                (cov / (var_x * var_g).sqrt()).clamp(-1.0, 1.0)
            } else {
                1.0
            };
            let shock = corr * z1 + (1.0 - corr * corr).max(0.0).sqrt() * z2;
            let gprev = gv[i - 1];
            gv.push(g.mu + (gprev - g.mu) * (-g.rho * h).exp() + g.sigma * var_g.sqrt() * shock);
            gs.push(z2);
        }
    }

    let stationary_sd = config.sigma0 / (1.0 - config.phi * config.phi).sqrt();
    let mut chi = Vec::with_capacity(len);
    let z: f64 = noise_rng.sample(StandardNormal);
    chi.push(stationary_sd * z);
    for i in 1..len {
        let z: f64 = noise_rng.sample(StandardNormal);
        chi.push(config.phi * chi[i - 1] + config.sigma0 * z);
    }

    let eps: Vec<f64> = match &gamma {
        Some(g) => g.iter().zip(&chi).map(|(g, c)| g * c).collect(),
        None => chi.clone(),
    };
    let values: Vec<f64> = x.iter().zip(&eps).map(|(x, e)| x + e).collect();

    let series = match config.regime {
        // the horizon of the grid is its last point, n * Delta_n up to rounding
        NoiseRegime::Scaled => ObservationSeries::regular(values, config.delta_n())?,
        NoiseRegime::Independent => ObservationSeries::new(times, values)?.with_horizon(1.0)?,
    };

    if let Some(g) = &gamma {
        let min = g.iter().copied().fold(f64::INFINITY, f64::min);
        if min <= 0.0 {
            warn!("noise scale gamma reached {min} <= 0 on replication {replication}");
        }
    }

    let mut path = SimulatedPath {
        series,
        latent: LatentPath {
            x,
            eps,
            chi,
            gamma,
            shocks,
            gamma_shocks,
            jump_part,
            n_jumps,
        },
        integrals: None,
    };
    if let (Some(int2), Some(int4)) = (path.gamma_integral(2), path.gamma_integral(4)) {
        path.integrals = Some(GammaIntegrals { int2, int4 });
    }
    Ok(path)
}

/// Sample auto-covariances of the latent noise, the best any estimator could do.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfeasibleRow {
    pub lag: usize,
    pub autocov: f64,
    pub autocor: f64,
    /// Auto-covariance multiplied by `int gamma^2` (regular grid only).
    pub scaled_autocov: Option<f64>,
}

pub fn infeasible_estimates(path: &SimulatedPath, j_max: usize) -> Result<Vec<InfeasibleRow>> {
    let chi = &path.latent.chi;
    if chi.is_empty() {
        return Err(Error::MissingLatent);
    }
    let n = chi.len();
    let mean = chi.iter().sum::<f64>() / n as f64;
    let acov = |j: usize| -> f64 {
        if j >= n {
            return 0.0;
        }
        (0..n - j).map(|i| (chi[i] - mean) * (chi[i + j] - mean)).sum::<f64>() / n as f64
    };
    let c0 = acov(0);
    let int2 = path.integrals.map(|g| g.int2);
    Ok((0..=j_max)
        .map(|lag| {
            let autocov = acov(lag);
            InfeasibleRow {
                lag,
                autocov,
                autocor: if c0 == 0.0 { 0.0 } else { autocov / c0 },
                scaled_autocov: int2.map(|g| autocov * g),
            }
        })
        .collect())
}
