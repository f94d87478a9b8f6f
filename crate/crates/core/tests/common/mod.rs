//! Direct-sum reference implementations shared by the integration tests.
#![allow(dead_code)]

use noisemoments::IndexTuple;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ybar(y: &[f64], i: usize, k: usize) -> f64 {
    let mut s = 0.0;
    for l in 0..k {
        s += y[i + l];
    }
    s / k as f64
}

/// U(j) summed left to right straight from its definition; `n` is N_n(T).
pub fn naive_u(y: &[f64], n: usize, j: &[i64], k: usize) -> f64 {
    let q = j.len() as i64;
    let mu = *j.iter().max().unwrap();
    let upper = n as i64 + 1 - mu - 2 * q * k as i64;
    let mut total = 0.0;
    let mut i = 0i64;
    while i <= upper {
        let mut p = 1.0;
        for (r, &jr) in j.iter().enumerate() {
            let r = r as i64 + 1;
            let c = i + mu + (2 * r - 1) * k as i64;
            p *= y[(i + jr) as usize] - ybar(y, c as usize, k);
        }
        total += p;
        i += 1;
    }
    total
}

/// Two-block statistic Ubar(j, j') from its definition.
pub fn naive_u_bar(y: &[f64], n: usize, j: &[i64], j2: &[i64], k: usize) -> f64 {
    let k = k as i64;
    let (q, q2) = (j.len() as i64, j2.len() as i64);
    let mu = *j.iter().max().unwrap();
    let mu2 = mu + *j2.iter().max().unwrap();
    let upper = n as i64 + 1 - mu2 - (2 * (q + q2) + 1) * k;
    let mut total = 0.0;
    let mut i = 0i64;
    while i <= upper {
        let mut p = 1.0;
        for (r, &jr) in j.iter().enumerate() {
            let r = r as i64 + 1;
            p *= y[(i + jr) as usize] - ybar(y, (i + mu + (2 * r - 1) * k) as usize, k as usize);
        }
        for (r, &jr) in j2.iter().enumerate() {
            let r = r as i64 + 1;
            let l = i + mu + (2 * q + 1) * k + jr;
            p *= y[l as usize] - ybar(y, (i + mu2 + (2 * r + 2 * q) * k) as usize, k as usize);
        }
        total += p;
        i += 1;
    }
    total
}

/// Random tuple of length 1..=max_q with lags in 0..=max_lag.
pub fn random_tuple(rng: &mut impl Rng, max_q: usize, max_lag: i64) -> IndexTuple {
    let q = rng.random_range(1..=max_q);
    IndexTuple::new((0..q).map(|_| rng.random_range(0..=max_lag)).collect()).unwrap()
}

/// Random walk with additive noise, the shape of a log-price series.
pub fn random_series(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let mut x = rng.random_range(-2.0..2.0);
    (0..len)
        .map(|_| {
            x += rng.random_range(-0.1..0.1);
            x + rng.random_range(-1.0..1.0)
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}
