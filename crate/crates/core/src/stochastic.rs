//! Closed forms and Monte Carlo estimates for the funded-requester count model.
//!
//! Each of `n` requesters is funded independently with probability `p`, so
//! the funded count is Binomial(n, p).

use num_rational::Ratio;
use rand::distr::{Bernoulli, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernoulliFundingModel {
    n_requesters: u64,
    p_fund: f64,
}

impl BernoulliFundingModel {
    pub fn new(n_requesters: u64, p_fund: f64) -> Result<Self> {
        if n_requesters == 0 {
            return Err(Error::InvalidParameter("at least one requester is required".into()));
        }
        if !(p_fund > 0.0 && p_fund <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "funding probability {p_fund} is outside (0, 1]"
            )));
        }
        Ok(BernoulliFundingModel { n_requesters, p_fund })
    }

    /// Model with `p = 1 / lambda`.
    pub fn with_lambda(n_requesters: u64, lambda: f64) -> Result<Self> {
        Self::new(n_requesters, 1.0 / lambda)
    }

    pub fn n(&self) -> u64 {
        self.n_requesters
    }

    pub fn p(&self) -> f64 {
        self.p_fund
    }
}

/// `n · p`, with `p` read as the simplest fraction within float precision.
pub fn expected_funded(model: &BernoulliFundingModel) -> f64 {
    Ratio::<i64>::approximate_float(model.p())
        .and_then(|p| {
            i128::from(*p.numer())
                .checked_mul(i128::from(model.n()))
                .map(|num| (num, *p.denom()))
        })
        .map_or(model.n() as f64 * model.p(), |(num, den)| num as f64 / den as f64)
}

/// `⌈3 · n · p⌉` with `p` read as the simplest fraction within float precision,
/// so `3 · 5 · 0.2` is exactly 3.
pub fn markov_threshold(model: &BernoulliFundingModel) -> u64 {
    let three_np = |p: Ratio<i64>| (p * Ratio::from_integer(3 * model.n() as i64)).ceil().to_integer();
    match Ratio::<i64>::approximate_float(model.p()) {
        Some(p) => three_np(p) as u64,
        None => (3.0 * expected_funded(model)).ceil() as u64,
    }
}

fn ln_factorials(n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// Exact `Pr{Z ≥ threshold}` for `Z ~ Binomial(n, p)`, summed in log space.
pub fn tail_probability(model: &BernoulliFundingModel, threshold: u64) -> f64 {
    let (n, p) = (model.n(), model.p());
    if threshold == 0 {
        return 1.0;
    }
    if threshold > n {
        return 0.0;
    }
    if p == 1.0 {
        return 1.0;
    }
    let lf = ln_factorials(n);
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let terms: Vec<f64> = (threshold..=n)
        .map(|k| lf[n as usize] - lf[k as usize] - lf[(n - k) as usize] + k as f64 * lp + (n - k) as f64 * lq)
        .collect();
    let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
    (peak + sum.ln()).exp().min(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtLeastOne {
    /// `1 − (1 − p)^n`.
    pub exact: f64,
    /// `1 − e^(−n·p)`; never above `exact` since `1 − p ≤ e^(−p)`.
    pub exponential: f64,
}

/// Probability that at least one requester is funded, with its exponential companion.
pub fn prob_at_least_one(model: &BernoulliFundingModel) -> AtLeastOne {
    let (n, p) = (model.n() as f64, model.p());
    let exact = if p == 1.0 { 1.0 } else { -(n * (-p).ln_1p()).exp_m1() };
    AtLeastOne {
        exact,
        exponential: -(-n * p).exp_m1(),
    }
}

/// `λ = ⌈ln n⌉`, a funding rate that makes at least one funded requester likely.
pub fn at_least_one_lambda(n: u64) -> u64 {
    ((n as f64).ln().ceil() as u64).max(1)
}

/// Mean tasks per slot under uniform random placement: `total / slots`.
pub fn expected_tasks_per_slot(total_tasks: u64, slot_count: u64) -> Result<f64> {
    if slot_count == 0 {
        return Err(Error::InvalidParameter("slot count must be positive".into()));
    }
    Ok(total_tasks as f64 / slot_count as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√trials`.
    pub standard_error: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Draws the funded count `trials` times as `n` Bernoulli indicators each.
///
/// Trial `i` uses stream `i` of the keystream for `seed`, and the
/// accumulators are integers, so results do not depend on thread count.
pub fn simulate_funded(model: &BernoulliFundingModel, trials: u64, seed: u64) -> Result<MonteCarloEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let coin = Bernoulli::new(model.p()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let n = model.n();
    let (sum, sum_sq) = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng::stream(seed, trial);
            let funded = (0..n).filter(|_| coin.sample(&mut rng)).count() as u128;
            (funded, funded * funded)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let t = trials as f64;
    let mean = sum as f64 / t;
    let standard_error = if trials < 2 {
        0.0
    } else {
        // exact integer numerator: t·Σx² − (Σx)²
        let numer = (trials as u128) * sum_sq - sum * sum;
        let variance = numer as f64 / (t * (t - 1.0));
        (variance / t).sqrt()
    };
    Ok(MonteCarloEstimate {
        mean,
        standard_error,
        trials,
        seed,
    })
}
