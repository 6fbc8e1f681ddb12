//! Seeded synthetic data: requesters, ballots and executor pools.

use log::warn;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::harness::config::{BidDistribution, Tier1Config};
use crate::model::{Ballot, Executor, PreferenceProfile, Requester};
use crate::money::Money;
use crate::rng;

/// Decimal places kept on generated costs.
pub const COST_DIGITS: u32 = 2;

/// Requesters `1..=n_requesters` with whole-dollar budgets and random task windows.
pub fn gen_requesters(cfg: &Tier1Config, seed: u64) -> Vec<Requester> {
    let mut rng = rng::stream(seed, 0);
    let lo = cfg.budget_range[0].ceil_to_i128();
    let hi = cfg.budget_range[1].floor().ceil_to_i128().max(lo);
    (1..=cfg.n_requesters)
        .map(|id| {
            let budget = Money::from_ratio(rng.random_range(lo..=hi), 1);
            let n_tasks = rng.random_range(cfg.tasks_per_requester[0]..=cfg.tasks_per_requester[1]);
            let windows: Vec<(i64, i64)> = (0..n_tasks)
                .map(|_| {
                    let start = rng.random_range(0..cfg.horizon);
                    let len = rng.random_range(cfg.task_length[0]..=cfg.task_length[1]);
                    (start, start + len)
                })
                .collect();
            Requester::with_windows(id, budget, &windows)
        })
        .collect()
}

/// One ballot per dweller: a uniformly sized, uniformly ordered subset of the
/// requesters, cut from the tail until its budget total fits `government_budget`.
pub fn gen_preferences(
    requesters: &[Requester],
    n_dwellers: u32,
    government_budget: Money,
    seed: u64,
) -> PreferenceProfile {
    if n_dwellers > 0 && !requesters.is_empty() && requesters.iter().all(|r| r.budget > government_budget) {
        warn!("no requester fits the government budget {government_budget}; every ballot will be empty");
    }
    let mut rng = rng::stream(seed, 0);
    let ballots = (0..n_dwellers)
        .map(|_| {
            if requesters.is_empty() {
                return Ballot::default();
            }
            let len = rng.random_range(1..=requesters.len());
            let mut order: Vec<&Requester> = requesters.iter().collect();
            let (picked, _) = order.partial_shuffle(&mut rng, len);
            let mut ranked: Vec<&Requester> = picked.to_vec();
            let mut total: Money = ranked.iter().map(|r| r.budget).sum();
            while total > government_budget {
                let dropped = ranked.pop().expect("non-empty while over budget");
                total -= dropped.budget;
            }
            Ballot(ranked.iter().map(|r| r.id).collect())
        })
        .collect();
    PreferenceProfile::new(ballots)
}

/// `count` truthful executors with ids `1..=count`, costs rounded to cents.
///
/// Normal draws are redrawn until the rounded cost is positive.
pub fn gen_executors(count: u32, distribution: &BidDistribution, seed: u64) -> Result<Vec<Executor>> {
    let mut rng = rng::stream(seed, 0);
    let round = |x: f64| Money::from_f64_rounded(x, COST_DIGITS);
    let mut out = Vec::with_capacity(count as usize);
    match *distribution {
        BidDistribution::Uniform { lo, hi } => {
            let dist =
                Uniform::new_inclusive(lo.to_f64(), hi.to_f64()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            for id in 1..=count {
                let cost = round(dist.sample(&mut rng))?.max(lo).min(hi);
                out.push(Executor::truthful(id, cost));
            }
        }
        BidDistribution::Normal { mean, sd } => {
            let dist = Normal::new(mean.to_f64(), sd.to_f64()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            for id in 1..=count {
                let cost = loop {
                    let c = round(dist.sample(&mut rng))?;
                    if c.is_positive() {
                        break c;
                    }
                };
                out.push(Executor::truthful(id, cost));
            }
        }
    }
    Ok(out)
}
