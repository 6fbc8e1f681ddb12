//! A small hand-checked market used by the tests, the CLI and the bundled
//! `configs/worked-example.toml`.
//!
//! Five requesters with budgets 10..50 compete for a government budget of
//! 100 under ten ballots; the funded requesters' nine tasks pack into three
//! slots, and every slot shares one ten-executor pool.

use crate::harness::config::{ExperimentConfig, MechanismKind, RequesterSpec, SlotSpec, Tier1Config, Tier2Config};
use crate::model::{Ballot, Executor, PreferenceProfile, Requester};
use crate::money::Money;

pub const GOVERNMENT_BUDGET: i64 = 100;

/// Costs of executors `e1..e10`.
pub const POOL_COSTS: [i64; 10] = [3, 2, 9, 4, 3, 5, 3, 9, 10, 10];

/// `(requester, budget, task windows)`.
pub type RequesterRow = (u32, i64, &'static [(i64, i64)]);

/// Requesters 1 and 4 are never funded.
pub const REQUESTERS: [RequesterRow; 5] = [
    (1, 10, &[(0, 5)]),
    (2, 20, &[(3, 9), (4, 6)]),
    (3, 30, &[(0, 2), (5, 7), (2, 3), (7, 8)]),
    (4, 40, &[(0, 5)]),
    (5, 50, &[(1, 4), (8, 10), (10, 11)]),
];

pub const BALLOTS: [&[u32]; 10] = [
    &[4, 5, 1],
    &[5, 2, 3],
    &[2, 5, 1],
    &[3, 2, 1, 4],
    &[1, 3, 5],
    &[5, 2, 3],
    &[5, 4, 1],
    &[5, 3, 2],
    &[3, 5, 2],
    &[2, 5, 3],
];

pub fn requesters() -> Vec<Requester> {
    REQUESTERS
        .iter()
        .map(|&(id, budget, windows)| Requester::with_windows(id, Money::from_int(budget), windows))
        .collect()
}

pub fn profile() -> PreferenceProfile {
    PreferenceProfile::new(BALLOTS.iter().map(|b| Ballot::from_ids(b)).collect())
}

pub fn pool() -> Vec<Executor> {
    POOL_COSTS
        .iter()
        .enumerate()
        .map(|(i, &c)| Executor::truthful(i as u32 + 1, Money::from_int(c)))
        .collect()
}

/// Single-round configuration reproducing the whole market end to end.
pub fn config() -> ExperimentConfig {
    ExperimentConfig {
        seed: 1,
        rounds: 1,
        mechanisms: vec![MechanismKind::Bulinc, MechanismKind::Gm, MechanismKind::Mgm],
        tier1: Tier1Config {
            government_budget: Money::from_int(GOVERNMENT_BUDGET),
            requesters: REQUESTERS
                .iter()
                .map(|&(id, budget, windows)| RequesterSpec {
                    id,
                    budget: Money::from_int(budget),
                    tasks: windows.iter().map(|&(s, f)| [s, f]).collect(),
                })
                .collect(),
            ballots: Some(BALLOTS.iter().map(|b| b.to_vec()).collect()),
            ..Tier1Config::default()
        },
        tier2: Tier2Config {
            slots: vec![SlotSpec {
                costs: Some(POOL_COSTS.iter().map(|&c| Money::from_int(c)).collect()),
                ..SlotSpec::default()
            }],
            ..Tier2Config::default()
        },
        ..ExperimentConfig::default()
    }
}
