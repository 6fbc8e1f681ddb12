//! Two-tier crowdsensing market simulation.
//!
//! Tier 1 funds task requesters from a government budget using dwellers'
//! ballots ([`tier1`]). Tier 2 packs the funded requesters' tasks into
//! conflict-free slots ([`schedule`]) and procures executors for every task
//! with a budget-feasible reverse auction ([`auction`]). [`stochastic`] holds
//! the closed-form and Monte Carlo checks for the funding model, and
//! [`harness`] drives whole experiments.

pub mod auction;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod model;
pub mod money;
pub mod rng;
pub mod schedule;
pub mod stochastic;
pub mod tier1;

pub use error::{Error, Result};
pub use model::{
    incompatible, validate_market, Award, Ballot, Executor, ExecutorId, FundingDecision, PreferenceProfile, Requester,
    RequesterId, SlotAuctionReport, SlotPool, SlotTotals, Tally, Task, TaskAuctionOutcome, TaskKey, Violation,
};
pub use money::Money;
