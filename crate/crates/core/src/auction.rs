//! Tier 2 procurement: the proportional-share reverse auction with threshold
//! payments, a pay-as-bid greedy baseline, and the [`Mechanism`] plug-in seam.

use std::collections::HashMap;

use rand::seq::index;

use crate::error::{Error, Result};
use crate::model::{
    Award, Executor, ExecutorId, Requester, RequesterId, SlotAuctionReport, SlotPool, Task, TaskAuctionOutcome,
};
use crate::money::Money;
use crate::rng;

/// Share of a requester's budget given to each of its `n_tasks` tasks.
///
/// With `floor` set the share is rounded down to a whole dollar.
pub fn per_task_budget(budget: Money, n_tasks: usize, floor: bool) -> Result<Money> {
    if n_tasks == 0 {
        return Err(Error::NoTasks);
    }
    let share = budget.div_int(n_tasks as u64);
    Ok(if floor { share.floor() } else { share })
}

/// Executors ordered by ascending reported cost, ties by ascending id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedPool(Vec<Executor>);

impl SortedPool {
    pub fn new(pool: &[Executor]) -> Self {
        let mut sorted = pool.to_vec();
        sorted.sort_unstable_by_key(|e| (e.reported_cost, e.id));
        SortedPool(sorted)
    }

    pub fn as_slice(&self) -> &[Executor] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    /// Admitted executors in sorted order; `k` is its length.
    pub winners: Vec<ExecutorId>,
    /// Reported cost of the executor right after the last winner.
    pub next_cost: Option<Money>,
}

impl Selection {
    pub fn k(&self) -> usize {
        self.winners.len()
    }
}

/// Proportional-share allocation over a pool in arbitrary order.
pub fn allocate_winners(pool: &[Executor], budget: Money) -> Selection {
    allocate_sorted(&SortedPool::new(pool), budget)
}

/// Admits the candidate at 1-based position `k` while `cost_k <= budget / k`
/// and stops at the first candidate that fails.
pub fn allocate_sorted(pool: &SortedPool, budget: Money) -> Selection {
    let sorted = pool.as_slice();
    let k = sorted
        .iter()
        .enumerate()
        .take_while(|(i, e)| e.reported_cost.mul_int(*i as u64 + 1) <= budget)
        .count();
    Selection {
        winners: sorted[..k].iter().map(|e| e.id).collect(),
        next_cost: sorted.get(k).map(|e| e.reported_cost),
    }
}

/// Uniform threshold price `min(budget / k, next_cost)`, or `budget / k` when
/// every executor in the pool won.
pub fn compute_payment(k: usize, budget: Money, next_cost: Option<Money>) -> Result<Money> {
    if k == 0 {
        return Err(Error::NoWinners);
    }
    let share = budget.div_int(k as u64);
    Ok(match next_cost {
        Some(next) => share.min(next),
        None => share,
    })
}

/// Winners and payments produced by a mechanism for one task.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation {
    pub awards: Vec<Award>,
    pub uniform_payment: Option<Money>,
    pub next_cost: Option<Money>,
}

/// A single-task procurement rule.
///
/// Implementations receive the slot's pool already sorted by reported cost and
/// the task's budget share. Callers check the result for budget feasibility
/// and individual rationality; no truthfulness guarantee is implied.
pub trait Mechanism: Send + Sync {
    fn name(&self) -> &str;

    fn allocate(&self, pool: &SortedPool, budget: Money) -> Allocation;
}

/// The proportional-share auction with threshold payments.
#[derive(Clone, Copy, Debug, Default)]
pub struct ProportionalShare;

impl Mechanism for ProportionalShare {
    fn name(&self) -> &str {
        "BULINC"
    }

    fn allocate(&self, pool: &SortedPool, budget: Money) -> Allocation {
        let selection = allocate_sorted(pool, budget);
        let payment = compute_payment(selection.k(), budget, selection.next_cost).ok();
        Allocation {
            awards: selection
                .winners
                .iter()
                .map(|&executor| Award {
                    executor,
                    payment: payment.expect("non-empty selection has a payment"),
                })
                .collect(),
            uniform_payment: payment,
            next_cost: selection.next_cost,
        }
    }
}

/// Cheapest-first admission while the running bid total fits; pays each winner its bid.
#[derive(Clone, Copy, Debug, Default)]
pub struct PayAsBid;

impl Mechanism for PayAsBid {
    fn name(&self) -> &str {
        "GM"
    }

    fn allocate(&self, pool: &SortedPool, budget: Money) -> Allocation {
        let mut spent = Money::ZERO;
        let mut awards = Vec::new();
        let mut next_cost = None;
        for e in pool.as_slice() {
            if spent + e.reported_cost > budget {
                next_cost = Some(e.reported_cost);
                break;
            }
            spent += e.reported_cost;
            awards.push(Award {
                executor: e.id,
                payment: e.reported_cost,
            });
        }
        Allocation {
            awards,
            uniform_payment: None,
            next_cost,
        }
    }
}

/// Pay-as-bid greedy baseline on an unsorted pool.
pub fn greedy_baseline(pool: &[Executor], budget: Money) -> Vec<Award> {
    PayAsBid.allocate(&SortedPool::new(pool), budget).awards
}

/// Runs the proportional-share auction for one task of a requester with
/// budget `requester_budget` and `n_tasks` tasks.
pub fn run_task_auction(
    task: Task,
    pool: &[Executor],
    requester_budget: Money,
    n_tasks: usize,
    floor: bool,
) -> Result<TaskAuctionOutcome> {
    let budget = per_task_budget(requester_budget, n_tasks, floor)?;
    Ok(run_task_with(&ProportionalShare, task, &SortedPool::new(pool), budget))
}

/// One task under an arbitrary mechanism, budget share already computed.
pub fn run_task_with(
    mechanism: &dyn Mechanism,
    task: Task,
    pool: &SortedPool,
    per_task_budget: Money,
) -> TaskAuctionOutcome {
    let allocation = mechanism.allocate(pool, per_task_budget);
    TaskAuctionOutcome {
        task,
        per_task_budget,
        awards: allocation.awards,
        uniform_payment: allocation.uniform_payment,
        next_cost: allocation.next_cost,
    }
}

/// Proportional-share auctions for every task in the slot.
pub fn run_slot_auction(slot: &SlotPool, funded: &[Requester], floor: bool) -> Result<SlotAuctionReport> {
    run_slot_with(&ProportionalShare, slot, funded, floor)
}

/// Auctions every task of the slot independently over the slot's whole pool.
///
/// An executor may win several tasks in the same slot. Outcomes follow the
/// slot's task order.
pub fn run_slot_with(
    mechanism: &dyn Mechanism,
    slot: &SlotPool,
    funded: &[Requester],
    floor: bool,
) -> Result<SlotAuctionReport> {
    let owners: HashMap<RequesterId, &Requester> = funded.iter().map(|r| (r.id, r)).collect();
    let sorted = SortedPool::new(&slot.executors);
    let mut outcomes = Vec::with_capacity(slot.tasks.len());
    for &task in &slot.tasks {
        let owner = owners.get(&task.requester).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "task {task} in slot {} belongs to unfunded requester {}",
                slot.slot_index, task.requester
            ))
        })?;
        let budget = per_task_budget(owner.budget, owner.task_count(), floor)?;
        outcomes.push(run_task_with(mechanism, task, &sorted, budget));
    }
    Ok(SlotAuctionReport::new(
        slot.slot_index,
        mechanism.name(),
        outcomes,
        &slot.executors,
    ))
}

/// Payment minus true cost for a winner, zero otherwise.
pub fn executor_utility(outcome: &TaskAuctionOutcome, executor: &Executor) -> Money {
    match outcome.payment_to(executor.id) {
        Some(p) => p - executor.true_cost,
        None => Money::ZERO,
    }
}

/// Inflates the reported cost of `⌈fraction · m⌉` seeded-random executors to
/// `true_cost · (1 + inflation)`; everyone else keeps their report.
pub fn manipulate_bids(pool: &[Executor], fraction: Money, inflation: Money, seed: u64) -> Vec<Executor> {
    let m = pool.len();
    let count = fraction.mul_int(m as u64).ceil_to_i128().clamp(0, m as i128) as usize;
    let factor = Money::ONE + inflation;
    let mut out = pool.to_vec();
    let mut rng = rng::stream(seed, 0);
    for i in index::sample(&mut rng, m, count) {
        out[i].reported_cost = out[i].true_cost * factor;
    }
    out
}
