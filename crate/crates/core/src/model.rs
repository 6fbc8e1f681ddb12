//! Market participants, auction outcomes and the shared validation pass.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::money::Money;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RequesterId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExecutorId(pub u32);

impl fmt::Display for RequesterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

impl fmt::Display for ExecutorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A unit of work with a closed time window `[start, finish]` in integer ticks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Task {
    pub requester: RequesterId,
    /// 1-based position of the task within its requester's task list.
    pub index: u32,
    pub start: i64,
    pub finish: i64,
}

impl Task {
    pub fn new(requester: RequesterId, index: u32, start: i64, finish: i64) -> Self {
        Task {
            requester,
            index,
            start,
            finish,
        }
    }

    pub fn is_well_formed(&self) -> bool {
        self.finish >= self.start && self.index >= 1
    }

    /// Identity of the task independent of its time window.
    pub fn key(&self) -> TaskKey {
        TaskKey {
            requester: self.requester,
            index: self.index,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TaskKey {
    pub requester: RequesterId,
    pub index: u32,
}

impl fmt::Display for TaskKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}^{}", self.index, self.requester.0)
    }
}

/// Two tasks conflict when their closed intervals share at least one point.
///
/// This is the union of the four nesting/overlap orderings
/// `s_a <= s_b <= f_b <= f_a`, `s_a <= s_b <= f_a <= f_b` and their mirror
/// images; touching endpoints count as a conflict.
pub fn incompatible(a: &Task, b: &Task) -> bool {
    let chained =
        |s1: i64, s2: i64, f1: i64, f2: i64| (s1 <= s2 && s2 <= f2 && f2 <= f1) || (s1 <= s2 && s2 <= f1 && f1 <= f2);
    chained(a.start, b.start, a.finish, b.finish) || chained(b.start, a.start, b.finish, a.finish)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requester {
    pub id: RequesterId,
    pub budget: Money,
    pub tasks: Vec<Task>,
}

impl Requester {
    /// Builds a requester whose tasks are numbered `1..=windows.len()`.
    pub fn with_windows(id: u32, budget: Money, windows: &[(i64, i64)]) -> Self {
        let id = RequesterId(id);
        let tasks = windows
            .iter()
            .enumerate()
            .map(|(i, &(s, f))| Task::new(id, i as u32 + 1, s, f))
            .collect();
        Requester { id, budget, tasks }
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Executor {
    pub id: ExecutorId,
    pub true_cost: Money,
    pub reported_cost: Money,
}

impl Executor {
    pub fn truthful(id: u32, cost: Money) -> Self {
        Executor {
            id: ExecutorId(id),
            true_cost: cost,
            reported_cost: cost,
        }
    }

    pub fn reporting(self, reported_cost: Money) -> Self {
        Executor { reported_cost, ..self }
    }
}

/// One dweller's strict ranking over a subset of requesters, best first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ballot(pub Vec<RequesterId>);

impl Ballot {
    pub fn from_ids(ids: &[u32]) -> Self {
        Ballot(ids.iter().map(|&i| RequesterId(i)).collect())
    }

    pub fn first(&self) -> Option<RequesterId> {
        self.0.first().copied()
    }

    pub fn contains(&self, id: RequesterId) -> bool {
        self.0.contains(&id)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceProfile {
    pub ballots: Vec<Ballot>,
}

impl PreferenceProfile {
    pub fn new(ballots: Vec<Ballot>) -> Self {
        PreferenceProfile { ballots }
    }

    pub fn dweller_count(&self) -> usize {
        self.ballots.len()
    }

    /// Checks repeats, unknown ids and, when `budget` is given, that every
    /// ballot's budget total fits the government budget.
    pub fn violations(&self, requesters: &[Requester], budget: Option<Money>) -> Vec<Violation> {
        let budgets: HashMap<RequesterId, Money> = requesters.iter().map(|r| (r.id, r.budget)).collect();
        let mut out = Vec::new();
        for (i, ballot) in self.ballots.iter().enumerate() {
            let mut seen = BTreeSet::new();
            let mut total = Money::ZERO;
            for &id in &ballot.0 {
                if !seen.insert(id) {
                    out.push(Violation::RepeatedOnBallot {
                        ballot: i,
                        requester: id,
                    });
                }
                match budgets.get(&id) {
                    Some(&b) => total += b,
                    None => out.push(Violation::UnknownOnBallot {
                        ballot: i,
                        requester: id,
                    }),
                }
            }
            if let Some(limit) = budget {
                if total > limit {
                    out.push(Violation::BallotOverBudget {
                        ballot: i,
                        total,
                        limit,
                    });
                }
            }
        }
        out
    }
}

/// First-position vote counts per requester.
pub type Tally = BTreeMap<RequesterId, u32>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundingDecision {
    /// Funded requesters in admission order.
    pub funded: Vec<RequesterId>,
    pub residual_budget: Money,
    pub tally: Tally,
}

impl FundingDecision {
    pub fn is_funded(&self, id: RequesterId) -> bool {
        self.funded.contains(&id)
    }

    pub fn admission_position(&self, id: RequesterId) -> Option<usize> {
        self.funded.iter().position(|&f| f == id)
    }
}

/// A single winner and the amount it is paid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Award {
    pub executor: ExecutorId,
    pub payment: Money,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskAuctionOutcome {
    pub task: Task,
    pub per_task_budget: Money,
    /// Winners in admission order.
    pub awards: Vec<Award>,
    /// The uniform price when the mechanism pays every winner the same.
    pub uniform_payment: Option<Money>,
    /// Reported cost of the first rejected executor, if any.
    pub next_cost: Option<Money>,
}

impl TaskAuctionOutcome {
    pub fn empty(task: Task, per_task_budget: Money, next_cost: Option<Money>) -> Self {
        TaskAuctionOutcome {
            task,
            per_task_budget,
            awards: Vec::new(),
            uniform_payment: None,
            next_cost,
        }
    }

    pub fn winner_count(&self) -> usize {
        self.awards.len()
    }

    pub fn winners(&self) -> impl Iterator<Item = ExecutorId> + '_ {
        self.awards.iter().map(|a| a.executor)
    }

    pub fn payment_to(&self, id: ExecutorId) -> Option<Money> {
        self.awards.iter().find(|a| a.executor == id).map(|a| a.payment)
    }

    pub fn total_payout(&self) -> Money {
        self.awards.iter().map(|a| a.payment).sum()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotTotals {
    pub payments: Money,
    /// Σ (payment − true cost) over every award in the slot.
    pub te_utility: Money,
    /// Σ per-task budgets of the slot's tasks.
    pub allotted_budget: Money,
    pub winners: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotAuctionReport {
    pub slot_index: usize,
    pub mechanism: String,
    pub outcomes: Vec<TaskAuctionOutcome>,
    pub totals: SlotTotals,
}

impl SlotAuctionReport {
    /// Rolls outcomes up against the true costs found in `pool`.
    pub fn new(
        slot_index: usize,
        mechanism: impl Into<String>,
        outcomes: Vec<TaskAuctionOutcome>,
        pool: &[Executor],
    ) -> Self {
        let totals = Self::rollup(&outcomes, pool);
        SlotAuctionReport {
            slot_index,
            mechanism: mechanism.into(),
            outcomes,
            totals,
        }
    }

    pub fn rollup(outcomes: &[TaskAuctionOutcome], pool: &[Executor]) -> SlotTotals {
        let true_cost: HashMap<ExecutorId, Money> = pool.iter().map(|e| (e.id, e.true_cost)).collect();
        let mut totals = SlotTotals::default();
        for outcome in outcomes {
            totals.allotted_budget += outcome.per_task_budget;
            for award in &outcome.awards {
                totals.payments += award.payment;
                totals.te_utility += award.payment - true_cost[&award.executor];
                totals.winners += 1;
            }
        }
        totals
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotPool {
    pub slot_index: usize,
    pub tasks: Vec<Task>,
    pub executors: Vec<Executor>,
}

impl SlotPool {
    pub fn is_conflict_free(&self) -> bool {
        self.tasks
            .iter()
            .enumerate()
            .all(|(i, a)| self.tasks[i + 1..].iter().all(|b| !incompatible(a, b)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NegativeGovernmentBudget(Money),
    DuplicateRequester(RequesterId),
    NegativeBudget { requester: RequesterId, budget: Money },
    NoTasks(RequesterId),
    TaskWindow { task: TaskKey, start: i64, finish: i64 },
    TaskIndex { task: TaskKey },
    TaskOwner { task: TaskKey, owner: RequesterId },
    DuplicateTask(TaskKey),
    DuplicateExecutor(ExecutorId),
    NonPositiveTrueCost { executor: ExecutorId, cost: Money },
    NonPositiveReportedCost { executor: ExecutorId, cost: Money },
    RepeatedOnBallot { ballot: usize, requester: RequesterId },
    UnknownOnBallot { ballot: usize, requester: RequesterId },
    BallotOverBudget { ballot: usize, total: Money, limit: Money },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NegativeGovernmentBudget(b) => write!(f, "government budget {b} is negative"),
            DuplicateRequester(r) => write!(f, "requester {r} appears more than once"),
            NegativeBudget { requester, budget } => {
                write!(f, "requester {requester} has negative budget {budget}")
            }
            NoTasks(r) => write!(f, "requester {r} has no tasks"),
            TaskWindow { task, start, finish } => {
                write!(f, "task {task} finishes at {finish} before it starts at {start}")
            }
            TaskIndex { task } => write!(f, "task {task} has index 0; indices start at 1"),
            TaskOwner { task, owner } => write!(f, "task {task} is listed under requester {owner}"),
            DuplicateTask(t) => write!(f, "task {t} appears more than once"),
            DuplicateExecutor(e) => write!(f, "executor {e} appears more than once"),
            NonPositiveTrueCost { executor, cost } => {
                write!(f, "executor {executor} has non-positive true cost {cost}")
            }
            NonPositiveReportedCost { executor, cost } => {
                write!(f, "executor {executor} has non-positive reported cost {cost}")
            }
            RepeatedOnBallot { ballot, requester } => {
                write!(f, "ballot {ballot} ranks {requester} more than once")
            }
            UnknownOnBallot { ballot, requester } => {
                write!(f, "ballot {ballot} names unknown requester {requester}")
            }
            BallotOverBudget { ballot, total, limit } => {
                write!(f, "ballot {ballot} totals {total}, above the budget {limit}")
            }
        }
    }
}

/// Collects every violated market invariant; an empty list means the market is valid.
pub fn validate_market(requesters: &[Requester], executors: &[Executor], government_budget: Money) -> Vec<Violation> {
    let mut out = Vec::new();
    if government_budget.is_negative() {
        out.push(Violation::NegativeGovernmentBudget(government_budget));
    }
    let mut ids = BTreeSet::new();
    let mut tasks = BTreeSet::new();
    for r in requesters {
        if !ids.insert(r.id) {
            out.push(Violation::DuplicateRequester(r.id));
        }
        if r.budget.is_negative() {
            out.push(Violation::NegativeBudget {
                requester: r.id,
                budget: r.budget,
            });
        }
        if r.tasks.is_empty() {
            out.push(Violation::NoTasks(r.id));
        }
        for t in &r.tasks {
            if t.requester != r.id {
                out.push(Violation::TaskOwner {
                    task: t.key(),
                    owner: r.id,
                });
            }
            if t.index == 0 {
                out.push(Violation::TaskIndex { task: t.key() });
            }
            if t.finish < t.start {
                out.push(Violation::TaskWindow {
                    task: t.key(),
                    start: t.start,
                    finish: t.finish,
                });
            }
            if !tasks.insert(t.key()) {
                out.push(Violation::DuplicateTask(t.key()));
            }
        }
    }
    let mut seen = BTreeSet::new();
    for e in executors {
        if !seen.insert(e.id) {
            out.push(Violation::DuplicateExecutor(e.id));
        }
        if !e.true_cost.is_positive() {
            out.push(Violation::NonPositiveTrueCost {
                executor: e.id,
                cost: e.true_cost,
            });
        }
        if !e.reported_cost.is_positive() {
            out.push(Violation::NonPositiveReportedCost {
                executor: e.id,
                cost: e.reported_cost,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(s: i64, f: i64) -> Task {
        Task::new(RequesterId(1), 1, s, f)
    }

    #[test]
    fn overlap_examples() {
        assert!(incompatible(&t(1, 3), &t(2, 4)));
        assert!(!incompatible(&t(1, 2), &t(3, 4)));
        assert!(incompatible(&t(1, 2), &t(2, 5)));
        assert!(incompatible(&t(0, 10), &t(3, 4)));
    }

    #[test]
    fn worked_market_is_valid() {
        let requesters: Vec<_> = (1..=5)
            .map(|i| Requester::with_windows(i, Money::from_int(10 * i as i64), &[(0, 1)]))
            .collect();
        let executors: Vec<_> = [3, 2, 9, 4, 3, 5, 3, 9, 10, 10]
            .iter()
            .enumerate()
            .map(|(i, &c)| Executor::truthful(i as u32 + 1, Money::from_int(c)))
            .collect();
        assert!(validate_market(&requesters, &executors, Money::from_int(100)).is_empty());
    }

    #[test]
    fn reversed_window_is_reported() {
        let r = Requester::with_windows(3, Money::from_int(10), &[(0, 1), (5, 2)]);
        let v = validate_market(&[r], &[], Money::from_int(10));
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().contains("t2^3"), "{}", v[0]);
    }

    #[test]
    fn zero_reported_cost_is_reported() {
        let e = Executor::truthful(1, Money::from_int(4)).reporting(Money::ZERO);
        let v = validate_market(&[], &[e], Money::ZERO);
        assert_eq!(
            v,
            vec![Violation::NonPositiveReportedCost {
                executor: ExecutorId(1),
                cost: Money::ZERO
            }]
        );
    }

    #[test]
    fn ballot_violations() {
        let rs = vec![
            Requester::with_windows(1, Money::from_int(60), &[(0, 1)]),
            Requester::with_windows(2, Money::from_int(50), &[(0, 1)]),
        ];
        let p = PreferenceProfile::new(vec![Ballot::from_ids(&[1, 2]), Ballot::from_ids(&[2, 2, 9])]);
        let v = p.violations(&rs, Some(Money::from_int(100)));
        assert_eq!(v.len(), 3, "{v:?}");
    }

    proptest! {
        #[test]
        fn symmetric_and_reflexive(s1 in -50i64..50, l1 in 0i64..20, s2 in -50i64..50, l2 in 0i64..20) {
            let a = t(s1, s1 + l1);
            let b = t(s2, s2 + l2);
            prop_assert_eq!(incompatible(&a, &b), incompatible(&b, &a));
            prop_assert!(incompatible(&a, &a));
            // closed-interval intersection
            let overlap = a.start.max(b.start) <= a.finish.min(b.finish);
            prop_assert_eq!(incompatible(&a, &b), overlap);
        }
    }
}
