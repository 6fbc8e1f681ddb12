//! Tier 1: first-choice vote counting and greedy budget allocation over requesters.

use std::cmp::Reverse;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{Ballot, FundingDecision, PreferenceProfile, Requester, RequesterId, Tally};
use crate::money::Money;

/// Largest requester set the exhaustive oracle accepts.
pub const ORACLE_LIMIT: usize = 25;

/// Counts, for every requester, the ballots that rank it first.
///
/// Requesters nobody ranks first are present with a count of zero.
pub fn tally_votes(profile: &PreferenceProfile, requesters: &[Requester]) -> Result<Tally> {
    let mut tally: Tally = requesters.iter().map(|r| (r.id, 0)).collect();
    for (i, ballot) in profile.ballots.iter().enumerate() {
        if let Some(&unknown) = ballot.0.iter().find(|id| !tally.contains_key(id)) {
            return Err(Error::UnknownRequester {
                ballot: i,
                requester: unknown,
            });
        }
        if let Some(first) = ballot.first() {
            *tally.get_mut(&first).expect("checked above") += 1;
        }
    }
    Ok(tally)
}

/// Requesters in scan order: most votes first, ties by ascending id.
pub fn scan_order<'a>(requesters: &'a [Requester], tally: &Tally) -> Vec<&'a Requester> {
    let mut order: Vec<&Requester> = requesters.iter().collect();
    order.sort_by_key(|r| (Reverse(tally.get(&r.id).copied().unwrap_or(0)), r.id));
    order
}

/// Funds requesters in scan order whenever their full budget still fits.
///
/// A requester that does not fit is skipped and the scan continues, so a
/// cheaper requester further down can still be funded.
pub fn select_funded(requesters: &[Requester], tally: &Tally, government_budget: Money) -> FundingDecision {
    let mut remaining = government_budget;
    let mut funded = Vec::new();
    for r in scan_order(requesters, tally) {
        if r.budget <= remaining {
            funded.push(r.id);
            remaining -= r.budget;
        }
    }
    let mut tally = tally.clone();
    for r in requesters {
        tally.entry(r.id).or_insert(0);
    }
    FundingDecision {
        funded,
        residual_budget: remaining,
        tally,
    }
}

/// Average over dwellers of the budget spent on funded requesters that appear
/// anywhere on the dweller's ballot.
pub fn dweller_welfare(decision: &FundingDecision, profile: &PreferenceProfile, requesters: &[Requester]) -> Money {
    if profile.ballots.is_empty() {
        return Money::ZERO;
    }
    let total: Money = profile
        .ballots
        .iter()
        .map(|b| ballot_welfare(decision, b, requesters))
        .sum();
    total.div_int(profile.ballots.len() as u64)
}

/// Budget of every funded requester present on `ballot`.
pub fn ballot_welfare(decision: &FundingDecision, ballot: &Ballot, requesters: &[Requester]) -> Money {
    let budgets: HashMap<RequesterId, Money> = requesters.iter().map(|r| (r.id, r.budget)).collect();
    decision
        .funded
        .iter()
        .filter(|&&id| ballot.contains(id))
        .map(|id| budgets[id])
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnapsackSolution {
    /// Chosen requesters in ascending id order.
    pub funded: Vec<RequesterId>,
    /// Total first-choice votes of the chosen set.
    pub value: u64,
    pub cost: Money,
}

/// Exhaustive maximizer of total tally under the budget constraint.
///
/// Among equally valued feasible sets the lexicographically smallest sorted id
/// list wins, so the empty set is returned when every tally is zero.
pub fn knapsack_oracle(requesters: &[Requester], tally: &Tally, government_budget: Money) -> Result<KnapsackSolution> {
    if requesters.len() > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge {
            limit: ORACLE_LIMIT,
            got: requesters.len(),
        });
    }
    let mut items: Vec<(RequesterId, u64, Money)> = requesters
        .iter()
        .map(|r| (r.id, u64::from(tally.get(&r.id).copied().unwrap_or(0)), r.budget))
        .collect();
    items.sort_by_key(|&(id, _, _)| id);

    let mut best = KnapsackSolution {
        funded: Vec::new(),
        value: 0,
        cost: Money::ZERO,
    };
    for mask in 1u32..(1u32 << items.len()) {
        let mut cost = Money::ZERO;
        let mut value = 0;
        for (bit, &(_, v, c)) in items.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                cost += c;
                value += v;
            }
        }
        if cost > government_budget || value < best.value {
            continue;
        }
        let ids: Vec<RequesterId> = items
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask & (1 << bit) != 0)
            .map(|(_, &(id, _, _))| id)
            .collect();
        if value > best.value || ids < best.funded {
            best = KnapsackSolution {
                funded: ids,
                value,
                cost,
            };
        }
    }
    Ok(best)
}

/// Total tally of a funded set.
pub fn tally_value(funded: &[RequesterId], tally: &Tally) -> u64 {
    funded
        .iter()
        .map(|id| u64::from(tally.get(id).copied().unwrap_or(0)))
        .sum()
}

/// Result of searching one dweller's ballot reorderings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallotDeviation {
    pub dweller: usize,
    pub truthful_welfare: Money,
    pub best_welfare: Money,
    /// Reordering that reaches `best_welfare`; the truthful ballot if nothing beats it.
    pub best_ballot: Ballot,
}

impl BallotDeviation {
    pub fn gain(&self) -> Money {
        self.best_welfare - self.truthful_welfare
    }
}

/// Longest ballot whose reorderings [`best_ballot_permutation`] will enumerate.
pub const PERMUTATION_LIMIT: usize = 8;

/// Tries every reordering of one dweller's ballot with the other ballots fixed.
///
/// Welfare is always judged against the dweller's truthful ballot membership.
pub fn best_ballot_permutation(
    requesters: &[Requester],
    profile: &PreferenceProfile,
    dweller: usize,
    government_budget: Money,
) -> Result<BallotDeviation> {
    let truthful = profile
        .ballots
        .get(dweller)
        .ok_or_else(|| Error::InvalidParameter(format!("no dweller {dweller}")))?
        .clone();
    if truthful.0.len() > PERMUTATION_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "ballot of length {} exceeds the permutation limit {PERMUTATION_LIMIT}",
            truthful.0.len()
        )));
    }
    let outcome_for = |ballot: &Ballot| -> Result<Money> {
        let mut p = profile.clone();
        p.ballots[dweller] = ballot.clone();
        let tally = tally_votes(&p, requesters)?;
        let decision = select_funded(requesters, &tally, government_budget);
        Ok(ballot_welfare(&decision, &truthful, requesters))
    };
    let truthful_welfare = outcome_for(&truthful)?;
    let mut best = BallotDeviation {
        dweller,
        truthful_welfare,
        best_welfare: truthful_welfare,
        best_ballot: truthful.clone(),
    };
    let mut ids = truthful.0.clone();
    let mut failure = None;
    permute(&mut ids, 0, &mut |perm| {
        if failure.is_some() {
            return;
        }
        let ballot = Ballot(perm.to_vec());
        match outcome_for(&ballot) {
            Ok(w) if w > best.best_welfare => {
                best.best_welfare = w;
                best.best_ballot = ballot;
            }
            Ok(_) => {}
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

fn permute<T: Copy>(items: &mut [T], at: usize, visit: &mut impl FnMut(&[T])) {
    if at == items.len() {
        visit(items);
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute(items, at + 1, visit);
        items.swap(at, i);
    }
}
