//! End-to-end runs: tier 1 funding, slot scheduling and per-slot auctions.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::auction::{
    manipulate_bids, run_slot_with, run_task_with, Mechanism, PayAsBid, ProportionalShare, SortedPool,
};
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, MechanismKind, SlotSpec, Tier2Mode};
use crate::harness::generate::{gen_executors, gen_preferences, gen_requesters};
use crate::harness::io::ingest_category_csv;
use crate::model::{
    validate_market, Ballot, Executor, FundingDecision, PreferenceProfile, Requester, RequesterId, SlotAuctionReport,
    SlotPool, Task,
};
use crate::money::Money;
use crate::rng::derive_seed;
use crate::schedule::{partition_into_slots, SlotAssignment};
use crate::stochastic::{expected_funded, simulate_funded, BernoulliFundingModel, MonteCarloEstimate};
use crate::tier1::{select_funded, tally_votes};

// Labels for seeds derived from a round seed.
const SEED_REQUESTERS: u64 = 1;
const SEED_BALLOTS: u64 = 2;
const SEED_POOL: u64 = 1_000;
const SEED_MANIPULATION: u64 = 2_000;
const SEED_MONTE_CARLO: u64 = 3_000;
const SEED_SCALING: u64 = 4_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub mechanism: String,
    pub n_agents: usize,
    pub millis: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: u32,
    pub seed: u64,
    pub requesters: Vec<Requester>,
    pub profile: PreferenceProfile,
    /// `None` when tier 1 is disabled.
    pub decision: Option<FundingDecision>,
    /// Requesters whose tasks were auctioned in tier 2.
    pub tier2_requesters: Vec<Requester>,
    pub assignment: SlotAssignment,
    pub slots: Vec<SlotPool>,
    /// Executor pools after manipulation, per slot, when MGM ran.
    pub manipulated: Vec<Vec<Executor>>,
    /// One report per slot per mechanism, slot-major.
    pub auctions: Vec<SlotAuctionReport>,
    pub timings: Vec<Timing>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloRow {
    pub n: u64,
    pub p: f64,
    pub estimate: MonteCarloEstimate,
    pub exact: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub rounds: Vec<RoundReport>,
    pub montecarlo: Vec<MonteCarloRow>,
    /// Single-task running-time sweep.
    pub scaling: Vec<Timing>,
}

impl RunReport {
    /// Wall-clock fields zeroed, for comparing runs.
    pub fn without_timings(&self) -> RunReport {
        let mut r = self.clone();
        for round in &mut r.rounds {
            for t in &mut round.timings {
                t.millis = 0.0;
            }
        }
        for t in &mut r.scaling {
            t.millis = 0.0;
        }
        r
    }
}

fn mechanism_impl(kind: MechanismKind) -> &'static dyn Mechanism {
    match kind {
        MechanismKind::Bulinc => &ProportionalShare,
        MechanismKind::Gm | MechanismKind::Mgm => &PayAsBid,
    }
}

fn pool_for(spec: &SlotSpec, seed: u64) -> Result<Vec<Executor>> {
    match &spec.costs {
        Some(costs) => Ok(costs
            .iter()
            .enumerate()
            .map(|(i, &c)| Executor::truthful(i as u32 + 1, c))
            .collect()),
        None => gen_executors(spec.n_executors, &spec.distribution, seed),
    }
}

/// Tier 1 for one round: requesters, ballots and the funding decision.
fn run_tier1(
    cfg: &ExperimentConfig,
    round_seed: u64,
) -> Result<(Vec<Requester>, PreferenceProfile, Option<FundingDecision>)> {
    let t1 = &cfg.tier1;
    let requesters = if t1.requesters.is_empty() {
        gen_requesters(t1, derive_seed(round_seed, SEED_REQUESTERS))
    } else {
        t1.requesters
            .iter()
            .map(|spec| {
                let windows: Vec<(i64, i64)> = spec.tasks.iter().map(|w| (w[0], w[1])).collect();
                Requester::with_windows(spec.id, spec.budget, &windows)
            })
            .collect()
    };
    if !t1.enabled {
        return Ok((requesters, PreferenceProfile::default(), None));
    }
    let violations = validate_market(&requesters, &[], t1.government_budget);
    if let Some(v) = violations.first() {
        return Err(Error::Config(format!("tier1 market is invalid: {v}")));
    }
    let profile = match &t1.ballots {
        Some(ballots) => PreferenceProfile::new(ballots.iter().map(|b| Ballot::from_ids(b)).collect()),
        None => gen_preferences(
            &requesters,
            t1.n_dwellers,
            t1.government_budget,
            derive_seed(round_seed, SEED_BALLOTS),
        ),
    };
    let tally = tally_votes(&profile, &requesters).map_err(|e| e.in_stage("tier1 vote tally"))?;
    let decision = select_funded(&requesters, &tally, t1.government_budget);
    Ok((requesters, profile, Some(decision)))
}

/// Synthetic requesters for direct tier-2 mode: requester `i` owns every task
/// of slot `i`, with disjoint unit windows so the slot stays conflict-free.
fn direct_requesters(cfg: &ExperimentConfig) -> Vec<Requester> {
    cfg.tier2
        .slots
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let windows: Vec<(i64, i64)> = (0..spec.tasks as i64).map(|j| (2 * j, 2 * j)).collect();
            Requester::with_windows(i as u32 + 1, spec.budget.unwrap_or(Money::ZERO), &windows)
        })
        .collect()
}

fn run_round(cfg: &ExperimentConfig, round: u32) -> Result<RoundReport> {
    let round_seed = derive_seed(cfg.seed, u64::from(round));
    let (requesters, profile, decision) = run_tier1(cfg, round_seed)?;

    let (tier2_requesters, assignment) = match cfg.tier2.mode {
        Tier2Mode::Direct => {
            let synthetic = direct_requesters(cfg);
            let slots = synthetic.iter().map(|r| r.tasks.clone()).collect();
            (synthetic, SlotAssignment { slots })
        }
        Tier2Mode::Pipeline => {
            let funded: Vec<Requester> = match &decision {
                Some(d) => d
                    .funded
                    .iter()
                    .map(|id| {
                        requesters
                            .iter()
                            .find(|r| r.id == *id)
                            .expect("funded requester exists")
                            .clone()
                    })
                    .collect(),
                None => requesters.clone(),
            };
            let tasks: Vec<Task> = funded.iter().flat_map(|r| r.tasks.iter().copied()).collect();
            let assignment = partition_into_slots(&tasks);
            if assignment.slot_count() > 0 && cfg.tier2.slots.is_empty() {
                return Err(Error::Config(
                    "tier2.slots must describe at least one executor pool".into(),
                ));
            }
            (funded, assignment)
        }
    };

    let mut slots = Vec::with_capacity(assignment.slot_count());
    for (i, tasks) in assignment.slots.iter().enumerate() {
        let spec = &cfg.tier2.slots[i % cfg.tier2.slots.len()];
        let executors = pool_for(spec, derive_seed(round_seed, SEED_POOL + i as u64))
            .map_err(|e| e.in_stage("executor generation"))?;
        let violations = validate_market(&[], &executors, Money::ZERO);
        if let Some(v) = violations.first() {
            return Err(Error::Config(format!("slot {} pool is invalid: {v}", i + 1)));
        }
        slots.push(SlotPool {
            slot_index: i + 1,
            tasks: tasks.clone(),
            executors,
        });
    }

    let manipulated: Vec<Vec<Executor>> = if cfg.mechanisms.contains(&MechanismKind::Mgm) {
        slots
            .iter()
            .map(|s| {
                manipulate_bids(
                    &s.executors,
                    cfg.mgm.fraction,
                    cfg.mgm.inflation,
                    derive_seed(round_seed, SEED_MANIPULATION + s.slot_index as u64),
                )
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut auctions = Vec::new();
    let mut elapsed = vec![Duration::ZERO; cfg.mechanisms.len()];
    for (i, slot) in slots.iter().enumerate() {
        for (m, &kind) in cfg.mechanisms.iter().enumerate() {
            let run_on = match kind {
                MechanismKind::Mgm => SlotPool {
                    executors: manipulated[i].clone(),
                    ..slot.clone()
                },
                _ => slot.clone(),
            };
            let started = Instant::now();
            let report = run_slot_with(mechanism_impl(kind), &run_on, &tier2_requesters, cfg.floor_mode)
                .map_err(|e| e.in_stage("tier2 auction"))?;
            elapsed[m] += started.elapsed();
            auctions.push(SlotAuctionReport {
                mechanism: kind.label().to_string(),
                ..report
            });
        }
    }
    let n_agents = tier2_requesters.len() + slots.iter().map(|s| s.executors.len()).sum::<usize>();
    let timings = cfg
        .mechanisms
        .iter()
        .zip(elapsed)
        .map(|(kind, d)| Timing {
            mechanism: kind.label().to_string(),
            n_agents,
            millis: d.as_secs_f64() * 1e3,
        })
        .collect();

    Ok(RoundReport {
        round,
        seed: round_seed,
        requesters,
        profile,
        decision,
        tier2_requesters,
        assignment,
        slots,
        manipulated,
        auctions,
        timings,
    })
}

/// The `(n, p)` grid: configured sizes followed by category counts.
pub fn montecarlo_grid(cfg: &ExperimentConfig) -> Result<Vec<(u64, f64)>> {
    let mut sizes = cfg.montecarlo.n.clone();
    if let Some(path) = &cfg.montecarlo.categories_csv {
        sizes.extend(ingest_category_csv(path)?.into_iter().map(|(_, count)| count));
    }
    Ok(cfg
        .montecarlo
        .p
        .iter()
        .flat_map(|&p| sizes.iter().map(move |&n| (n, p)))
        .collect())
}

fn run_montecarlo(cfg: &ExperimentConfig) -> Result<Vec<MonteCarloRow>> {
    montecarlo_grid(cfg)?
        .into_iter()
        .enumerate()
        .filter(|(_, (n, _))| *n > 0)
        .map(|(i, (n, p))| {
            let model = BernoulliFundingModel::new(n, p)?;
            let estimate = simulate_funded(&model, cfg.trials, derive_seed(cfg.seed, SEED_MONTE_CARLO + i as u64))?;
            Ok(MonteCarloRow {
                n,
                p,
                estimate,
                exact: expected_funded(&model),
            })
        })
        .collect()
}

fn run_scaling(cfg: &ExperimentConfig) -> Result<Vec<Timing>> {
    let spec = cfg.tier2.slots.first().cloned().unwrap_or_default();
    let task = Task::new(RequesterId(1), 1, 0, 0);
    let mut out = Vec::new();
    for (i, &m) in cfg.scaling.pool_sizes.iter().enumerate() {
        let pool = gen_executors(m, &spec.distribution, derive_seed(cfg.seed, SEED_SCALING + i as u64))?;
        let budget = cfg.scaling.budget.unwrap_or(Money::from_int(i64::from(m)));
        for kind in [MechanismKind::Bulinc, MechanismKind::Gm] {
            let started = Instant::now();
            let sorted = SortedPool::new(&pool);
            let outcome = run_task_with(mechanism_impl(kind), task, &sorted, budget);
            let millis = started.elapsed().as_secs_f64() * 1e3;
            std::hint::black_box(outcome);
            out.push(Timing {
                mechanism: kind.label().to_string(),
                n_agents: m as usize + 1,
                millis,
            });
        }
    }
    Ok(out)
}

/// Runs every configured round, the Monte Carlo grid and the scaling sweep.
pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let rounds = (0..cfg.rounds).map(|r| run_round(cfg, r)).collect::<Result<Vec<_>>>()?;
    let montecarlo = run_montecarlo(cfg).map_err(|e| e.in_stage("monte carlo"))?;
    let scaling = run_scaling(cfg).map_err(|e| e.in_stage("scaling sweep"))?;
    Ok(RunReport {
        config: cfg.clone(),
        rounds,
        montecarlo,
        scaling,
    })
}
