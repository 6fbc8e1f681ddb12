//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p bulinc-core --test acceptance`.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bulinc_core::auction::{greedy_baseline, run_task_auction, run_task_with, ProportionalShare, SortedPool};
use bulinc_core::fixtures;
use bulinc_core::harness::config::{BidDistribution, ExperimentConfig, SlotSpec, Tier2Mode};
use bulinc_core::harness::{gen_executors, metrics, run_pipeline, RunReport};
use bulinc_core::schedule::{max_overlap_depth, partition_into_slots};
use bulinc_core::stochastic::{
    expected_funded, markov_threshold, simulate_funded, tail_probability, BernoulliFundingModel,
};
use bulinc_core::tier1::{select_funded, tally_votes};
use bulinc_core::{Executor, ExecutorId, Money, RequesterId, Task, TaskAuctionOutcome};

const SEED: u64 = 20_240_601;

const TRUTH_INSTANCES: usize = 1_000;
const TRUTH_PROBES_MIN: usize = 20;
const TRUTH_SECONDS: u64 = 60;

const SCHEDULE_SETS: usize = 10_000;
const SCHEDULE_MAX_TASKS: usize = 200;
const SCHEDULE_SECONDS: u64 = 30;

const MC_TRIALS: u64 = 100_000;
const MC_SIGMAS: f64 = 3.0;
const SYNTHETIC_N: [u64; 5] = [5, 10, 15, 20, 25];
const CATEGORY_N: [u64; 5] = [60, 131, 205, 281, 352];
const GRID_P: [&str; 5] = ["0.20", "0.33", "0.50", "0.75", "0.92"];

/// Agreement between the log-space tail and the exact rational tail.
const TAIL_FLOAT_TOLERANCE: f64 = 1e-9;

const ROUNDS: u32 = 10;

const SCALING_SIZES: [u32; 4] = [1_000, 10_000, 100_000, 1_000_000];
const SCALING_MAX_EXPONENT: f64 = 1.3;
const PIPELINE_AGENTS: usize = 100_000;
const PIPELINE_POOL: u32 = 10_000;
const PIPELINE_SECONDS: u64 = 10;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn money(n: i64) -> Money {
    Money::from_int(n)
}

fn criterion_1() -> Outcome {
    let requesters = fixtures::requesters();
    let tally = tally_votes(&fixtures::profile(), &requesters).map_err(|e| e.to_string())?;
    let mut ranked: Vec<(u32, u32)> = tally.iter().map(|(id, v)| (id.0, *v)).collect();
    ranked.sort_by_key(|&(id, v)| (std::cmp::Reverse(v), id));
    let decision = select_funded(&requesters, &tally, money(fixtures::GOVERNMENT_BUDGET));
    let report = run_pipeline(&fixtures::config()).map_err(|e| e.to_string())?;
    let piped = report.rounds[0].decision.clone().ok_or("pipeline skipped tier 1")?;
    let funded: Vec<u32> = decision.funded.iter().map(|r| r.0).collect();
    check(
        ranked == [(5, 4), (2, 2), (3, 2), (1, 1), (4, 1)]
            && funded == [5, 2, 3]
            && decision.residual_budget == Money::ZERO
            && piped == decision,
        format!(
            "tally {ranked:?}, funded {funded:?}, residual {}",
            decision.residual_budget
        ),
    )
}

fn criterion_2() -> Outcome {
    let tasks: Vec<Task> = fixtures::requesters()
        .into_iter()
        .filter(|r| [2, 3, 5].contains(&r.id.0))
        .flat_map(|r| r.tasks)
        .collect();
    let assignment = partition_into_slots(&tasks);
    let got: Vec<BTreeSet<String>> = assignment
        .slots
        .iter()
        .map(|s| s.iter().map(|t| t.key().to_string()).collect())
        .collect();
    let want: Vec<BTreeSet<String>> = [
        ["t1^3", "t1^2", "t3^5"],
        ["t1^5", "t2^3", "t2^5"],
        ["t3^3", "t2^2", "t4^3"],
    ]
    .iter()
    .map(|s| s.iter().map(|x| x.to_string()).collect())
    .collect();
    check(got == want, format!("{} slots: {got:?}", assignment.slot_count()))
}

fn criterion_3() -> Outcome {
    let task = Task::new(RequesterId(3), 1, 0, 2);
    let pool = fixtures::pool();
    let o = run_task_auction(task, &pool, money(30), 4, false).map_err(|e| e.to_string())?;
    let mut costs: Vec<Money> = o.winners().map(|id| pool[id.0 as usize - 1].true_cost).collect();
    costs.sort();
    let winners: Vec<ExecutorId> = o.winners().collect();
    let budget = Money::from_ratio(15, 2);
    check(
        o.per_task_budget == budget
            && o.winner_count() == 2
            && costs == [money(2), money(3)]
            && winners == [ExecutorId(2), ExecutorId(1)]
            && o.uniform_payment == Some(money(3))
            && o.total_payout() == money(6)
            && o.total_payout() <= budget,
        format!(
            "k={}, winners {:?}, costs {:?}, payment {:?}, total {} of {}",
            o.winner_count(),
            winners,
            costs,
            o.uniform_payment,
            o.total_payout(),
            o.per_task_budget
        ),
    )
}

struct Instance {
    pool: Vec<Executor>,
    budget: Money,
}

fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let m = rng.random_range(1..=40);
    let pool = (1..=m)
        .map(|id| Executor::truthful(id, Money::from_ratio(rng.random_range(100..=2_500), 100)))
        .collect();
    let budget = Money::from_ratio(rng.random_range(0..=20_000), 100);
    Instance { pool, budget }
}

fn bulinc(pool: &[Executor], budget: Money) -> TaskAuctionOutcome {
    run_task_with(
        &ProportionalShare,
        Task::new(RequesterId(1), 1, 0, 0),
        &SortedPool::new(pool),
        budget,
    )
}

fn utility_of(outcome: &TaskAuctionOutcome, id: ExecutorId, true_cost: Money) -> Money {
    outcome.payment_to(id).map_or(Money::ZERO, |p| p - true_cost)
}

/// Reports to try for executor `i`: a grid around its cost plus the boundary
/// values of the truthful outcome, each nudged by a cent either way.
fn probes(inst: &Instance, i: usize, truthful: &TaskAuctionOutcome) -> Vec<Money> {
    let cost = inst.pool[i].true_cost;
    let cent = Money::from_ratio(1, 100);
    let mut out: Vec<Money> = (1..=16).map(|j| cost * Money::from_ratio(j, 8)).collect();
    let mut sorted: Vec<Money> = inst.pool.iter().map(|e| e.reported_cost).collect();
    sorted.sort();
    let k = truthful.winner_count();
    let mut marks = Vec::new();
    if k > 0 {
        marks.push(sorted[k - 1]);
        marks.push(inst.budget.div_int(k as u64));
    }
    if let Some(next) = sorted.get(k) {
        marks.push(*next);
    }
    marks.push(inst.budget.div_int(k as u64 + 1));
    for mark in marks {
        out.extend([mark - cent, mark, mark + cent]);
    }
    out.push(cent);
    out.push(money(1_000));
    out.retain(|p| p.is_positive());
    out
}

/// Budget feasibility and individual rationality of one outcome.
fn feasible(o: &TaskAuctionOutcome, pool: &[Executor]) -> bool {
    let k = o.winner_count() as u64;
    let fits = match o.uniform_payment {
        Some(p) => p.mul_int(k) <= o.per_task_budget,
        None => k == 0,
    };
    fits && o.total_payout() <= o.per_task_budget
        && o.awards.iter().all(|a| {
            let e = pool.iter().find(|e| e.id == a.executor).expect("winner is in the pool");
            a.payment >= e.reported_cost
        })
}

struct TruthStats {
    instances: usize,
    min_probes: usize,
    bulinc_violations: usize,
    gm_gains: usize,
    feasibility_checks: usize,
    feasibility_violations: usize,
    elapsed: Duration,
}

fn truthfulness_sweep() -> TruthStats {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let inflate = Money::from_ratio(13, 10);
    let mut stats = TruthStats {
        instances: 0,
        min_probes: usize::MAX,
        bulinc_violations: 0,
        gm_gains: 0,
        feasibility_checks: 0,
        feasibility_violations: 0,
        elapsed: Duration::ZERO,
    };
    let mut instances: Vec<Instance> = vec![Instance {
        pool: fixtures::pool(),
        budget: Money::from_ratio(15, 2),
    }];
    instances.extend((0..TRUTH_INSTANCES).map(|_| random_instance(&mut rng)));
    for inst in &instances {
        stats.instances += 1;
        let truthful = bulinc(&inst.pool, inst.budget);
        stats.feasibility_checks += 1;
        stats.feasibility_violations += usize::from(!feasible(&truthful, &inst.pool));
        // a winner and a loser when both exist, otherwise one random executor
        let mut focal: Vec<usize> = Vec::new();
        if let Some(w) = truthful.awards.first() {
            focal.push(inst.pool.iter().position(|e| e.id == w.executor).unwrap());
        }
        if let Some(l) = inst.pool.iter().position(|e| truthful.payment_to(e.id).is_none()) {
            focal.push(l);
        }
        focal.push(rng.random_range(0..inst.pool.len()));
        focal.dedup();
        for &i in &focal {
            let me = inst.pool[i];
            let base = utility_of(&truthful, me.id, me.true_cost);
            let tries = probes(inst, i, &truthful);
            stats.min_probes = stats.min_probes.min(tries.len());
            for report in tries {
                let mut pool = inst.pool.clone();
                pool[i] = me.reporting(report);
                let o = bulinc(&pool, inst.budget);
                stats.feasibility_checks += 1;
                stats.feasibility_violations += usize::from(!feasible(&o, &pool));
                if utility_of(&o, me.id, me.true_cost) > base {
                    stats.bulinc_violations += 1;
                }
            }
            let honest = greedy_baseline(&inst.pool, inst.budget);
            let mut pool = inst.pool.clone();
            pool[i] = me.reporting(me.true_cost * inflate);
            let lying = greedy_baseline(&pool, inst.budget);
            let gain = |awards: &[bulinc_core::Award]| {
                awards
                    .iter()
                    .find(|a| a.executor == me.id)
                    .map_or(Money::ZERO, |a| a.payment - me.true_cost)
            };
            if gain(&lying) > gain(&honest) {
                stats.gm_gains += 1;
            }
        }
    }
    stats.elapsed = started.elapsed();
    stats
}

fn criterion_4(stats: &TruthStats) -> Outcome {
    check(
        stats.instances > TRUTH_INSTANCES
            && stats.min_probes >= TRUTH_PROBES_MIN
            && stats.bulinc_violations == 0
            && stats.gm_gains >= 1
            && stats.elapsed < Duration::from_secs(TRUTH_SECONDS),
        format!(
            "{} instances, >= {} probes each, {} BULINC violations, {} GM gains from +30%, {:.2?}",
            stats.instances, stats.min_probes, stats.bulinc_violations, stats.gm_gains, stats.elapsed
        ),
    )
}

fn criterion_5(stats: &TruthStats, runs: &[&RunReport]) -> Outcome {
    let mut checks = stats.feasibility_checks;
    let mut bad = stats.feasibility_violations;
    for report in runs {
        for round in &report.rounds {
            for a in round.auctions.iter().filter(|a| a.mechanism == "BULINC") {
                let pool = &round.slots[a.slot_index - 1].executors;
                for o in &a.outcomes {
                    checks += 1;
                    bad += usize::from(!feasible(o, pool));
                }
            }
        }
    }
    check(bad == 0, format!("{checks} outcomes checked, {bad} violations"))
}

fn criterion_6() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let mut violations = 0;
    let mut shared_endpoints = 0;
    for set in 0..SCHEDULE_SETS {
        let n = rng.random_range(0..=SCHEDULE_MAX_TASKS);
        // narrow horizons force many shared endpoints
        let horizon = rng.random_range(1..=(4 + set % 200) as i64);
        let tasks: Vec<Task> = (0..n)
            .map(|i| {
                let s = rng.random_range(0..horizon);
                let len = rng.random_range(0..=horizon / 4 + 1);
                Task::new(RequesterId(i as u32 / 4 + 1), i as u32 % 4 + 1, s, s + len)
            })
            .collect();
        let finishes: BTreeSet<i64> = tasks.iter().map(|t| t.finish).collect();
        if tasks.iter().any(|t| finishes.contains(&t.start)) {
            shared_endpoints += 1;
        }
        if partition_into_slots(&tasks).slot_count() != max_overlap_depth(&tasks) {
            violations += 1;
        }
    }
    let elapsed = started.elapsed();
    check(
        violations == 0 && shared_endpoints > 0 && elapsed < Duration::from_secs(SCHEDULE_SECONDS),
        format!(
            "{SCHEDULE_SETS} sets ({shared_endpoints} with shared endpoints), {violations} violations, {elapsed:.2?}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut misses = Vec::new();
    let mut monotone = true;
    let mut cells = 0;
    for (table, sizes) in [("synthetic", SYNTHETIC_N), ("category", CATEGORY_N)] {
        let mut means = vec![vec![0.0; sizes.len()]; GRID_P.len()];
        for (pi, p) in GRID_P.iter().enumerate() {
            let p: f64 = p.parse().unwrap();
            for (ni, &n) in sizes.iter().enumerate() {
                let model = BernoulliFundingModel::new(n, p).map_err(|e| e.to_string())?;
                let seed = SEED + 7 * (pi * sizes.len() + ni) as u64 + n;
                let est = simulate_funded(&model, MC_TRIALS, seed).map_err(|e| e.to_string())?;
                let z = (est.mean - expected_funded(&model)).abs() / est.standard_error;
                worst = worst.max(z);
                if z > MC_SIGMAS {
                    misses.push(format!("{table} n={n} p={p}: {z:.2} sigma"));
                }
                means[pi][ni] = est.mean;
                cells += 1;
            }
        }
        for pi in 0..GRID_P.len() {
            for ni in 0..sizes.len() {
                if ni > 0 && means[pi][ni] <= means[pi][ni - 1] {
                    monotone = false;
                }
                if pi > 0 && means[pi][ni] <= means[pi - 1][ni] {
                    monotone = false;
                }
            }
        }
    }
    check(
        misses.is_empty() && monotone && cells == 50,
        format!("{cells} cells at {MC_TRIALS} trials, worst {worst:.2} sigma, monotone {monotone}, misses {misses:?}"),
    )
}

/// `Pr{Z >= t}` for `Z ~ Binomial(n, a/b)` as an exact fraction.
fn exact_tail(n: u64, a: &BigInt, b: &BigInt, t: u64) -> (BigInt, BigInt) {
    let q = b - a;
    let mut binom = BigInt::one();
    let mut num = BigInt::zero();
    for k in 0..=n {
        if k >= t {
            num += &binom * a.pow(k as u32) * q.pow((n - k) as u32);
        }
        binom = binom * (n - k) / (k + 1);
    }
    (num, b.pow(n as u32))
}

fn criterion_8() -> Outcome {
    let mut cells = 0;
    let mut failures = Vec::new();
    let mut worst_gap: f64 = 0.0;
    for &n in SYNTHETIC_N.iter().chain(CATEGORY_N.iter()) {
        for p in GRID_P {
            let exact_p: Money = p.parse().unwrap();
            let (a, b) = (BigInt::from(exact_p.numer()), BigInt::from(exact_p.denom()));
            // ⌈3np⌉ in integers
            let three_np = BigInt::from(3 * n) * &a;
            let threshold: u64 = ((&three_np + &b - 1u32) / &b).try_into().unwrap();
            let model = BernoulliFundingModel::new(n, p.parse().unwrap()).map_err(|e| e.to_string())?;
            if markov_threshold(&model) != threshold {
                failures.push(format!(
                    "n={n} p={p}: threshold {} != {threshold}",
                    markov_threshold(&model)
                ));
            }
            if threshold > n {
                continue;
            }
            cells += 1;
            let (num, den) = exact_tail(n, &a, &b, threshold);
            if BigInt::from(3) * &num > den {
                failures.push(format!("n={n} p={p}: tail exceeds 1/3"));
            }
            let float = tail_probability(&model, threshold);
            let exact_f = num_rational::BigRational::new(num, den);
            let gap = (float - num_traits::ToPrimitive::to_f64(&exact_f).unwrap()).abs();
            worst_gap = worst_gap.max(gap);
            if gap > TAIL_FLOAT_TOLERANCE {
                failures.push(format!("n={n} p={p}: float tail off by {gap:e}"));
            }
        }
    }
    check(
        failures.is_empty() && cells > 0,
        format!("{cells} cells with threshold <= n, all tails <= 1/3 exactly, float gap {worst_gap:.1e}, {failures:?}"),
    )
}

fn tier2_config(name: &str) -> Result<ExperimentConfig, String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    let mut cfg = ExperimentConfig::load(&path).map_err(|e| e.to_string())?;
    cfg.scaling.pool_sizes.clear();
    Ok(cfg)
}

fn table_matches(cfg: &ExperimentConfig, budgets: [i64; 4], normal: bool) -> bool {
    let sizes: Vec<u32> = cfg.tier2.slots.iter().map(|s| s.n_executors).collect();
    let got: Vec<Option<Money>> = cfg.tier2.slots.iter().map(|s| s.budget).collect();
    let dist_ok = cfg.tier2.slots.iter().all(|s| match s.distribution {
        BidDistribution::Uniform { lo, hi } => !normal && lo == money(10) && hi == money(25),
        BidDistribution::Normal { mean, sd } => normal && mean == money(17) && sd == money(5),
    });
    cfg.tier2.mode == Tier2Mode::Direct
        && cfg.rounds == ROUNDS
        && sizes == [50, 45, 60, 58]
        && got == budgets.map(|b| Some(money(b)))
        && dist_ok
        && cfg.tier2.slots.iter().all(|s| s.costs.is_none())
}

fn criterion_9(rd: &RunReport, nd: &RunReport) -> Outcome {
    let mut notes = Vec::new();
    let mut ok =
        table_matches(&rd.config, [134, 98, 153, 138], false) && table_matches(&nd.config, [120, 98, 141, 125], true);
    if !ok {
        notes.push("config tables differ".to_string());
    }
    for (name, report) in [("RD", rd), ("ND", nd)] {
        let rows = metrics(report);
        let budget = |slot: usize| report.config.tier2.slots[slot - 1].budget.unwrap();
        let gm_zero = rows
            .iter()
            .filter(|r| r.mechanism == "GM")
            .all(|r| r.sum_te_utility.is_zero());
        let bulinc_avg: Vec<Money> = rows
            .iter()
            .filter(|r| r.mechanism == "BULINC" && r.round.is_none())
            .map(|r| r.sum_te_utility)
            .collect();
        let bulinc_positive = bulinc_avg.len() == 4 && bulinc_avg.iter().all(|u| u.is_positive());
        let within = rows.iter().all(|r| r.budget_utilized <= budget(r.slot));
        let mut manip_slots = 0;
        for round in &report.rounds {
            for slot in &round.slots {
                let manipulated = &round.manipulated[slot.slot_index - 1];
                let liars: Vec<&Executor> = manipulated.iter().filter(|e| e.reported_cost != e.true_cost).collect();
                let utility = |mech: &str| -> Money {
                    let a = round
                        .auctions
                        .iter()
                        .find(|a| a.slot_index == slot.slot_index && a.mechanism == mech)
                        .expect("every mechanism ran");
                    a.outcomes
                        .iter()
                        .flat_map(|o| o.awards.iter())
                        .filter_map(|aw| {
                            liars
                                .iter()
                                .find(|e| e.id == aw.executor)
                                .map(|e| aw.payment - e.true_cost)
                        })
                        .sum()
                };
                if utility("MGM") > utility("GM") {
                    manip_slots += 1;
                }
            }
        }
        ok &= gm_zero && bulinc_positive && within && manip_slots >= 1;
        let avg: Vec<String> = bulinc_avg.iter().map(|u| u.to_string()).collect();
        notes.push(format!(
            "{name}: GM utility 0 {gm_zero}, BULINC avg utility [{}], within budget {within}, MGM gain in {manip_slots} slot-rounds",
            avg.join(", ")
        ));
    }
    check(ok, notes.join("; "))
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn criterion_10() -> Outcome {
    let dist = BidDistribution::Uniform {
        lo: money(10),
        hi: money(25),
    };
    let mut points = Vec::new();
    for (i, &m) in SCALING_SIZES.iter().enumerate() {
        let pool = gen_executors(m, &dist, SEED + i as u64).map_err(|e| e.to_string())?;
        let budget = money(i64::from(m));
        let reps = (10_000_000 / m as usize).clamp(3, 200);
        let mut best = f64::INFINITY;
        for _ in 0..reps {
            let started = Instant::now();
            let o = bulinc(&pool, budget);
            best = best.min(started.elapsed().as_secs_f64() * 1e3);
            std::hint::black_box(o);
        }
        points.push((f64::from(m), best));
    }
    let slope = loglog_slope(&points);

    let mut cfg = ExperimentConfig {
        seed: SEED,
        mechanisms: vec![
            bulinc_core::harness::MechanismKind::Bulinc,
            bulinc_core::harness::MechanismKind::Gm,
            bulinc_core::harness::MechanismKind::Mgm,
        ],
        ..ExperimentConfig::default()
    };
    cfg.tier1.n_requesters = 40;
    cfg.tier1.n_dwellers = 2_000;
    cfg.tier1.government_budget = money(1_000);
    cfg.tier2.slots = vec![SlotSpec {
        n_executors: PIPELINE_POOL,
        ..SlotSpec::default()
    }];
    let started = Instant::now();
    let report = run_pipeline(&cfg).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let agents = report.rounds[0].timings.first().map_or(0, |t| t.n_agents);
    let times: Vec<String> = points.iter().map(|(m, t)| format!("{m:.0}:{t:.3}ms")).collect();
    check(
        slope <= SCALING_MAX_EXPONENT && agents >= PIPELINE_AGENTS && elapsed < Duration::from_secs(PIPELINE_SECONDS),
        format!(
            "exponent {slope:.3} over [{}]; pipeline with {agents} agents in {elapsed:.2?}",
            times.join(", ")
        ),
    )
}

fn main() {
    let rd = run_pipeline(&tier2_config("rd.toml").expect("rd.toml loads")).expect("RD run");
    let nd = run_pipeline(&tier2_config("nd.toml").expect("nd.toml loads")).expect("ND run");
    let golden = run_pipeline(&fixtures::config()).expect("worked example run");
    let truth = truthfulness_sweep();

    let results: Vec<(&str, Outcome)> = vec![
        ("tier-1 tally and funding on the worked example", criterion_1()),
        ("nine-task slot membership", criterion_2()),
        ("single-task auction on the worked pool", criterion_3()),
        ("truthfulness probes", criterion_4(&truth)),
        (
            "budget feasibility and individual rationality",
            criterion_5(&truth, &[&rd, &nd, &golden]),
        ),
        ("scheduler optimality", criterion_6()),
        ("Monte Carlo funded counts", criterion_7()),
        ("Markov tail bound", criterion_8()),
        ("RD/ND ordinal properties", criterion_9(&rd, &nd)),
        ("scalability", criterion_10()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
