use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use bulinc_core::auction::{
    executor_utility, per_task_budget, run_task_with, Mechanism, PayAsBid, ProportionalShare, SortedPool,
};
use bulinc_core::harness::report::{FUNDING_HEADER, MONTECARLO_HEADER, SCHEDULE_HEADER};
use bulinc_core::harness::{
    emit_report, metrics, read_pool_csv, read_tasks_csv, run_pipeline, ExperimentConfig, MechanismKind,
};
use bulinc_core::schedule::{max_overlap_depth, partition_into_slots};
use bulinc_core::stochastic::{
    at_least_one_lambda, expected_funded, markov_threshold, prob_at_least_one, tail_probability, BernoulliFundingModel,
};
use bulinc_core::{Money, RequesterId, Task};

#[derive(Parser, Debug)]
#[command(name = "bulinc", version, about = "Two-tier crowdsensing market simulator")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// TOML experiment configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for CSV output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Round each task's budget share down to whole dollars.
    #[arg(long, global = true)]
    floor_per_task_budget: bool,
    /// Overrides the Monte Carlo trial count.
    #[arg(long, global = true)]
    trials: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tier-1 funding for round 0 and the Monte Carlo grid.
    Tier1,
    /// Partition a tasks CSV into conflict-free slots.
    Schedule {
        #[arg(long)]
        tasks: PathBuf,
    },
    /// Auction one task over a pool CSV.
    Auction {
        #[arg(long)]
        pool: PathBuf,
        /// Requester budget.
        #[arg(long)]
        budget: Money,
        /// Number of tasks sharing the budget.
        #[arg(long, default_value_t = 1)]
        tasks: usize,
        #[arg(long, default_value = "BULINC")]
        mechanism: MechanismKind,
    },
    /// Full run: every round, the Monte Carlo grid and the scaling sweep.
    Pipeline,
    /// Closed-form funding statistics for `n` requesters.
    Analyze {
        #[arg(long)]
        n: u64,
        /// Funding probability; give this or `--lambda`.
        #[arg(long, conflicts_with = "lambda")]
        p: Option<f64>,
        /// Funding rate, p = 1/lambda.
        #[arg(long)]
        lambda: Option<f64>,
    },
}

fn load_config(global: &Global) -> Result<ExperimentConfig> {
    let mut cfg = match &global.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = global.trials {
        cfg.trials = trials;
    }
    cfg.floor_mode |= global.floor_per_task_budget;
    cfg.validate()?;
    Ok(cfg)
}

/// Writes `lines` under `out/name` when an output directory is set, else to stdout.
fn write_table(out: Option<&Path>, name: &str, header: &str, lines: &[String]) -> Result<()> {
    let mut text = format!("{header}\n");
    for line in lines {
        text.push_str(line);
        text.push('\n');
    }
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            info!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn tier1(global: &Global) -> Result<()> {
    let mut cfg = load_config(global)?;
    cfg.tier2.slots.clear();
    cfg.tier2.mode = bulinc_core::harness::Tier2Mode::Direct;
    cfg.scaling.pool_sizes.clear();
    cfg.rounds = 1;
    let report = run_pipeline(&cfg)?;
    let round = &report.rounds[0];
    let out = global.out.as_deref();
    if let Some(d) = &round.decision {
        let lines: Vec<String> = d
            .tally
            .iter()
            .map(|(id, votes)| {
                let order = d.admission_position(*id).map_or(String::new(), |p| (p + 1).to_string());
                format!("{},{votes},{},{order}", id.0, d.is_funded(*id))
            })
            .collect();
        write_table(out, "funding.csv", FUNDING_HEADER, &lines)?;
        eprintln!(
            "funded {} of {} requesters, residual {}",
            d.funded.len(),
            d.tally.len(),
            d.residual_budget
        );
    }
    if !report.montecarlo.is_empty() {
        let lines: Vec<String> = report
            .montecarlo
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{},{}",
                    r.n, r.p, r.estimate.trials, r.estimate.mean, r.estimate.standard_error, r.exact
                )
            })
            .collect();
        write_table(out, "montecarlo.csv", MONTECARLO_HEADER, &lines)?;
    }
    Ok(())
}

fn schedule(global: &Global, tasks: &Path) -> Result<()> {
    let tasks: Vec<Task> = read_tasks_csv(tasks)?;
    let assignment = partition_into_slots(&tasks);
    let lines: Vec<String> = assignment
        .slot_of()
        .iter()
        .map(|(k, slot)| format!("{},{},{slot}", k.requester.0, k.index))
        .collect();
    write_table(global.out.as_deref(), "schedule.csv", SCHEDULE_HEADER, &lines)?;
    eprintln!(
        "{} tasks in {} slots (maximum overlap {})",
        tasks.len(),
        assignment.slot_count(),
        max_overlap_depth(&tasks)
    );
    Ok(())
}

fn auction(global: &Global, pool: &Path, budget: Money, tasks: usize, kind: MechanismKind) -> Result<()> {
    let cfg = load_config(global)?;
    let executors = read_pool_csv(pool)?;
    let share = per_task_budget(budget, tasks, cfg.floor_mode)?;
    let mechanism: &dyn Mechanism = match kind {
        MechanismKind::Bulinc => &ProportionalShare,
        MechanismKind::Gm => &PayAsBid,
        MechanismKind::Mgm => bail!("MGM needs a manipulated pool; run GM on a pool file with inflated reports"),
    };
    let outcome = run_task_with(
        mechanism,
        Task::new(RequesterId(1), 1, 0, 0),
        &SortedPool::new(&executors),
        share,
    );
    let lines: Vec<String> = outcome
        .awards
        .iter()
        .map(|a| {
            let e = executors
                .iter()
                .find(|e| e.id == a.executor)
                .expect("winner comes from the pool");
            format!(
                "{},{},{},{}",
                a.executor.0,
                e.reported_cost,
                a.payment,
                executor_utility(&outcome, e)
            )
        })
        .collect();
    write_table(
        global.out.as_deref(),
        "awards.csv",
        "executor_id,reported_cost,payment,utility",
        &lines,
    )?;
    eprintln!(
        "{}: {} winners, per-task budget {share}, payout {}",
        mechanism.name(),
        outcome.winner_count(),
        outcome.total_payout()
    );
    Ok(())
}

fn pipeline(global: &Global) -> Result<()> {
    let cfg = load_config(global)?;
    let report = run_pipeline(&cfg)?;
    let out = global.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let written = emit_report(&report, &out)?;
    for row in metrics(&report).iter().filter(|r| r.round.is_none()) {
        println!(
            "slot {} {:<6} utility {:>10} utilized {:>10} winners {}",
            row.slot, row.mechanism, row.sum_te_utility, row.budget_utilized, row.n_winners
        );
    }
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn analyze(n: u64, p: Option<f64>, lambda: Option<f64>) -> Result<()> {
    let model = match (p, lambda) {
        (Some(p), None) => BernoulliFundingModel::new(n, p)?,
        (None, Some(l)) => BernoulliFundingModel::with_lambda(n, l)?,
        _ => bail!("give exactly one of --p or --lambda"),
    };
    let threshold = markov_threshold(&model);
    let at_least_one = prob_at_least_one(&model);
    println!("n = {}", model.n());
    println!("p = {}", model.p());
    println!("expected funded = {}", expected_funded(&model));
    println!("markov threshold = {threshold}");
    println!("tail at threshold = {:e}", tail_probability(&model, threshold));
    println!("at least one funded = {}", at_least_one.exact);
    println!("exponential companion = {}", at_least_one.exponential);
    println!("lambda for at-least-one = {}", at_least_one_lambda(model.n()));
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match &cli.command {
        Command::Tier1 => tier1(&cli.global),
        Command::Schedule { tasks } => schedule(&cli.global, tasks),
        Command::Auction {
            pool,
            budget,
            tasks,
            mechanism,
        } => auction(&cli.global, pool, *budget, *tasks, *mechanism),
        Command::Pipeline => pipeline(&cli.global),
        Command::Analyze { n, p, lambda } => analyze(*n, *p, *lambda),
    }
}
