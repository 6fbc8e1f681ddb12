//! Experiment configuration, read from TOML.
//!
//! Every field has a default, so an empty file is a valid configuration. See
//! `configs/` at the repository root for annotated examples.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::money::Money;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Independent repetitions; each uses a seed derived from `seed`.
    pub rounds: u32,
    /// Monte Carlo trials per grid cell.
    pub trials: u64,
    /// Round each task's budget share down to whole dollars.
    pub floor_mode: bool,
    pub mechanisms: Vec<MechanismKind>,
    pub tier1: Tier1Config,
    pub tier2: Tier2Config,
    pub mgm: ManipulationConfig,
    pub montecarlo: MonteCarloConfig,
    pub scaling: ScalingConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            rounds: 1,
            trials: 100_000,
            floor_mode: false,
            mechanisms: vec![MechanismKind::Bulinc, MechanismKind::Gm, MechanismKind::Mgm],
            tier1: Tier1Config::default(),
            tier2: Tier2Config::default(),
            mgm: ManipulationConfig::default(),
            montecarlo: MonteCarloConfig::default(),
            scaling: ScalingConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MechanismKind {
    /// Proportional-share auction with threshold payments.
    #[serde(rename = "BULINC")]
    Bulinc,
    /// Pay-as-bid greedy on truthful bids.
    #[serde(rename = "GM")]
    Gm,
    /// Pay-as-bid greedy after a subset of executors inflate their bids.
    #[serde(rename = "MGM")]
    Mgm,
}

impl MechanismKind {
    pub fn label(self) -> &'static str {
        match self {
            MechanismKind::Bulinc => "BULINC",
            MechanismKind::Gm => "GM",
            MechanismKind::Mgm => "MGM",
        }
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MechanismKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "BULINC" => Ok(MechanismKind::Bulinc),
            "GM" => Ok(MechanismKind::Gm),
            "MGM" => Ok(MechanismKind::Mgm),
            other => Err(Error::Config(format!("unknown mechanism {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tier1Config {
    pub enabled: bool,
    pub n_requesters: u32,
    pub n_dwellers: u32,
    /// Inclusive range of generated requester budgets (whole dollars).
    pub budget_range: [Money; 2],
    pub government_budget: Money,
    pub tasks_per_requester: [u32; 2],
    /// Generated tasks start in `[0, horizon)`.
    pub horizon: i64,
    /// Inclusive range of `finish − start` for generated tasks.
    pub task_length: [i64; 2],
    /// Fixed requesters; replaces generation when non-empty.
    pub requesters: Vec<RequesterSpec>,
    /// Fixed ballots (requester ids, best first); replaces generation when set.
    pub ballots: Option<Vec<Vec<u32>>>,
}

impl Default for Tier1Config {
    fn default() -> Self {
        Tier1Config {
            enabled: true,
            n_requesters: 5,
            n_dwellers: 10,
            budget_range: [Money::from_int(10), Money::from_int(50)],
            government_budget: Money::from_int(100),
            tasks_per_requester: [1, 4],
            horizon: 24,
            task_length: [1, 4],
            requesters: Vec::new(),
            ballots: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequesterSpec {
    pub id: u32,
    pub budget: Money,
    /// `[start, finish]` per task, numbered from 1 in listed order.
    pub tasks: Vec<[i64; 2]>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier2Mode {
    /// Slots come from scheduling the funded requesters' tasks.
    #[default]
    Pipeline,
    /// Tier 1 is bypassed: each slot spec carries its own budget and task count.
    Direct,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tier2Config {
    pub mode: Tier2Mode,
    /// Executor pool per slot. In pipeline mode slot `ℓ` uses entry
    /// `(ℓ − 1) mod len`.
    pub slots: Vec<SlotSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlotSpec {
    pub n_executors: u32,
    pub distribution: BidDistribution,
    /// Fixed truthful costs for executors `1..=len`; replaces generation when set.
    pub costs: Option<Vec<Money>>,
    /// Slot budget (direct mode only).
    pub budget: Option<Money>,
    /// Tasks sharing the slot budget equally (direct mode only).
    pub tasks: u32,
}

impl Default for SlotSpec {
    fn default() -> Self {
        SlotSpec {
            n_executors: 50,
            distribution: BidDistribution::Uniform {
                lo: Money::from_int(10),
                hi: Money::from_int(25),
            },
            costs: None,
            budget: None,
            tasks: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BidDistribution {
    Uniform { lo: Money, hi: Money },
    Normal { mean: Money, sd: Money },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ManipulationConfig {
    /// Share of each pool that inflates its bids.
    pub fraction: Money,
    /// Relative bid increase, e.g. 0.3 for +30%.
    pub inflation: Money,
}

impl Default for ManipulationConfig {
    fn default() -> Self {
        ManipulationConfig {
            fraction: Money::from_ratio(3, 10),
            inflation: Money::from_ratio(3, 10),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub n: Vec<u64>,
    pub p: Vec<f64>,
    /// `category,count` file whose counts are appended to `n`.
    pub categories_csv: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    /// Pool sizes for the single-task running-time sweep.
    pub pool_sizes: Vec<u32>,
    /// Budget of the swept task; defaults to the pool size.
    pub budget: Option<Money>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config; a relative `categories_csv` resolves against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        if let (Some(csv), Some(dir)) = (&cfg.montecarlo.categories_csv, path.parent()) {
            if csv.is_relative() {
                cfg.montecarlo.categories_csv = Some(dir.join(csv));
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.rounds == 0 {
            return bad("rounds must be at least 1".into());
        }
        if self.trials == 0 && !self.montecarlo.p.is_empty() {
            return bad("trials must be at least 1".into());
        }
        let t1 = &self.tier1;
        if t1.budget_range[0] > t1.budget_range[1] || t1.budget_range[0].is_negative() {
            return bad(format!(
                "tier1.budget_range {:?} is not a non-negative range",
                t1.budget_range
            ));
        }
        if t1.government_budget.is_negative() {
            return bad("tier1.government_budget is negative".into());
        }
        if t1.tasks_per_requester[0] == 0 || t1.tasks_per_requester[0] > t1.tasks_per_requester[1] {
            return bad("tier1.tasks_per_requester must be a range starting at 1 or more".into());
        }
        if t1.horizon <= 0 {
            return bad("tier1.horizon must be positive".into());
        }
        if t1.task_length[0] < 0 || t1.task_length[0] > t1.task_length[1] {
            return bad("tier1.task_length must be a non-negative range".into());
        }
        for (i, slot) in self.tier2.slots.iter().enumerate() {
            match slot.distribution {
                BidDistribution::Uniform { lo, hi } if lo > hi || !lo.is_positive() => {
                    return bad(format!("tier2.slots[{i}]: uniform bids need 0 < lo <= hi"));
                }
                BidDistribution::Normal { sd, .. } if !sd.is_positive() => {
                    return bad(format!("tier2.slots[{i}]: normal bids need sd > 0"));
                }
                _ => {}
            }
            if let Some(costs) = &slot.costs {
                if costs.iter().any(|c| !c.is_positive()) {
                    return bad(format!("tier2.slots[{i}]: costs must be positive"));
                }
            }
            if self.tier2.mode == Tier2Mode::Direct {
                if slot.budget.is_none_or(|b| b.is_negative()) {
                    return bad(format!("tier2.slots[{i}]: direct mode needs a non-negative budget"));
                }
                if slot.tasks == 0 {
                    return bad(format!("tier2.slots[{i}]: direct mode needs at least one task"));
                }
            }
        }
        let m = &self.mgm;
        if m.fraction.is_negative() || m.fraction > Money::ONE {
            return bad("mgm.fraction must lie in [0, 1]".into());
        }
        if m.inflation.is_negative() {
            return bad("mgm.inflation must be non-negative".into());
        }
        if let Some(p) = self.montecarlo.p.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return bad(format!("montecarlo.p value {p} is outside (0, 1]"));
        }
        if self.montecarlo.n.contains(&0) {
            return bad("montecarlo.n values must be positive".into());
        }
        Ok(())
    }
}
