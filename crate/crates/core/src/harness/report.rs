//! Metric tables and CSV emission.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::pipeline::RunReport;
use crate::model::{SlotAuctionReport, TaskKey};
use crate::money::Money;

pub const METRICS_HEADER: &str = "round,slot,mechanism,sum_te_utility,budget_utilized,n_winners";
pub const FUNDING_HEADER: &str = "requester_id,tally,funded,admission_order";
pub const SCHEDULE_HEADER: &str = "requester_id,task_index,slot";
pub const MONTECARLO_HEADER: &str = "n,p,trials,mean,stderr,exact";
pub const TIMINGS_HEADER: &str = "mechanism,n_agents,millis";

/// Label written in the `round` column of averaged rows.
pub const AVERAGE_ROUND: &str = "avg";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricRow {
    /// `None` marks the average over rounds.
    pub round: Option<u32>,
    pub slot: usize,
    pub mechanism: String,
    pub sum_te_utility: Money,
    pub budget_utilized: Money,
    pub n_winners: Money,
}

impl MetricRow {
    fn from_report(round: u32, report: &SlotAuctionReport) -> Self {
        MetricRow {
            round: Some(round),
            slot: report.slot_index,
            mechanism: report.mechanism.clone(),
            sum_te_utility: report.totals.te_utility,
            budget_utilized: report.totals.payments,
            n_winners: Money::from_int(report.totals.winners as i64),
        }
    }
}

/// Per-round rows for every slot and mechanism, followed by their averages
/// over the rounds in which each (slot, mechanism) pair occurred.
pub fn metrics(report: &RunReport) -> Vec<MetricRow> {
    let mut rows = Vec::new();
    let mut sums: BTreeMap<(usize, String), (MetricRow, u64)> = BTreeMap::new();
    let mut first_seen: Vec<(usize, String)> = Vec::new();
    for round in &report.rounds {
        for auction in &round.auctions {
            let row = MetricRow::from_report(round.round, auction);
            let key = (row.slot, row.mechanism.clone());
            match sums.get_mut(&key) {
                Some((acc, count)) => {
                    acc.sum_te_utility += row.sum_te_utility;
                    acc.budget_utilized += row.budget_utilized;
                    acc.n_winners += row.n_winners;
                    *count += 1;
                }
                None => {
                    first_seen.push(key.clone());
                    sums.insert(key, (row.clone(), 1));
                }
            }
            rows.push(row);
        }
    }
    first_seen.sort_by_key(|(slot, _)| *slot);
    for key in first_seen {
        let (acc, count) = &sums[&key];
        rows.push(MetricRow {
            round: None,
            slot: acc.slot,
            mechanism: acc.mechanism.clone(),
            sum_te_utility: acc.sum_te_utility.div_int(*count),
            budget_utilized: acc.budget_utilized.div_int(*count),
            n_winners: acc.n_winners.div_int(*count),
        });
    }
    rows
}

fn write_file(dir: &Path, name: &str, header: &str, lines: impl IntoIterator<Item = String>) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut body = String::new();
    body.push_str(header);
    body.push('\n');
    for line in lines {
        body.push_str(&line);
        body.push('\n');
    }
    let mut file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    file.write_all(body.as_bytes()).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Writes `metrics.csv`, `funding.csv`, `schedule.csv`, `montecarlo.csv` and
/// `timings.csv` into `out_dir`, replacing existing files.
///
/// Funding and schedule rows describe round 0.
pub fn emit_report(report: &RunReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();

    let metric_lines = metrics(report).into_iter().map(|r| {
        let round = r.round.map_or(AVERAGE_ROUND.to_string(), |n| n.to_string());
        format!(
            "{round},{},{},{},{},{}",
            r.slot,
            csv_field(&r.mechanism),
            r.sum_te_utility,
            r.budget_utilized,
            r.n_winners
        )
    });
    written.push(write_file(out_dir, "metrics.csv", METRICS_HEADER, metric_lines)?);

    let first = report.rounds.first();
    let funding_lines: Vec<String> = first
        .and_then(|r| r.decision.as_ref())
        .map(|d| {
            d.tally
                .iter()
                .map(|(id, votes)| {
                    let order = d.admission_position(*id).map_or(String::new(), |p| (p + 1).to_string());
                    format!("{},{votes},{},{order}", id.0, d.is_funded(*id))
                })
                .collect()
        })
        .unwrap_or_default();
    written.push(write_file(out_dir, "funding.csv", FUNDING_HEADER, funding_lines)?);

    let schedule: BTreeMap<TaskKey, usize> = first.map(|r| r.assignment.slot_of()).unwrap_or_default();
    let schedule_lines = schedule
        .iter()
        .map(|(k, slot)| format!("{},{},{slot}", k.requester.0, k.index));
    written.push(write_file(out_dir, "schedule.csv", SCHEDULE_HEADER, schedule_lines)?);

    let mc_lines = report.montecarlo.iter().map(|row| {
        format!(
            "{},{},{},{},{},{}",
            row.n, row.p, row.estimate.trials, row.estimate.mean, row.estimate.standard_error, row.exact
        )
    });
    written.push(write_file(out_dir, "montecarlo.csv", MONTECARLO_HEADER, mc_lines)?);

    let timing_lines = report
        .rounds
        .iter()
        .flat_map(|r| r.timings.iter())
        .chain(report.scaling.iter())
        .map(|t| format!("{},{},{:.3}", csv_field(&t.mechanism), t.n_agents, t.millis));
    written.push(write_file(out_dir, "timings.csv", TIMINGS_HEADER, timing_lines)?);

    Ok(written)
}
