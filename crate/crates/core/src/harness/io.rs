//! CSV input files: categories, tasks and executor pools.

use std::collections::BTreeSet;
use std::fs::File;
use std::path::Path;
use std::str::FromStr;

use csv::StringRecord;

use crate::error::{Error, Result};
use crate::model::{Executor, ExecutorId, RequesterId, Task};
use crate::money::Money;

pub const CATEGORIES_HEADER: [&str; 2] = ["category", "count"];
pub const TASKS_HEADER: [&str; 4] = ["requester_id", "task_index", "start", "finish"];
pub const POOL_HEADER: [&str; 3] = ["executor_id", "true_cost", "reported_cost"];

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads a headed CSV and hands each record with its 1-based line number to `row`.
fn read_rows<T>(path: &Path, header: &[&str], mut row: impl FnMut(&StringRecord, u64) -> Result<T>) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let found = reader.headers().map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    if found.iter().ne(header.iter().copied()) {
        return Err(parse_error(
            path,
            1,
            format!(
                "expected header {:?}, found {:?}",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|source| match source.position() {
            Some(pos) => parse_error(path, pos.line(), source.to_string()),
            None => Error::Csv {
                path: path.to_path_buf(),
                source,
            },
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(parse_error(
                path,
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        out.push(row(&record, line)?);
    }
    Ok(out)
}

fn field<T: FromStr>(path: &Path, line: u64, record: &StringRecord, idx: usize, name: &str) -> Result<T> {
    let raw = &record[idx];
    raw.parse()
        .map_err(|_| parse_error(path, line, format!("{name} {raw:?} is not valid")))
}

/// `category,count` rows in file order. Duplicate categories are rejected.
pub fn ingest_category_csv(path: &Path) -> Result<Vec<(String, u64)>> {
    let mut seen = BTreeSet::new();
    read_rows(path, &CATEGORIES_HEADER, |rec, line| {
        let name = rec[0].to_string();
        if name.is_empty() {
            return Err(parse_error(path, line, "empty category name"));
        }
        let count: u64 = field(path, line, rec, 1, "count")?;
        if !seen.insert(name.clone()) {
            return Err(parse_error(path, line, format!("duplicate category {name:?}")));
        }
        Ok((name, count))
    })
}

pub fn read_tasks_csv(path: &Path) -> Result<Vec<Task>> {
    read_rows(path, &TASKS_HEADER, |rec, line| {
        let task = Task::new(
            RequesterId(field(path, line, rec, 0, "requester_id")?),
            field(path, line, rec, 1, "task_index")?,
            field(path, line, rec, 2, "start")?,
            field(path, line, rec, 3, "finish")?,
        );
        if !task.is_well_formed() {
            return Err(parse_error(
                path,
                line,
                format!("task {task} has an invalid window or index"),
            ));
        }
        Ok(task)
    })
}

pub fn read_pool_csv(path: &Path) -> Result<Vec<Executor>> {
    read_rows(path, &POOL_HEADER, |rec, line| {
        let e = Executor {
            id: ExecutorId(field(path, line, rec, 0, "executor_id")?),
            true_cost: field::<Money>(path, line, rec, 1, "true_cost")?,
            reported_cost: field::<Money>(path, line, rec, 2, "reported_cost")?,
        };
        if !e.true_cost.is_positive() || !e.reported_cost.is_positive() {
            return Err(parse_error(
                path,
                line,
                format!("executor {} needs positive costs", e.id),
            ));
        }
        Ok(e)
    })
}
