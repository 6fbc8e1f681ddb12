//! Tier 2 scheduling: partition tasks into the fewest conflict-free slots.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{incompatible, Task, TaskKey};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotAssignment {
    /// Tasks of each slot in placement order; slot `ℓ` is `slots[ℓ - 1]`.
    pub slots: Vec<Vec<Task>>,
}

impl SlotAssignment {
    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    /// 1-based slot of every task.
    pub fn slot_of(&self) -> BTreeMap<TaskKey, usize> {
        self.slots
            .iter()
            .enumerate()
            .flat_map(|(i, tasks)| tasks.iter().map(move |t| (t.key(), i + 1)))
            .collect()
    }

    pub fn slot(&self, index: usize) -> Option<&[Task]> {
        index.checked_sub(1).and_then(|i| self.slots.get(i)).map(Vec::as_slice)
    }
}

/// Canonical processing order: start, then finish, requester and task index.
pub fn sort_tasks(tasks: &mut [Task]) {
    tasks.sort_by_key(|t| (t.start, t.finish, t.requester, t.index));
}

/// First-fit interval partitioning.
///
/// Tasks are taken in [`sort_tasks`] order and each goes to the lowest-indexed
/// open slot holding nothing it conflicts with, or to a fresh slot.
pub fn partition_into_slots(tasks: &[Task]) -> SlotAssignment {
    let mut ordered = tasks.to_vec();
    sort_tasks(&mut ordered);
    let mut slots: Vec<Vec<Task>> = Vec::new();
    // Largest finish time per slot. With starts non-decreasing, a task fits a
    // slot iff it starts strictly after that slot's latest finish.
    let mut latest_finish: Vec<i64> = Vec::new();
    for task in ordered {
        match latest_finish.iter().position(|&f| f < task.start) {
            Some(i) => {
                debug_assert!(slots[i].iter().all(|other| !incompatible(other, &task)));
                latest_finish[i] = latest_finish[i].max(task.finish);
                slots[i].push(task);
            }
            None => {
                latest_finish.push(task.finish);
                slots.push(vec![task]);
            }
        }
    }
    SlotAssignment { slots }
}

/// Largest number of closed task intervals sharing a single integer point.
pub fn max_overlap_depth(tasks: &[Task]) -> usize {
    // Opening at `start` and closing just after `finish`; closes sort first at equal points.
    let mut events: Vec<(i64, i32)> = Vec::with_capacity(tasks.len() * 2);
    for t in tasks {
        events.push((t.start, 1));
        events.push((t.finish.saturating_add(1), -1));
    }
    events.sort_unstable();
    let mut depth = 0i64;
    let mut best = 0i64;
    for (_, delta) in events {
        depth += i64::from(delta);
        best = best.max(depth);
    }
    best as usize
}
