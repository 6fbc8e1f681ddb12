//! Experiment harness: configuration, data generation, CSV I/O, end-to-end
//! runs and report emission.

pub mod config;
pub mod generate;
pub mod io;
pub mod pipeline;
pub mod report;

pub use config::{BidDistribution, ExperimentConfig, MechanismKind, SlotSpec, Tier2Mode};
pub use generate::{gen_executors, gen_preferences, gen_requesters};
pub use io::{ingest_category_csv, read_pool_csv, read_tasks_csv};
pub use pipeline::{run_pipeline, MonteCarloRow, RoundReport, RunReport, Timing};
pub use report::{emit_report, metrics, MetricRow};
