//! Experiment configuration, execution, aggregation and output.

pub mod bundles;
pub mod config;
pub mod output;
pub mod recap;
pub mod runner;

pub use config::{default_budget, AlgoId, HorizonMode, Hyperparams, MemoryMode, Resolved, ScenarioConfig, EVAL_EVERY};
pub use output::{read_outputs, write_outputs, OutputFormat, Summary};
pub use recap::{aggregate, RecapRow, Stat};
pub use runner::{run_matrix, run_matrix_serial, run_single, sample_complexity, HeatmapSnapshot, MetricSample, Oracle, RunLog};
