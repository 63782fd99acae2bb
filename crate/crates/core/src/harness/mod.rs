//! Monte Carlo experiments, bound checks and reports.

pub mod checks;
pub mod config;
pub mod experiments;
pub mod fit;
pub mod report;
pub mod stats;

pub use checks::{check_bounds, BoundCheckConfig, BoundCheckRow};
pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::{graph_experiment, mc_singularity, run_experiment, run_rank_process};
pub use fit::{fit_power_law, PowerFit};
pub use report::{read_rate_points, SizeRow, SummaryReport, CSV_HEADER};
