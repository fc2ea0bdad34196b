//! Experiment orchestration: scenarios, episode loops, output files,
//! summaries, configuration overrides and the self-check suite.

pub mod experiment;
pub mod overrides;
pub mod report;
pub mod scenario;
pub mod verify;

pub use experiment::{evaluate_agent, harvest_user, run_all_seeds, run_experiment, train_ddpg, EpisodeRecord};
pub use overrides::{apply_override_file, apply_overrides};
pub use report::{comparison_table, csv_file_name, summarize, write_csv, write_csv_file, Summary, CSV_HEADER};
pub use scenario::{builtin_scenarios, scenario_by_name, Policy, Scenario};
pub use verify::{run_verify, CheckOutcome, VerifySizes};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CRNOMA_OUT_DIR";
