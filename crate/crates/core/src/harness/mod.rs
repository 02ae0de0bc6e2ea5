//! Seeded Monte Carlo experiments and their CSV output.

mod config;
mod exec;
mod experiments;
mod output;
pub mod selftest;

pub use config::{parse_snr_list, parse_snr_range, parse_tau_set, ExperimentConfig, ExperimentKind, TauSpec};
pub use exec::{Executor, Tally};
pub use experiments::{
    ber_trial, mae_trial, run_ber, run_error_hist, run_mae, BerResult, BerRow, BerTally,
    ErrorHistResult, MaeResult, MaeRow, MaeTally,
};
pub use output::{write_csv, CsvTable};
