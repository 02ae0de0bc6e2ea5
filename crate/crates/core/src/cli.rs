//! Command-line front end: `mae`, `hist`, `ber` and `selftest`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::harness::{
    parse_snr_list, parse_snr_range, parse_tau_set, run_ber, run_error_hist, run_mae, selftest,
    write_csv, CsvTable, Executor, ExperimentConfig, ExperimentKind, TauSpec,
};

#[derive(Debug, Parser)]
#[command(name = "ambc", about = "Timing offset estimation and BER experiments for ambient backscatter links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mean absolute offset error versus SNR
    Mae(ExperimentArgs),
    /// Distribution of the offset estimation error
    Hist(ExperimentArgs),
    /// BER with ideal timing, uncompensated offset and compensation
    Ber(ExperimentArgs),
    /// Run the built-in property checks
    Selftest,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Comma-separated SNR values in dB
    #[arg(long, allow_hyphen_values = true, conflicts_with = "snr_range")]
    snr: Option<String>,
    /// SNR grid as start:stop:step in dB
    #[arg(long, allow_hyphen_values = true)]
    snr_range: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Pilot pair counts L, comma-separated
    #[arg(long, default_value = "30", value_delimiter = ',')]
    pairs: Vec<usize>,
    /// Samples per pilot bit
    #[arg(long, default_value_t = 30)]
    np: usize,
    /// Samples per data symbol, comma-separated
    #[arg(long, default_value = "50", value_delimiter = ',')]
    n: Vec<usize>,
    /// Data symbols per frame
    #[arg(long, default_value_t = 50)]
    k: usize,
    /// Offsets drawn uniformly, e.g. -10,10
    #[arg(long, allow_hyphen_values = true, conflicts_with = "tau_set")]
    tau: Option<String>,
    /// Offset set with inclusive ranges, e.g. -10..-5,5..10
    #[arg(long, allow_hyphen_values = true)]
    tau_set: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores); AMBC_THREADS takes precedence
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl ExperimentArgs {
    fn into_config(self, kind: ExperimentKind) -> Result<ExperimentConfig> {
        let snr_grid = match (&self.snr, &self.snr_range) {
            (Some(s), _) => parse_snr_list(s)?,
            (None, Some(r)) => parse_snr_range(r)?,
            (None, None) => vec![15.0],
        };
        let tau = match (&self.tau, &self.tau_set) {
            (Some(s), _) | (None, Some(s)) => {
                let v = parse_tau_set(s)?;
                if v.len() == 1 {
                    TauSpec::Fixed(v[0])
                } else {
                    TauSpec::Uniform(v)
                }
            }
            (None, None) => TauSpec::Uniform(vec![-10, 10]),
        };
        let cfg = ExperimentConfig {
            kind,
            snr_grid,
            trials: self.trials,
            pilot_pairs: self.pairs,
            pilot_bit_samples: self.np,
            data_symbol_samples: self.n,
            data_symbols: self.k,
            tau,
            seed: self.seed,
            output: self.out,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(cfg: &ExperimentConfig, table: &impl CsvTable, summary: String) -> Result<()> {
    match &cfg.output {
        Some(path) => {
            write_csv(path, table)?;
            println!("{summary}; wrote {}", path.display());
        }
        None => {
            print!("{}", table.to_csv());
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn run(command: Command) -> Result<i32> {
    let (kind, args) = match command {
        Command::Selftest => {
            let checks = selftest::run_all()?;
            let mut ok = true;
            for c in &checks {
                println!("[{}] {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                ok &= c.passed;
            }
            return Ok(if ok { 0 } else { 1 });
        }
        Command::Mae(a) => (ExperimentKind::MaeVsSnr, a),
        Command::Hist(a) => (ExperimentKind::ErrorHist, a),
        Command::Ber(a) => (ExperimentKind::BerCompare, a),
    };
    let threads = args.threads;
    let cfg = args.into_config(kind)?;
    let exec = Executor::from_env(threads)?;
    match kind {
        ExperimentKind::MaeVsSnr => {
            let r = run_mae(&cfg, &exec)?;
            let s = format!("mae: {} points x {} trials", r.rows.len(), cfg.trials);
            emit(&cfg, &r, s)?;
        }
        ExperimentKind::ErrorHist => {
            let r = run_error_hist(&cfg, &exec)?;
            let s = format!(
                "hist: {} trials, mode {:?}, P(0) = {:.4}",
                r.trials,
                r.mode(),
                r.probability(0)
            );
            emit(&cfg, &r, s)?;
        }
        ExperimentKind::BerCompare => {
            let r = run_ber(&cfg, &exec)?;
            let bits: u64 = r.rows.iter().map(|b| b.bits).sum();
            let s = format!("ber: {} points, {bits} bits", r.rows.len());
            emit(&cfg, &r, s)?;
        }
    }
    Ok(0)
}

/// Parses `argv` (program name first) and runs it. Returns 0 on success,
/// 1 on a runtime failure and 2 on a usage error.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e @ (Error::InvalidParameter(_) | Error::UndetectableOffset { .. })) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
