//! Quick property checks runnable from the command line.

use num_complex::Complex64;
use rand::Rng;

use super::config::{ExperimentConfig, ExperimentKind};
use super::exec::Executor;
use super::experiments::run_mae;
use super::output::CsvTable;
use crate::detector::ed_threshold;
use crate::error::Result;
use crate::estimator::{estimate_sto, ReceivedPilotMatrix};
use crate::rng::trial_rng;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// A matrix whose head `[0, n0)` entries all have power `p_head` and whose
/// tail entries all have power `p_tail`, with random phases.
pub fn segment_exact_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    n0: usize,
    p_head: f64,
    p_tail: f64,
    rng: &mut R,
) -> Result<ReceivedPilotMatrix> {
    let entries = (0..rows * cols)
        .map(|i| {
            let p = if i % cols < n0 { p_head } else { p_tail };
            Complex64::from_polar(p.sqrt(), rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    ReceivedPilotMatrix::new(rows, cols, entries)
}

fn exactness() -> Result<Check> {
    let mut rng = trial_rng(0x5e1f, 1, 0);
    let cases = 300;
    let mut hits = 0;
    for _ in 0..cases {
        let rows = rng.random_range(1..=40);
        let cols = rng.random_range(8..=64);
        let n0 = rng.random_range(2..cols);
        let ratio = rng.random_range(1.5..=20.0);
        let (a, b) = if rng.random_bool(0.5) { (1.0, ratio) } else { (ratio, 1.0) };
        let y = segment_exact_matrix(rows, cols, n0, a, b, &mut rng)?;
        hits += (estimate_sto(&y)?.n0_hat == n0) as usize;
    }
    Ok(Check {
        name: "estimator recovers noiseless segment splits",
        passed: hits == cases,
        detail: format!("{hits}/{cases}"),
    })
}

fn threshold_bracket() -> Result<Check> {
    let mut worst = f64::INFINITY;
    for n in (10..=1000).step_by(33) {
        // close to 1 the threshold overshoots the larger mean; start above that
        for ratio in [1.0 + 2.5 / n as f64, 1.5, 2.0, 10.0, 100.0] {
            let t = ed_threshold(n, 1.0, ratio)?;
            let n = n as f64;
            worst = worst.min((t - n).min(n * ratio - t));
        }
    }
    Ok(Check {
        name: "threshold lies between hypothesis means",
        passed: worst > 0.0,
        detail: format!("smallest margin {worst:.3e}"),
    })
}

fn determinism() -> Result<Check> {
    let cfg = ExperimentConfig {
        snr_grid: vec![5.0, 15.0],
        pilot_pairs: vec![20],
        trials: 200,
        seed: 7,
        ..ExperimentConfig::new(ExperimentKind::MaeVsSnr)
    };
    let one = run_mae(&cfg, &Executor::new(1)?)?.to_csv();
    let four = run_mae(&cfg, &Executor::new(4)?)?.to_csv();
    Ok(Check {
        name: "MAE CSV identical for 1 and 4 workers",
        passed: one == four,
        detail: format!("{} bytes", one.len()),
    })
}

pub fn run_all() -> Result<Vec<Check>> {
    Ok(vec![exactness()?, threshold_bracket()?, determinism()?])
}
