use std::collections::BTreeMap;

use rand::Rng;

use super::config::{ExperimentConfig, ExperimentKind, TauSpec};
use super::exec::{Executor, Tally};
use crate::detector::{compensate, count_errors, DetectorParams};
use crate::error::{Error, Result};
use crate::estimator::{collect_windows, estimate_sto, estimation_error};
use crate::frame::{apply_sto, build_bit_sequence, synthesize_received, FrameConfig, StoValue};
use crate::rng::trial_rng;
use crate::signal_model::{draw_channel, NoisePowers};

// Stream keys. MAE and BER keys leave SNR out, so every SNR point of a
// curve replays the same channels, offsets and source draws.
fn mae_key(pairs: usize) -> u64 {
    (1 << 48) | pairs as u64
}

fn hist_key(pairs: usize) -> u64 {
    (2 << 48) | pairs as u64
}

fn ber_key(pairs: usize, n: usize) -> u64 {
    (3 << 48) | ((pairs as u64) << 24) | n as u64
}

/// One pilot-only frame: draws a channel and an offset, estimates the
/// offset and returns `(τ, ε)`.
pub fn mae_trial<R: Rng + ?Sized>(
    frame: &FrameConfig,
    powers: &NoisePowers,
    tau: &TauSpec,
    rng: &mut R,
) -> Result<(i64, i64)> {
    let channel = draw_channel(rng, powers);
    let tau = tau.draw(rng);
    let bits = build_bit_sequence(frame, None, rng)?;
    let w = synthesize_received(&bits, frame, &channel, powers, rng)?;
    let w = apply_sto(w, StoValue::new(tau, frame.pilot_bit_samples)?)?;
    let est = estimate_sto(&collect_windows(&w, frame)?)?;
    Ok((tau, estimation_error(tau, est.tau_hat)))
}

/// Bit errors of one frame under ideal timing, uncompensated offset and
/// estimated compensation. All three share one received waveform.
pub fn ber_trial<R: Rng + ?Sized>(
    frame: &FrameConfig,
    powers: &NoisePowers,
    tau: &TauSpec,
    rng: &mut R,
) -> Result<BerTally> {
    let channel = loop {
        let ch = draw_channel(rng, powers);
        if !ch.is_near_degenerate() {
            break ch;
        }
    };
    let tau = tau.draw(rng);
    let bits = build_bit_sequence(frame, None, rng)?;
    let truth = bits.payload(frame);
    let params = DetectorParams::new(frame.data_symbol_samples, channel.p0, channel.p1)?;

    let ideal = synthesize_received(&bits, frame, &channel, powers, rng)?;
    let errors_ideal = count_errors(&ideal, frame, &params, truth)?;

    let offset = apply_sto(ideal, StoValue::new(tau, frame.pilot_bit_samples)?)?;
    let errors_no_comp = count_errors(&offset, frame, &params, truth)?;

    let est = estimate_sto(&collect_windows(&offset, frame)?)?;
    let fixed = compensate(offset, est.tau_hat)?;
    let errors_comp = count_errors(&fixed, frame, &params, truth)?;

    let gap = |a: u64, b: u64| (a as i64 - b as i64).unsigned_abs().pow(2);
    Ok(BerTally {
        errors_no_comp,
        errors_comp,
        errors_ideal,
        bits: frame.data_symbols as u64,
        frames: 1,
        sq_gap_no_comp_comp: gap(errors_no_comp, errors_comp),
        sq_gap_comp_ideal: gap(errors_comp, errors_ideal),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MaeTally {
    pub abs_sum: u64,
    pub sq_sum: u64,
    pub trials: u64,
}

impl Tally for MaeTally {
    fn merge(self, o: Self) -> Self {
        Self {
            abs_sum: self.abs_sum + o.abs_sum,
            sq_sum: self.sq_sum + o.sq_sum,
            trials: self.trials + o.trials,
        }
    }
}

impl MaeTally {
    fn from_error(e: i64) -> Self {
        let a = e.unsigned_abs();
        Self {
            abs_sum: a,
            sq_sum: a * a,
            trials: 1,
        }
    }

    pub fn mae(&self) -> f64 {
        self.abs_sum as f64 / self.trials as f64
    }

    /// Standard error of the mean absolute error.
    pub fn std_error(&self) -> f64 {
        let n = self.trials as f64;
        let m = self.mae();
        let var = (self.sq_sum as f64 / n - m * m).max(0.0) * n / (n - 1.0).max(1.0);
        (var / n).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaeRow {
    pub snr_db: f64,
    pub pairs: usize,
    pub mae: f64,
    pub trials: u64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MaeResult {
    pub rows: Vec<MaeRow>,
}

impl MaeResult {
    pub fn get(&self, snr_db: f64, pairs: usize) -> Option<&MaeRow> {
        self.rows.iter().find(|r| r.snr_db == snr_db && r.pairs == pairs)
    }
}

fn pilot_frame(cfg: &ExperimentConfig, pairs: usize) -> Result<FrameConfig> {
    FrameConfig::new(
        cfg.preamble_bits(),
        pairs,
        cfg.pilot_bit_samples,
        0,
        cfg.data_symbol_samples[0],
    )
}

fn check_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if cfg.kind != kind {
        return Err(Error::InvalidParameter(format!(
            "expected a {kind:?} configuration, got {:?}",
            cfg.kind
        )));
    }
    cfg.validate()
}

/// Mean absolute offset error for every `(SNR, L)` pair of the grid.
pub fn run_mae(cfg: &ExperimentConfig, exec: &Executor) -> Result<MaeResult> {
    check_kind(cfg, ExperimentKind::MaeVsSnr)?;
    let mut rows = Vec::new();
    for &snr_db in &cfg.snr_grid {
        let powers = NoisePowers::from_snr_db(snr_db)?;
        for &pairs in &cfg.pilot_pairs {
            let frame = pilot_frame(cfg, pairs)?;
            let tally: MaeTally = exec.run(cfg.trials, |t| {
                let mut rng = trial_rng(cfg.seed, mae_key(pairs), t);
                let (_, e) = mae_trial(&frame, &powers, &cfg.tau, &mut rng)?;
                Ok(MaeTally::from_error(e))
            })?;
            rows.push(MaeRow {
                snr_db,
                pairs,
                mae: tally.mae(),
                trials: tally.trials,
                std_error: tally.std_error(),
            });
        }
    }
    Ok(MaeResult { rows })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ErrorCounts(pub BTreeMap<i64, u64>);

impl Tally for ErrorCounts {
    fn merge(mut self, o: Self) -> Self {
        for (k, v) in o.0 {
            *self.0.entry(k).or_default() += v;
        }
        self
    }
}

/// Empirical pmf of `ε = τ - τ̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorHistResult {
    pub counts: BTreeMap<i64, u64>,
    pub trials: u64,
}

impl ErrorHistResult {
    pub fn probability(&self, eps: i64) -> f64 {
        self.counts.get(&eps).copied().unwrap_or(0) as f64 / self.trials as f64
    }

    pub fn pmf(&self) -> Vec<(i64, f64)> {
        self.counts
            .iter()
            .map(|(&e, &c)| (e, c as f64 / self.trials as f64))
            .collect()
    }

    /// Most frequent error; ties go to the smallest `|ε|`.
    pub fn mode(&self) -> Option<i64> {
        self.counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.abs().cmp(&a.0.abs())))
            .map(|(&e, _)| e)
    }

    /// Standard error of `P(ε = d) - P(ε = -d)` under multinomial sampling.
    pub fn asymmetry_std_error(&self, d: i64) -> f64 {
        let (p, q) = (self.probability(d), self.probability(-d));
        ((p + q - (p - q).powi(2)) / self.trials as f64).sqrt()
    }
}

/// Error histogram at the first SNR and first `L` of the configuration.
pub fn run_error_hist(cfg: &ExperimentConfig, exec: &Executor) -> Result<ErrorHistResult> {
    check_kind(cfg, ExperimentKind::ErrorHist)?;
    let powers = NoisePowers::from_snr_db(cfg.snr_grid[0])?;
    let pairs = cfg.pilot_pairs[0];
    let frame = pilot_frame(cfg, pairs)?;
    let counts: ErrorCounts = exec.run(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, hist_key(pairs), t);
        let (_, e) = mae_trial(&frame, &powers, &cfg.tau, &mut rng)?;
        Ok(ErrorCounts(BTreeMap::from([(e, 1)])))
    })?;
    Ok(ErrorHistResult {
        counts: counts.0,
        trials: cfg.trials,
    })
}

/// Error counts of the three receptions. The squared per-frame differences
/// give paired standard errors for the condition gaps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BerTally {
    pub errors_no_comp: u64,
    pub errors_comp: u64,
    pub errors_ideal: u64,
    pub bits: u64,
    pub frames: u64,
    pub sq_gap_no_comp_comp: u64,
    pub sq_gap_comp_ideal: u64,
}

impl Tally for BerTally {
    fn merge(self, o: Self) -> Self {
        Self {
            errors_no_comp: self.errors_no_comp + o.errors_no_comp,
            errors_comp: self.errors_comp + o.errors_comp,
            errors_ideal: self.errors_ideal + o.errors_ideal,
            bits: self.bits + o.bits,
            frames: self.frames + o.frames,
            sq_gap_no_comp_comp: self.sq_gap_no_comp_comp + o.sq_gap_no_comp_comp,
            sq_gap_comp_ideal: self.sq_gap_comp_ideal + o.sq_gap_comp_ideal,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerRow {
    pub snr_db: f64,
    pub n: usize,
    pub ber_no_comp: f64,
    pub ber_comp: f64,
    pub ber_ideal: f64,
    pub bits: u64,
    pub tally: BerTally,
}

impl BerRow {
    fn new(snr_db: f64, n: usize, t: BerTally) -> Self {
        let rate = |e: u64| if t.bits == 0 { 0.0 } else { e as f64 / t.bits as f64 };
        Self {
            snr_db,
            n,
            ber_no_comp: rate(t.errors_no_comp),
            ber_comp: rate(t.errors_comp),
            ber_ideal: rate(t.errors_ideal),
            bits: t.bits,
            tally: t,
        }
    }

    /// Binomial standard error of a bit error rate over this row's bits.
    pub fn std_error(&self, ber: f64) -> f64 {
        (ber * (1.0 - ber) / self.bits as f64).sqrt()
    }

    // Standard error of a BER difference from the per-frame error gaps,
    // which keeps the pairing and the within-frame correlation.
    fn paired_std_error(&self, gap_sum: i64, sq_sum: u64) -> f64 {
        let t = self.tally.frames as f64;
        let mean = gap_sum as f64 / t;
        let var = (sq_sum as f64 / t - mean * mean).max(0.0) * t / (t - 1.0).max(1.0);
        (var / t).sqrt() * t / self.bits as f64
    }

    /// Standard error of `ber_no_comp - ber_comp`.
    pub fn std_error_no_comp_minus_comp(&self) -> f64 {
        let t = &self.tally;
        self.paired_std_error(
            t.errors_no_comp as i64 - t.errors_comp as i64,
            t.sq_gap_no_comp_comp,
        )
    }

    /// Standard error of `ber_comp - ber_ideal`.
    pub fn std_error_comp_minus_ideal(&self) -> f64 {
        let t = &self.tally;
        self.paired_std_error(t.errors_comp as i64 - t.errors_ideal as i64, t.sq_gap_comp_ideal)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BerResult {
    pub rows: Vec<BerRow>,
}

impl BerResult {
    pub fn get(&self, snr_db: f64, n: usize) -> Option<&BerRow> {
        self.rows.iter().find(|r| r.snr_db == snr_db && r.n == n)
    }
}

/// Paired BER comparison for every `(SNR, N)` pair, using the first `L`.
pub fn run_ber(cfg: &ExperimentConfig, exec: &Executor) -> Result<BerResult> {
    check_kind(cfg, ExperimentKind::BerCompare)?;
    let pairs = cfg.pilot_pairs[0];
    let mut rows = Vec::new();
    for &snr_db in &cfg.snr_grid {
        let powers = NoisePowers::from_snr_db(snr_db)?;
        for &n in &cfg.data_symbol_samples {
            let frame = FrameConfig::new(
                cfg.preamble_bits(),
                pairs,
                cfg.pilot_bit_samples,
                cfg.data_symbols,
                n,
            )?;
            let tally: BerTally = exec.run(cfg.trials, |t| {
                let mut rng = trial_rng(cfg.seed, ber_key(pairs, n), t);
                ber_trial(&frame, &powers, &cfg.tau, &mut rng)
            })?;
            rows.push(BerRow::new(snr_db, n, tally));
        }
    }
    Ok(BerResult { rows })
}
