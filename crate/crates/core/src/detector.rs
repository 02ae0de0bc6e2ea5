//! Timing compensation and per-symbol energy detection.

use crate::error::{Error, Result};
use crate::frame::{FrameConfig, Waveform};
use crate::signal_model::ComplexSample;

/// Energy-detector settings for one coherence block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    pub n_samples: usize,
    pub p0: f64,
    pub p1: f64,
    pub threshold: f64,
}

impl DetectorParams {
    /// Derives the threshold from the hypothesis powers.
    pub fn new(n_samples: usize, p0: f64, p1: f64) -> Result<Self> {
        Ok(Self {
            n_samples,
            p0,
            p1,
            threshold: ed_threshold(n_samples, p0, p1)?,
        })
    }
}

/// Decision on one data symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionRecord {
    pub index: usize,
    pub statistic: f64,
    pub decided: u8,
    pub truth: Option<u8>,
}

impl DecisionRecord {
    pub fn is_error(&self) -> bool {
        self.truth.is_some_and(|t| t != self.decided)
    }
}

/// Removes an estimated offset `tau_hat` from the receiver clock, leaving a
/// residual offset of `tau - tau_hat`.
pub fn compensate(w: Waveform, tau_hat: i64) -> Result<Waveform> {
    w.shifted(-tau_hat)
}

/// Energy-detection threshold
/// `N·P0·P1/(P0+P1)·[1 + sqrt(1 + 2(P0+P1)·ln(P1/P0) / (N(P1−P0)))]`.
///
/// `ln(P1/P0)/(P1−P0)` is evaluated as `ln_1p(d/P0)/d` with `d = P1 − P0`
/// so ratios close to one keep full precision.
pub fn ed_threshold(n: usize, p0: f64, p1: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter("detector needs N >= 1".into()));
    }
    if !(p0 > 0.0 && p1 > 0.0 && p0.is_finite() && p1.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "hypothesis powers must be positive and finite, got ({p0}, {p1})"
        )));
    }
    let d = p1 - p0;
    if d == 0.0 {
        return Err(Error::DegenerateChannel(p0));
    }
    let n = n as f64;
    let sum = p0 + p1;
    let log_ratio_per_gap = (d / p0).ln_1p() / d;
    let radicand = 1.0 + 2.0 * sum * log_ratio_per_gap / n;
    Ok(n * p0 * p1 / sum * (1.0 + radicand.sqrt()))
}

/// `Γ = Σ |y(n)|²`
pub fn energy_statistic(window: &[ComplexSample]) -> f64 {
    window.iter().map(|v| v.norm_sqr()).sum()
}

/// Threshold test whose orientation follows the power ordering. `Γ = T`
/// falls on the `≥` side.
pub fn decide(gamma: f64, params: &DetectorParams) -> u8 {
    let above = gamma >= params.threshold;
    if params.p1 >= params.p0 {
        above as u8
    } else {
        (!above) as u8
    }
}

/// Compensates once, then detects every payload symbol on the nominal
/// symbol grid of the compensated clock.
pub fn detect_frame(
    w: Waveform,
    cfg: &FrameConfig,
    params: &DetectorParams,
    tau_hat: i64,
    truth: Option<&[u8]>,
) -> Result<Vec<DecisionRecord>> {
    if let Some(t) = truth {
        if t.len() != cfg.data_symbols {
            return Err(Error::PayloadLength {
                expected: cfg.data_symbols,
                got: t.len(),
            });
        }
    }
    let w = compensate(w, tau_hat)?;
    let n = cfg.data_symbol_samples;
    (0..cfg.data_symbols)
        .map(|k| {
            let statistic = energy_statistic(w.window(cfg.data_start() + k * n, n)?);
            Ok(DecisionRecord {
                index: k,
                statistic,
                decided: decide(statistic, params),
                truth: truth.map(|t| t[k]),
            })
        })
        .collect()
}

/// Bit errors in the payload of `w` without materialising decision records.
pub(crate) fn count_errors(
    w: &Waveform,
    cfg: &FrameConfig,
    params: &DetectorParams,
    truth: &[u8],
) -> Result<u64> {
    let n = cfg.data_symbol_samples;
    let mut errors = 0;
    for (k, &bit) in truth.iter().enumerate() {
        let gamma = energy_statistic(w.window(cfg.data_start() + k * n, n)?);
        errors += (decide(gamma, params) != bit) as u64;
    }
    Ok(errors)
}
