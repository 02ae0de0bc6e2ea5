//! Maximum-likelihood symbol timing offset estimation from the pilot.
//!
//! Each pilot window is modelled as two zero-mean complex Gaussian segments
//! that switch variance at an unknown transition point `n0`. With the
//! segment variances replaced by their ML estimates, the log-likelihood
//! reduces to `-n0·L·ln σ̂1² - (N_p - n0)·L·ln σ̂2²`, which is scanned over
//! `n0 ∈ {2, …, N_p - 1}`. The maximiser is then mapped to a signed offset.

use crate::error::{Error, Result};
use crate::frame::{FrameConfig, Waveform};
use crate::signal_model::ComplexSample;

/// `L × N_p` matrix of pilot windows, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedPilotMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ComplexSample>,
}

impl ReceivedPilotMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<ComplexSample>) -> Result<Self> {
        if rows < 1 || cols < 4 {
            return Err(Error::InvalidParameter(format!(
                "pilot matrix must be at least 1 x 4, got {rows} x {cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "{} entries do not fill a {rows} x {cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidParameter("non-finite pilot sample".into()));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<ComplexSample>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("ragged pilot rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// `L`
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// `N_p`
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, l: usize) -> &[ComplexSample] {
        &self.entries[l * self.cols..(l + 1) * self.cols]
    }

    pub fn scaled(&self, c: ComplexSample) -> Result<Self> {
        Self::new(self.rows, self.cols, self.entries.iter().map(|v| v * c).collect())
    }

    /// `Σ_l |y_l(n)|²` for every column `n`, rows summed in order.
    pub fn column_energy(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.cols];
        for row in self.entries.chunks_exact(self.cols) {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v.norm_sqr();
            }
        }
        acc
    }
}

/// One candidate of the likelihood scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub n0: usize,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub loglik: f64,
}

/// Reduced log-likelihood for every candidate `n0 ∈ {2, …, N_p - 1}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LikelihoodTrace {
    pub entries: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoEstimate {
    pub n0_hat: usize,
    pub tau_hat: i64,
    pub trace: LikelihoodTrace,
}

/// Gathers one `N_p`-sample window per pilot pair, aligned to the pair's
/// "1" bit under the receiver's clock: window `l` (1-based) starts at
/// `pilot_start + (2l - 1)·N_p`.
pub fn collect_windows(w: &Waveform, cfg: &FrameConfig) -> Result<ReceivedPilotMatrix> {
    let np = cfg.pilot_bit_samples;
    let mut entries = Vec::with_capacity(cfg.pilot_pairs * np);
    for l in 1..=cfg.pilot_pairs {
        entries.extend_from_slice(w.window(cfg.pilot_start() + (2 * l - 1) * np, np)?);
    }
    ReceivedPilotMatrix::new(cfg.pilot_pairs, np, entries)
}

fn check_split(y: &ReceivedPilotMatrix, n0: usize) -> Result<()> {
    if n0 < 1 || n0 >= y.cols {
        return Err(Error::TransitionOutOfRange {
            n0,
            max: y.cols - 1,
        });
    }
    Ok(())
}

// Head sums left to right, tail sums right to left; the scan in
// `estimate_sto` accumulates in the same order so both paths agree bitwise.
fn split_energy(col: &[f64], n0: usize) -> (f64, f64) {
    let head = col[..n0].iter().sum::<f64>();
    let tail = col[n0..].iter().rev().sum::<f64>();
    (head, tail)
}

fn plug_in(head: f64, tail: f64, rows: usize, cols: usize, n0: usize) -> TraceEntry {
    let (l, n1, n2) = (rows as f64, n0 as f64, (cols - n0) as f64);
    let sigma1_sq = head / (l * n1);
    let sigma2_sq = tail / (l * n2);
    TraceEntry {
        n0,
        sigma1_sq,
        sigma2_sq,
        loglik: -n1 * l * sigma1_sq.ln() - n2 * l * sigma2_sq.ln(),
    }
}

/// ML variance estimates of the head `[1, n0]` and tail `[n0 + 1, N_p]`
/// segments pooled over all rows.
pub fn variance_estimates(y: &ReceivedPilotMatrix, n0: usize) -> Result<(f64, f64)> {
    check_split(y, n0)?;
    let (head, tail) = split_energy(&y.column_energy(), n0);
    let e = plug_in(head, tail, y.rows, y.cols, n0);
    Ok((e.sigma1_sq, e.sigma2_sq))
}

/// Reduced log-likelihood at transition point `n0`.
pub fn log_likelihood_reduced(y: &ReceivedPilotMatrix, n0: usize) -> Result<f64> {
    check_split(y, n0)?;
    let (head, tail) = split_energy(&y.column_energy(), n0);
    let e = plug_in(head, tail, y.rows, y.cols, n0);
    if e.sigma1_sq <= 0.0 || e.sigma2_sq <= 0.0 {
        return Err(Error::DegenerateSegment);
    }
    Ok(e.loglik)
}

/// Signed offset for transition point `n0_hat`: an early clock when
/// `n0_hat < N_p / 2`, a late one otherwise.
pub fn tau_from_transition(n0_hat: usize, pilot_bit_samples: usize) -> i64 {
    if 2 * n0_hat < pilot_bit_samples {
        -(n0_hat as i64)
    } else {
        (pilot_bit_samples - n0_hat) as i64
    }
}

/// Relative resolution below which two candidates count as tied. Rounding
/// in the pooled sums moves the objective by ~1e-14 relative; genuine
/// differences between candidates are many orders larger.
const TIE_RTOL: f64 = 1e-12;

/// Scans the reduced log-likelihood and returns the maximising transition
/// point with its signed offset. Ties, up to floating-point resolution of
/// the objective, go to the smallest `n0`.
pub fn estimate_sto(y: &ReceivedPilotMatrix) -> Result<StoEstimate> {
    let np = y.cols;
    let col = y.column_energy();

    let mut suffix = vec![0.0; np + 1];
    for n in (0..np).rev() {
        suffix[n] = suffix[n + 1] + col[n];
    }

    let resolution = TIE_RTOL * (y.rows * np) as f64;
    let mut entries = Vec::with_capacity(np - 2);
    let mut head = col[0];
    let mut best: Option<TraceEntry> = None;
    for n0 in 2..np {
        head += col[n0 - 1];
        let e = plug_in(head, suffix[n0], y.rows, np, n0);
        if e.sigma1_sq <= 0.0 || e.sigma2_sq <= 0.0 {
            return Err(Error::DegenerateSegment);
        }
        if best.is_none_or(|b| e.loglik > b.loglik + resolution + TIE_RTOL * b.loglik.abs()) {
            best = Some(e);
        }
        entries.push(e);
    }
    let n0_hat = best.expect("N_p >= 4 gives at least two candidates").n0;
    Ok(StoEstimate {
        n0_hat,
        tau_hat: tau_from_transition(n0_hat, np),
        trace: LikelihoodTrace { entries },
    })
}

/// `ε = τ - τ̂`
pub fn estimation_error(tau_true: i64, tau_hat: i64) -> i64 {
    tau_true - tau_hat
}
