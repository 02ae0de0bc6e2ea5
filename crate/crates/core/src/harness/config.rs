use std::path::PathBuf;

use rand::Rng;

use crate::error::{Error, Result};
use crate::frame::FrameConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    MaeVsSnr,
    ErrorHist,
    BerCompare,
}

/// Distribution of the injected timing offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TauSpec {
    Fixed(i64),
    /// Uniform over the listed values.
    Uniform(Vec<i64>),
}

impl TauSpec {
    pub fn values(&self) -> &[i64] {
        match self {
            TauSpec::Fixed(t) => std::slice::from_ref(t),
            TauSpec::Uniform(v) => v,
        }
    }

    pub fn max_abs(&self) -> u64 {
        self.values().iter().map(|t| t.unsigned_abs()).max().unwrap_or(0)
    }

    /// Always consumes one draw so trial streams line up across specs.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let v = self.values();
        v[rng.random_range(0..v.len())]
    }
}

/// Everything that determines an experiment's output.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub snr_grid: Vec<f64>,
    pub trials: u64,
    /// Pilot pair counts `L`; MAE rows are produced for each.
    pub pilot_pairs: Vec<usize>,
    pub pilot_bit_samples: usize,
    /// Samples per data symbol `N`; BER rows are produced for each.
    pub data_symbol_samples: Vec<usize>,
    /// Data symbols per frame `K` (BER only).
    pub data_symbols: usize,
    pub tau: TauSpec,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults: `L = 30`, `N_p = 30`, `N = 50`, `K = 50`, τ = ±10.
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            snr_grid: vec![15.0],
            trials: 10_000,
            pilot_pairs: vec![30],
            pilot_bit_samples: 30,
            data_symbol_samples: vec![50],
            data_symbols: 50,
            tau: TauSpec::Uniform(vec![-10, 10]),
            seed: 0,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.trials < 1 {
            return bad("trials must be >= 1".into());
        }
        if self.snr_grid.is_empty() || self.snr_grid.iter().any(|s| !s.is_finite()) {
            return bad("SNR grid must be non-empty and finite".into());
        }
        if self.pilot_pairs.is_empty() || self.data_symbol_samples.is_empty() {
            return bad("pilot pair and symbol length lists must be non-empty".into());
        }
        if self.tau.values().is_empty() {
            return bad("timing offset set is empty".into());
        }
        let np = self.pilot_bit_samples as u64;
        if let Some(t) = self.tau.values().iter().find(|t| 2 * t.unsigned_abs() >= np) {
            return Err(Error::UndetectableOffset {
                tau: *t,
                pilot_bit_samples: self.pilot_bit_samples,
            });
        }
        for &l in &self.pilot_pairs {
            FrameConfig::new(1, l, self.pilot_bit_samples, 0, 1)?;
        }
        // The guard must absorb the largest late clock: the injected offset
        // itself, and for BER also the worst compensated residual.
        let reach = match self.kind {
            ExperimentKind::BerCompare => self.tau.max_abs() + np / 2,
            _ => self.tau.max_abs(),
        };
        if let Some(n) = self.data_symbol_samples.iter().find(|&&n| (n as u64) < reach) {
            return bad(format!(
                "data symbol length {n} cannot absorb clock offsets up to {reach} samples"
            ));
        }
        Ok(())
    }

    /// Preamble bits needed to absorb the earliest clock the experiment can
    /// produce.
    pub(crate) fn preamble_bits(&self) -> usize {
        let np = self.pilot_bit_samples as u64;
        let reach = self.tau.max_abs() + np / 2;
        reach.div_ceil(np).max(1) as usize
    }
}

/// Comma-separated SNR values in dB.
pub fn parse_snr_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad SNR value '{v}'")))
        })
        .collect()
}

/// `start:stop:step`, inclusive of `stop` when the grid lands on it.
pub fn parse_snr_range(s: &str) -> Result<Vec<f64>> {
    let parts = parse_snr_list(&s.replace(':', ","))?;
    let [start, stop, step] = parts[..] else {
        return Err(Error::InvalidParameter(format!("SNR range '{s}' is not start:stop:step")));
    };
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(Error::InvalidParameter(format!("empty SNR range '{s}'")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Comma-separated offsets and inclusive ranges, e.g. `-10..-5,5..10` or
/// `-10,10`.
pub fn parse_tau_set(s: &str) -> Result<Vec<i64>> {
    let bad = || Error::InvalidParameter(format!("bad offset set '{s}'"));
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        match item.split_once("..") {
            Some((a, b)) => {
                let a: i64 = a.trim().parse().map_err(|_| bad())?;
                let b: i64 = b.trim().parse().map_err(|_| bad())?;
                if b < a {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(item.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_parsing() {
        assert_eq!(parse_snr_range("0:20:2.5").unwrap().len(), 9);
        assert_eq!(parse_snr_range("0:20:5").unwrap(), vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(parse_snr_range("1:1:1").unwrap(), vec![1.0]);
        assert!(parse_snr_range("0:20").is_err());
        assert!(parse_snr_range("5:0:1").is_err());
        assert!(parse_snr_range("0:5:0").is_err());
        assert_eq!(parse_snr_list("15, 20").unwrap(), vec![15.0, 20.0]);
        assert!(parse_snr_list("x").is_err());
    }

    #[test]
    fn tau_parsing() {
        assert_eq!(parse_tau_set("-10,10").unwrap(), vec![-10, 10]);
        assert_eq!(
            parse_tau_set("-10..-5,5..10").unwrap(),
            vec![-10, -9, -8, -7, -6, -5, 5, 6, 7, 8, 9, 10]
        );
        assert_eq!(parse_tau_set("3").unwrap(), vec![3]);
        assert!(parse_tau_set("5..1").is_err());
        assert!(parse_tau_set("a").is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::MaeVsSnr);
        assert!(cfg.validate().is_ok());
        cfg.tau = TauSpec::Fixed(15);
        assert!(matches!(cfg.validate(), Err(Error::UndetectableOffset { .. })));
        cfg.tau = TauSpec::Fixed(14);
        cfg.trials = 0;
        assert!(cfg.validate().is_err());

        let mut ber = ExperimentConfig::new(ExperimentKind::BerCompare);
        ber.data_symbol_samples = vec![20];
        assert!(ber.validate().is_err());
        ber.data_symbol_samples = vec![25];
        assert!(ber.validate().is_ok());
        assert_eq!(ber.preamble_bits(), 1);
    }
}
