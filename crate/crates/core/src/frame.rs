//! Tag transmission layout and the receiver's view of it.
//!
//! A frame is `[preamble 1…1 | (0,1)×L pilot | payload | guard 0]`. Preamble
//! and pilot bits last `N_p` samples; payload and guard bits last `N`.
//! Timing offsets are applied by moving the receiver's clock over the true
//! sample stream, never by copying or creating samples.

use rand::Rng;

use crate::error::{Error, Result};
use crate::signal_model::{cgn_sample, ChannelState, ComplexSample, NoisePowers};

/// Frame dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameConfig {
    pub preamble_bits: usize,
    /// `L`: number of (0,1) pilot pairs.
    pub pilot_pairs: usize,
    /// `N_p`: samples per preamble/pilot bit.
    pub pilot_bit_samples: usize,
    /// `K`: payload bits.
    pub data_symbols: usize,
    /// `N`: samples per payload bit (and per guard bit).
    pub data_symbol_samples: usize,
}

impl FrameConfig {
    pub fn new(
        preamble_bits: usize,
        pilot_pairs: usize,
        pilot_bit_samples: usize,
        data_symbols: usize,
        data_symbol_samples: usize,
    ) -> Result<Self> {
        if preamble_bits < 1 {
            return Err(Error::InvalidParameter("preamble needs at least one bit".into()));
        }
        if pilot_pairs < 1 {
            return Err(Error::InvalidParameter("pilot needs at least one bit pair".into()));
        }
        if pilot_bit_samples < 4 {
            return Err(Error::InvalidParameter(format!(
                "pilot bits need at least 4 samples, got {pilot_bit_samples}"
            )));
        }
        if data_symbol_samples < 1 {
            return Err(Error::InvalidParameter("data symbols need at least one sample".into()));
        }
        Ok(Self {
            preamble_bits,
            pilot_pairs,
            pilot_bit_samples,
            data_symbols,
            data_symbol_samples,
        })
    }

    /// Total bits including the trailing guard bit.
    pub fn bit_count(&self) -> usize {
        self.preamble_bits + 2 * self.pilot_pairs + self.data_symbols + 1
    }

    pub fn pilot_start(&self) -> usize {
        self.preamble_bits * self.pilot_bit_samples
    }

    pub fn data_start(&self) -> usize {
        self.pilot_start() + 2 * self.pilot_pairs * self.pilot_bit_samples
    }

    pub fn guard_start(&self) -> usize {
        self.data_start() + self.data_symbols * self.data_symbol_samples
    }

    pub fn total_samples(&self) -> usize {
        self.guard_start() + self.data_symbol_samples
    }

    /// Sample count of bit `k` of the full sequence.
    fn bit_duration(&self, k: usize) -> usize {
        if k < self.preamble_bits + 2 * self.pilot_pairs {
            self.pilot_bit_samples
        } else {
            self.data_symbol_samples
        }
    }
}

/// Ordered on-off keyed bits, each 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitSequence(Vec<u8>);

impl BitSequence {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!("bit value {b} is not 0 or 1")));
        }
        Ok(Self(bits))
    }

    /// `count` equiprobable bits.
    pub fn random<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Self {
        Self((0..count).map(|_| rng.random_range(0..2u8)).collect())
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The payload section of a full frame sequence.
    pub fn payload(&self, cfg: &FrameConfig) -> &[u8] {
        let start = cfg.preamble_bits + 2 * cfg.pilot_pairs;
        &self.0[start..start + cfg.data_symbols]
    }
}

/// Signed sample offset of the receiver clock, validated against the pilot
/// bit length (`N_p > 2|tau|`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoValue {
    tau: i64,
}

impl StoValue {
    pub fn new(tau: i64, pilot_bit_samples: usize) -> Result<Self> {
        if 2 * tau.unsigned_abs() >= pilot_bit_samples as u64 {
            return Err(Error::UndetectableOffset {
                tau,
                pilot_bit_samples,
            });
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> i64 {
        self.tau
    }
}

/// The received sample stream plus the receiver's clock offset.
///
/// Under offset `d`, the receiver's sample `n` is true sample `n + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<ComplexSample>,
    pilot_start: usize,
    data_start: usize,
    guard_start: usize,
    clock_offset: i64,
}

impl Waveform {
    /// Wraps an existing sample stream laid out per `cfg`, with zero offset.
    pub fn from_samples(samples: Vec<ComplexSample>, cfg: &FrameConfig) -> Result<Self> {
        if samples.len() != cfg.total_samples() {
            return Err(Error::InvalidParameter(format!(
                "frame needs {} samples, got {}",
                cfg.total_samples(),
                samples.len()
            )));
        }
        Ok(Self {
            samples,
            pilot_start: cfg.pilot_start(),
            data_start: cfg.data_start(),
            guard_start: cfg.guard_start(),
            clock_offset: 0,
        })
    }

    pub fn samples(&self) -> &[ComplexSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn pilot_start(&self) -> usize {
        self.pilot_start
    }

    pub fn data_start(&self) -> usize {
        self.data_start
    }

    pub fn clock_offset(&self) -> i64 {
        self.clock_offset
    }

    /// Smallest and largest clock offsets the preamble and guard can absorb.
    pub fn offset_limits(&self) -> (i64, i64) {
        (
            -(self.pilot_start as i64),
            (self.samples.len() - self.guard_start) as i64,
        )
    }

    /// Moves the receiver clock by `delta` samples.
    pub fn shifted(mut self, delta: i64) -> Result<Self> {
        let offset = self.clock_offset + delta;
        let (min, max) = self.offset_limits();
        if offset < min || offset > max {
            return Err(Error::OffsetOutOfRange { offset, min, max });
        }
        self.clock_offset = offset;
        Ok(self)
    }

    /// The `len` samples the receiver reads starting at its own index
    /// `nominal_start`.
    pub fn window(&self, nominal_start: usize, len: usize) -> Result<&[ComplexSample]> {
        let start = nominal_start as i64 + self.clock_offset;
        let end = start + len as i64;
        if start < 0 || end > self.samples.len() as i64 {
            return Err(Error::WindowOutOfRange {
                start,
                end,
                len: self.samples.len(),
            });
        }
        Ok(&self.samples[start as usize..end as usize])
    }
}

/// Preamble, alternating pilot, payload and guard bit. Draws `K` random
/// payload bits when `payload` is `None`.
pub fn build_bit_sequence<R: Rng + ?Sized>(
    cfg: &FrameConfig,
    payload: Option<&BitSequence>,
    rng: &mut R,
) -> Result<BitSequence> {
    let drawn;
    let payload = match payload {
        Some(p) if p.len() != cfg.data_symbols => {
            return Err(Error::PayloadLength {
                expected: cfg.data_symbols,
                got: p.len(),
            })
        }
        Some(p) => p,
        None => {
            drawn = BitSequence::random(cfg.data_symbols, rng);
            &drawn
        }
    };
    let mut bits = Vec::with_capacity(cfg.bit_count());
    bits.extend(std::iter::repeat_n(1u8, cfg.preamble_bits));
    for _ in 0..cfg.pilot_pairs {
        bits.extend_from_slice(&[0, 1]);
    }
    bits.extend_from_slice(payload.as_slice());
    bits.push(0);
    Ok(BitSequence(bits))
}

/// Received samples `y(n) = (h + ζ·g·B(k))·s(n) + w(n)` for every bit of
/// `bits`, drawing `s` then `w` for each sample in order.
pub fn synthesize_received<R: Rng + ?Sized>(
    bits: &BitSequence,
    cfg: &FrameConfig,
    channel: &ChannelState,
    powers: &NoisePowers,
    rng: &mut R,
) -> Result<Waveform> {
    if bits.len() != cfg.bit_count() {
        return Err(Error::InvalidParameter(format!(
            "frame has {} bits, configuration expects {}",
            bits.len(),
            cfg.bit_count()
        )));
    }
    let reflect = channel.zeta * channel.g;
    let mut samples = Vec::with_capacity(cfg.total_samples());
    for (k, &bit) in bits.as_slice().iter().enumerate() {
        let gain = if bit == 1 { channel.h + reflect } else { channel.h };
        for _ in 0..cfg.bit_duration(k) {
            let s = cgn_sample(rng, powers.sigma_s_sq());
            let w = cgn_sample(rng, powers.sigma_w_sq());
            samples.push(gain * s + w);
        }
    }
    Waveform::from_samples(samples, cfg)
}

/// Injects symbol timing offset `sto`: the receiver's window for every
/// symbol now starts `tau` samples later (earlier when negative).
pub fn apply_sto(w: Waveform, sto: StoValue) -> Result<Waveform> {
    w.shifted(sto.tau())
}
