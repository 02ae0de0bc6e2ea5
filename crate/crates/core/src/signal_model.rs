//! Stochastic primitives: ambient source and noise samples, block-fading
//! channels and the per-hypothesis received variances.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// One complex baseband sample.
pub type ComplexSample = Complex64;

/// Ambient source power and receiver noise power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisePowers {
    sigma_s_sq: f64,
    sigma_w_sq: f64,
}

impl NoisePowers {
    pub fn new(sigma_s_sq: f64, sigma_w_sq: f64) -> Result<Self> {
        if !(sigma_s_sq.is_finite() && sigma_s_sq >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "source power must be finite and >= 0, got {sigma_s_sq}"
            )));
        }
        if !(sigma_w_sq.is_finite() && sigma_w_sq > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise power must be finite and > 0, got {sigma_w_sq}"
            )));
        }
        Ok(Self {
            sigma_s_sq,
            sigma_w_sq,
        })
    }

    /// Unit source power with noise power `10^(-snr_db/10)`.
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        Self::new(1.0, 10f64.powf(-snr_db / 10.0))
    }

    pub fn sigma_s_sq(&self) -> f64 {
        self.sigma_s_sq
    }

    pub fn sigma_w_sq(&self) -> f64 {
        self.sigma_w_sq
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * (self.sigma_s_sq / self.sigma_w_sq).log10()
    }
}

/// Fading coefficients of one coherence block.
///
/// `h` is the source→receiver link, `zeta` the source→tag link and `g` the
/// tag→receiver link. `mu = h + zeta·g` is the composite gain while the tag
/// reflects, and `p0`/`p1` are the received variances for bit 0 and bit 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelState {
    pub h: Complex64,
    pub zeta: Complex64,
    pub g: Complex64,
    pub mu: Complex64,
    pub p0: f64,
    pub p1: f64,
}

impl ChannelState {
    pub fn new(h: Complex64, zeta: Complex64, g: Complex64, powers: &NoisePowers) -> Self {
        let mu = h + zeta * g;
        let p0 = h.norm_sqr() * powers.sigma_s_sq + powers.sigma_w_sq;
        let p1 = mu.norm_sqr() * powers.sigma_s_sq + powers.sigma_w_sq;
        Self {
            h,
            zeta,
            g,
            mu,
            p0,
            p1,
        }
    }

    /// True when `|p1 - p0|` is too small relative to the larger power for
    /// the energy-detection threshold to be evaluated reliably.
    pub fn is_near_degenerate(&self) -> bool {
        (self.p1 - self.p0).abs() < 1e-9 * self.p0.max(self.p1)
    }
}

/// Draws `h`, `zeta`, `g` i.i.d. CN(0, 1).
pub fn draw_channel<R: Rng + ?Sized>(rng: &mut R, powers: &NoisePowers) -> ChannelState {
    let h = cgn_sample(rng, 1.0);
    let zeta = cgn_sample(rng, 1.0);
    let g = cgn_sample(rng, 1.0);
    ChannelState::new(h, zeta, g, powers)
}

/// `(P0, P1) = (|h|²σ_s² + σ_w², |μ|²σ_s² + σ_w²)`, recomputed from the
/// coefficients.
pub fn symbol_variances(channel: &ChannelState, powers: &NoisePowers) -> (f64, f64) {
    let mu = channel.h + channel.zeta * channel.g;
    (
        channel.h.norm_sqr() * powers.sigma_s_sq + powers.sigma_w_sq,
        mu.norm_sqr() * powers.sigma_s_sq + powers.sigma_w_sq,
    )
}

/// `count` i.i.d. circularly-symmetric complex Gaussian samples with
/// `E|x|² = variance`.
pub fn gen_cgn_block<R: Rng + ?Sized>(
    count: usize,
    variance: f64,
    rng: &mut R,
) -> Result<Vec<ComplexSample>> {
    if !(variance.is_finite() && variance >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "variance must be finite and >= 0, got {variance}"
        )));
    }
    Ok((0..count).map(|_| cgn_sample(rng, variance)).collect())
}

/// One CN(0, variance) draw. Each quadrature carries `variance / 2`.
#[inline]
pub fn cgn_sample<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> ComplexSample {
    let scale = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}
