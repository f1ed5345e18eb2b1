//! BPSK over AWGN: modulation, noise, channel negative LLs and quantization.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::arith::LlPair;
use crate::error::{param, Result};

/// AWGN noise level (standard deviation per real dimension).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    sigma: f64,
}

impl ChannelParams {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return param(format!("sigma={sigma} must be finite and positive"));
        }
        Ok(ChannelParams { sigma })
    }

    /// `σ² = 1 / (2·R·10^(Eb/N0 / 10))` for unit-energy BPSK at code rate `R`.
    pub fn from_ebn0_db(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return param(format!("rate={rate} not in (0, 1]"));
        }
        ChannelParams::new((1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt())
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }
}

/// `μ(x) = 1 − 2x`.
pub fn modulate(x: &[u8]) -> Vec<f64> {
    x.iter().map(|&b| 1.0 - 2.0 * f64::from(b)).collect()
}

/// Adds `N(0, σ²)` noise drawn from `rng`.
pub fn add_awgn<R: Rng + ?Sized>(s: &[f64], params: &ChannelParams, rng: &mut R) -> Vec<f64> {
    s.iter()
        .map(|&v| {
            let z: f64 = rng.sample(StandardNormal);
            v + params.sigma * z
        })
        .collect()
}

/// Independent generator for one simulated frame.
///
/// The ChaCha stream id packs the SNR index into the top 16 bits and the
/// frame index into the rest, so each frame's noise depends only on
/// `(seed, snr_index, frame_index)`.
pub fn frame_rng(seed: u64, snr_index: usize, frame_index: u64) -> ChaCha8Rng {
    debug_assert!(frame_index < 1 << 48);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((snr_index as u64) << 48) | frame_index);
    rng
}

/// Channel negative LLs for one received sample.
///
/// The full form is `(y−μ)²/(2σ²) + ln√(2πσ²)`; the simplified form drops
/// the scale and offset and returns `((y−1)², (y+1)²)`.
pub fn channel_ll(y: f64, params: &ChannelParams, simplified: bool) -> LlPair<f64> {
    let d0 = (y - 1.0) * (y - 1.0);
    let d1 = (y + 1.0) * (y + 1.0);
    if simplified {
        LlPair::new(d0, d1)
    } else {
        let var = params.variance();
        let offset = 0.5 * (2.0 * std::f64::consts::PI * var).ln();
        LlPair::new(d0 / (2.0 * var) + offset, d1 / (2.0 * var) + offset)
    }
}

/// Like [`channel_ll`] in full form but without the common `ln√(2πσ²)`.
pub fn scaled_channel_ll(y: f64, params: &ChannelParams) -> LlPair<f64> {
    let s = 0.5 / params.variance();
    LlPair::new((y - 1.0) * (y - 1.0) * s, (y + 1.0) * (y + 1.0) * s)
}

/// Uniform channel-LL quantizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantConfig {
    qch: u32,
    delta: f64,
}

impl QuantConfig {
    pub fn new(qch: u32, delta: f64) -> Result<Self> {
        if !(1..=16).contains(&qch) {
            return param(format!("Q_ch={qch} not in [1, 16]"));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return param(format!("quantization step {delta} must be positive"));
        }
        Ok(QuantConfig { qch, delta })
    }

    /// `Q_ch` bits with step 1.
    pub fn unit(qch: u32) -> Result<Self> {
        QuantConfig::new(qch, 1.0)
    }

    pub fn qch(&self) -> u32 {
        self.qch
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn max_level(&self) -> u64 {
        (1u64 << self.qch) - 1
    }

    /// `round(v/Δ)` with ties to even, clipped to `[0, 2^Q_ch − 1]`.
    #[inline]
    pub fn quantize(&self, v: f64) -> u64 {
        let r = (v / self.delta).round_ties_even();
        if r <= 0.0 {
            0
        } else {
            (r as u64).min(self.max_level())
        }
    }
}

pub fn quantize_ll(p: LlPair<f64>, q: &QuantConfig) -> LlPair<u64> {
    LlPair::new(q.quantize(p.v0), q.quantize(p.v1))
}
