//! Monte-Carlo FER/BER estimation.
//!
//! Every frame draws its information bits and noise from its own generator,
//! keyed by `(seed, snr_index, frame_index)`. Frames run in parallel in
//! waves; the stopping rule is then applied by scanning results in frame
//! order, so the outcome does not depend on the thread count.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{ArithModel, FixedPoint, LlPair, MinApprox, MinStar};
use crate::channel::{self, ChannelParams, QuantConfig};
use crate::code::{Construction, PolarCode};
use crate::error::{param, Result};
use crate::listdec::list_decode;
use crate::scdec::sc_decode;

/// Anything that maps received samples to a `û_1^N` estimate.
pub trait FrameDecoder: Sync {
    fn decode_frame(&self, code: &PolarCode, y: &[f64], channel: &ChannelParams) -> Result<Vec<u8>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DecoderKind {
    Sc,
    List { list_size: usize },
}

/// Decoder algorithm plus arithmetic model.
///
/// Floating-point models decode `(y∓1)²/(2σ²)`; the fixed-point model
/// decodes `(y∓1)²` quantized with step 1 to `Q_ch` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoderSpec {
    pub kind: DecoderKind,
    pub arith: ArithModel,
}

impl DecoderSpec {
    pub fn sc(arith: ArithModel) -> Self {
        DecoderSpec { kind: DecoderKind::Sc, arith }
    }

    pub fn list(list_size: usize, arith: ArithModel) -> Self {
        DecoderSpec {
            kind: DecoderKind::List { list_size },
            arith,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            DecoderKind::Sc => format!("sc-{}", self.arith.label()),
            DecoderKind::List { list_size } => format!("list{list_size}-{}", self.arith.label()),
        }
    }

    pub fn validate(&self, code: &PolarCode) -> Result<()> {
        if let DecoderKind::List { list_size: 0 } = self.kind {
            return param("list size must be at least 1");
        }
        if let ArithModel::FixedPoint { qch } = self.arith {
            FixedPoint::new(qch, code.n())?;
        }
        Ok(())
    }

    fn run<K: crate::arith::Kernel + Clone>(
        &self,
        code: &PolarCode,
        ll: &[LlPair<K::Value>],
        kernel: &K,
    ) -> Result<Vec<u8>> {
        match self.kind {
            DecoderKind::Sc => Ok(sc_decode(code, ll, kernel)),
            DecoderKind::List { list_size } => Ok(list_decode(code, ll, list_size, kernel)?.u),
        }
    }
}

impl FrameDecoder for DecoderSpec {
    fn decode_frame(&self, code: &PolarCode, y: &[f64], ch: &ChannelParams) -> Result<Vec<u8>> {
        match self.arith {
            ArithModel::ExactMinStar => {
                let ll: Vec<_> = y.iter().map(|&v| channel::scaled_channel_ll(v, ch)).collect();
                self.run(code, &ll, &MinStar)
            }
            ArithModel::ApproxMin => {
                let ll: Vec<_> = y.iter().map(|&v| channel::scaled_channel_ll(v, ch)).collect();
                self.run(code, &ll, &MinApprox)
            }
            ArithModel::FixedPoint { qch } => {
                let q = QuantConfig::unit(qch)?;
                let ll: Vec<_> = y
                    .iter()
                    .map(|&v| channel::quantize_ll(channel::channel_ll(v, ch, true), &q))
                    .collect();
                self.run(code, &ll, &FixedPoint::new(qch, code.n())?)
            }
        }
    }
}

/// Stop at `max_frames`, or earlier once `min_frame_errors` frame errors
/// have been seen (`0` disables the early stop).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub max_frames: u64,
    pub min_frame_errors: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            max_frames: 100_000,
            min_frame_errors: 100,
        }
    }
}

/// Code, decoder, SNR sweep, stopping rule and seed of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub len: usize,
    pub k: usize,
    pub construction: Construction,
    pub decoder: DecoderSpec,
    pub ebn0_db: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
}

impl SimConfig {
    pub fn build_code(&self) -> Result<PolarCode> {
        PolarCode::construct(self.len, self.k, self.construction)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ebn0_db.is_empty() {
            return param("SNR list is empty");
        }
        if self.ebn0_db.iter().any(|v| !v.is_finite()) {
            return param("SNR values must be finite");
        }
        if self.stop.max_frames == 0 {
            return param("max frames must be at least 1");
        }
        Ok(())
    }

    pub fn run(&self) -> Result<Vec<FerPoint>> {
        self.validate()?;
        let code = self.build_code()?;
        self.decoder.validate(&code)?;
        run_sweep(&code, &self.decoder, &self.ebn0_db, &self.stop, self.seed)
    }
}

/// One point of an FER curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerPoint {
    pub ebn0_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub fer: f64,
    pub ber: f64,
    pub stderr_fer: f64,
}

impl FerPoint {
    pub fn new(ebn0_db: f64, frames: u64, frame_errors: u64, bit_errors: u64, k: usize) -> Self {
        let fer = if frames == 0 { 0.0 } else { frame_errors as f64 / frames as f64 };
        let ber = if frames == 0 {
            0.0
        } else {
            bit_errors as f64 / (frames as f64 * k as f64)
        };
        let stderr_fer = if frames == 0 { 0.0 } else { (fer * (1.0 - fer) / frames as f64).sqrt() };
        FerPoint {
            ebn0_db,
            frames,
            frame_errors,
            bit_errors,
            fer,
            ber,
            stderr_fer,
        }
    }
}

/// Outcome of a single simulated frame: `(frame error, info-bit errors)`.
pub fn simulate_frame<D: FrameDecoder + ?Sized>(
    code: &PolarCode,
    decoder: &D,
    params: &ChannelParams,
    seed: u64,
    snr_index: usize,
    frame: u64,
) -> Result<(bool, u64)> {
    let mut rng = channel::frame_rng(seed, snr_index, frame);
    let info: Vec<u8> = (0..code.k()).map(|_| u8::from(rng.random::<bool>())).collect();
    let x = code.encode(&info)?;
    let y = channel::add_awgn(&channel::modulate(&x), params, &mut rng);
    let u = decoder.decode_frame(code, &y, params)?;
    let bit_errors = code
        .info_indices()
        .iter()
        .zip(&info)
        .filter(|(&i, &b)| u[i] != b)
        .count() as u64;
    Ok((bit_errors > 0, bit_errors))
}

const FIRST_WAVE: u64 = 64;
const MAX_WAVE: u64 = 8192;

/// Simulates one SNR point. `snr_index` selects the noise streams.
pub fn run_point<D: FrameDecoder + ?Sized>(
    code: &PolarCode,
    decoder: &D,
    ebn0_db: f64,
    snr_index: usize,
    stop: &StopRule,
    seed: u64,
) -> Result<FerPoint> {
    if stop.max_frames == 0 {
        return param("max frames must be at least 1");
    }
    let params = ChannelParams::from_ebn0_db(ebn0_db, code.rate())?;
    let (mut frames, mut frame_errors, mut bit_errors) = (0u64, 0u64, 0u64);
    let mut wave = FIRST_WAVE;
    'outer: while frames < stop.max_frames {
        let end = (frames + wave).min(stop.max_frames);
        let results: Vec<(bool, u64)> = (frames..end)
            .into_par_iter()
            .map(|f| simulate_frame(code, decoder, &params, seed, snr_index, f))
            .collect::<Result<_>>()?;
        for (err, bits) in results {
            frames += 1;
            frame_errors += u64::from(err);
            bit_errors += bits;
            if stop.min_frame_errors > 0 && frame_errors >= stop.min_frame_errors {
                break 'outer;
            }
        }
        wave = (wave * 2).min(MAX_WAVE);
    }
    Ok(FerPoint::new(ebn0_db, frames, frame_errors, bit_errors, code.k()))
}

/// Runs [`run_point`] for each SNR, using the list position as SNR index.
pub fn run_sweep<D: FrameDecoder + ?Sized>(
    code: &PolarCode,
    decoder: &D,
    ebn0_db: &[f64],
    stop: &StopRule,
    seed: u64,
) -> Result<Vec<FerPoint>> {
    ebn0_db
        .iter()
        .enumerate()
        .map(|(idx, &snr)| run_point(code, decoder, snr, idx, stop, seed))
        .collect()
}

#[derive(Serialize)]
struct CsvRow {
    ebn0_db: f64,
    frames: u64,
    frame_errors: u64,
    fer: f64,
    stderr_fer: f64,
    ber: f64,
}

/// Writes `ebn0_db,frames,frame_errors,fer,stderr_fer,ber` rows.
pub fn write_csv<W: Write>(points: &[FerPoint], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for p in points {
        wtr.serialize(CsvRow {
            ebn0_db: p.ebn0_db,
            frames: p.frames,
            frame_errors: p.frame_errors,
            fer: p.fer,
            stderr_fer: p.stderr_fer,
            ber: p.ber,
        })?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(points: &[FerPoint], w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, points)?;
    Ok(())
}

/// Eb/N0 at which the curve crosses `target`, by linear interpolation of
/// `log10(FER)` between the first bracketing pair of points.
///
/// Points must be sorted by increasing Eb/N0; points with zero errors are
/// skipped.
pub fn snr_at_fer(points: &[FerPoint], target: f64) -> Option<f64> {
    let usable: Vec<&FerPoint> = points.iter().filter(|p| p.fer > 0.0).collect();
    let lt = target.log10();
    usable.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        let (la, lb) = (a.fer.log10(), b.fer.log10());
        if la >= lt && lt >= lb && la != lb {
            Some(a.ebn0_db + (la - lt) / (la - lb) * (b.ebn0_db - a.ebn0_db))
        } else if la == lt {
            Some(a.ebn0_db)
        } else {
            None
        }
    })
}
