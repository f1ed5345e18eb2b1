//! Independent reference implementations used by the integration tests.

#![allow(dead_code)]

use polarlist::channel::{self, ChannelParams};
use polarlist::code::polar_transform;
use polarlist::{FixedPoint, Kernel, LlPair, PolarCode};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random info bits, their codeword and a noisy observation.
pub struct Frame {
    pub info: Vec<u8>,
    pub x: Vec<u8>,
    pub y: Vec<f64>,
}

pub fn noisy_frame(code: &PolarCode, params: &ChannelParams, rng: &mut ChaCha8Rng) -> Frame {
    let info: Vec<u8> = (0..code.k()).map(|_| u8::from(rng.random::<bool>())).collect();
    let x = code.encode(&info).unwrap();
    let y = channel::add_awgn(&channel::modulate(&x), params, rng);
    Frame { info, x, y }
}

pub fn scaled_lls(y: &[f64], params: &ChannelParams) -> Vec<LlPair<f64>> {
    y.iter().map(|&v| channel::scaled_channel_ll(v, params)).collect()
}

pub fn full_lls(y: &[f64], params: &ChannelParams) -> Vec<LlPair<f64>> {
    y.iter().map(|&v| channel::channel_ll(v, params, false)).collect()
}

pub fn simplified_lls(y: &[f64], params: &ChannelParams) -> Vec<LlPair<f64>> {
    y.iter().map(|&v| channel::channel_ll(v, params, true)).collect()
}

pub fn quantized_lls(y: &[f64], params: &ChannelParams, qch: u32) -> Vec<LlPair<u64>> {
    let q = channel::QuantConfig::unit(qch).unwrap();
    y.iter()
        .map(|&v| channel::quantize_ll(channel::channel_ll(v, params, true), &q))
        .collect()
}

/// Random code with `k` information positions.
pub fn random_code(len: usize, k: usize, rng: &mut ChaCha8Rng) -> PolarCode {
    let mut idx: Vec<usize> = (0..len).collect();
    for i in (1..len).rev() {
        idx.swap(i, rng.random_range(0..=i));
    }
    let mut frozen = vec![true; len];
    for &i in &idx[..k] {
        frozen[i] = false;
    }
    PolarCode::from_frozen(frozen).unwrap()
}

fn encode_block(bits: &[u8]) -> Vec<u8> {
    let mut v = bits.to_vec();
    polar_transform(&mut v);
    v
}

/// Stage-`s` LLs for bit `prefix.len()`, recomputed from the channel by
/// recursive halving and re-encoding of the decided prefix.
pub fn stage_from_scratch<K: Kernel>(kernel: &K, channel: &[LlPair<K::Value>], prefix: &[u8], s: usize) -> Vec<LlPair<K::Value>> {
    let mut vals = channel.to_vec();
    let mut prefix = prefix;
    let mut level = vals.len().trailing_zeros() as usize;
    while level > s {
        let half = vals.len() / 2;
        let (a, b) = vals.split_at(half);
        vals = if prefix.len() < half {
            (0..half).map(|j| kernel.f(a[j], b[j], level - 1)).collect()
        } else {
            let v = encode_block(&prefix[..half]);
            prefix = &prefix[half..];
            (0..half).map(|j| kernel.g(a[j], b[j], v[j], level - 1)).collect()
        };
        level -= 1;
    }
    vals
}

/// Textbook recursive SC decoder returning `(û, x̂)`.
pub fn recursive_sc<K: Kernel>(kernel: &K, frozen: &[bool], vals: &[LlPair<K::Value>]) -> (Vec<u8>, Vec<u8>) {
    let len = vals.len();
    if len == 1 {
        let bit = if frozen[0] { 0 } else { vals[0].decide() };
        return (vec![bit], vec![bit]);
    }
    let half = len / 2;
    let stage = half.trailing_zeros() as usize;
    let (a, b) = vals.split_at(half);
    let left: Vec<_> = (0..half).map(|j| kernel.f(a[j], b[j], stage)).collect();
    let (u1, x1) = recursive_sc(kernel, &frozen[..half], &left);
    let right: Vec<_> = (0..half).map(|j| kernel.g(a[j], b[j], x1[j], stage)).collect();
    let (u2, x2) = recursive_sc(kernel, &frozen[half..], &right);
    let mut u = u1;
    u.extend_from_slice(&u2);
    let mut x: Vec<u8> = x1.iter().zip(&x2).map(|(p, q)| p ^ q).collect();
    x.extend_from_slice(&x2);
    (u, x)
}

/// SC decoder that recomputes every stage from the channel for every bit.
pub fn naive_sc<K: Kernel>(kernel: &K, code: &PolarCode, channel: &[LlPair<K::Value>]) -> Vec<u8> {
    let mut u = Vec::with_capacity(code.len());
    for t in 0..code.len() {
        let m = stage_from_scratch(kernel, channel, &u, 0)[0];
        u.push(if code.is_frozen(t) { 0 } else { m.decide() });
    }
    u
}

/// Probability-domain SC decoder: `W(y, û_1^{i−1} | u_i)` by direct
/// marginalisation over `u_{i+1}^N` of `Π_j W(y_j | x_j)`.
pub fn probability_sc(code: &PolarCode, w: &[[f64; 2]]) -> Vec<u8> {
    let len = code.len();
    let mut u = vec![0u8; len];
    for t in 0..len {
        if code.is_frozen(t) {
            continue;
        }
        let mut p = [0.0f64; 2];
        let rest = len - t - 1;
        for bit in 0..2u8 {
            u[t] = bit;
            for tail in 0..1usize << rest {
                for j in 0..rest {
                    u[t + 1 + j] = ((tail >> j) & 1) as u8;
                }
                let x = encode_block(&u);
                p[bit as usize] += x.iter().zip(w).map(|(&xi, wi)| wi[xi as usize]).product::<f64>();
            }
        }
        u[t + 1..].fill(0);
        u[t] = u8::from(p[1] > p[0]);
    }
    u
}

/// Gaussian channel densities `W(y|0), W(y|1)`.
pub fn densities(y: &[f64], params: &ChannelParams) -> Vec<[f64; 2]> {
    y.iter()
        .map(|&v| {
            let ll = channel::channel_ll(v, params, false);
            [(-ll.v0).exp(), (-ll.v1).exp()]
        })
        .collect()
}

/// Exhaustive ML decoding: `(codewords' info bits, −ln P(y|x))` sorted by
/// metric, computed from the full-form channel LLs.
pub fn ml_metrics(code: &PolarCode, lls: &[LlPair<f64>]) -> Vec<(Vec<u8>, f64)> {
    let k = code.k();
    let mut out: Vec<(Vec<u8>, f64)> = (0..1usize << k)
        .map(|m| {
            let info: Vec<u8> = (0..k).map(|j| ((m >> j) & 1) as u8).collect();
            let x = code.encode(&info).unwrap();
            let metric = x.iter().zip(lls).map(|(&b, ll)| ll.get(b)).sum();
            (info, metric)
        })
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    out
}

/// Fixed-point kernel that panics on any stage-width violation, with or
/// without debug assertions.
#[derive(Debug, Clone, Copy)]
pub struct CheckedFixed(pub FixedPoint);

impl CheckedFixed {
    fn check(&self, out: LlPair<u64>, s: usize) -> LlPair<u64> {
        let max = self.0.max_value(s);
        assert!(out.v0 <= max && out.v1 <= max, "{out:?} exceeds stage {s} maximum {max}");
        out
    }
}

impl Kernel for CheckedFixed {
    type Value = u64;

    fn f(&self, a: LlPair<u64>, b: LlPair<u64>, s: usize) -> LlPair<u64> {
        self.check(self.0.f(a, b, s), s)
    }

    fn g(&self, a: LlPair<u64>, b: LlPair<u64>, u: u8, s: usize) -> LlPair<u64> {
        self.check(self.0.g(a, b, u, s), s)
    }

    fn saturated(&self) -> u64 {
        self.0.saturated()
    }
}
