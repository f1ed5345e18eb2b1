//! Successive-cancellation decoding over the `n`-stage decoding graph.
//!
//! Stage `n` holds the `N` channel LL pairs and stage `s < n` holds `2^s`
//! pairs for the subtree that contains the bit being decoded. Going from
//! stage `s+1` to stage `s`, node `j` combines inputs `j` and `j + 2^s`; it is
//! an `f` node when bit `s` of the 0-based bit index is 0 and a `g` node
//! otherwise.
//!
//! Bit indices are 0-based internally (`t = i − 1`); [`active_stage`] keeps
//! the 1-based convention of the list-SC pseudocode.

use crate::arith::{Kernel, LlPair};
use crate::code::PolarCode;
use crate::error::{param, Result};

/// Topmost stage whose values must be read (not recomputed) for bit `i`
/// (1-based); stages `active_stage(i) − 1 … 0` are recomputed.
///
/// For `i = 1` this is `n`. Otherwise it is one more than the number of
/// trailing zeros of `i − 1`: stage `s` depends on the index bits at or above
/// `s`, which change between `i − 1` and `i` exactly for `s ≤ tz(i − 1)`.
/// Equivalently, the smallest `s` such that stages `≥ s` are unchanged since
/// the previous bit.
pub fn active_stage(i: usize, n: usize) -> Result<usize> {
    if i == 0 || i > 1 << n {
        return param(format!("bit index {i} not in [1, {}]", 1usize << n));
    }
    Ok(first_stage(i - 1, n))
}

#[inline]
pub(crate) fn first_stage(t: usize, n: usize) -> usize {
    if t == 0 {
        n
    } else {
        t.trailing_zeros() as usize + 1
    }
}

/// `true` if the stage-`s` nodes for 0-based bit `t` apply `g`.
#[inline]
pub fn is_g_node(t: usize, s: usize) -> bool {
    (t >> s) & 1 == 1
}

#[inline]
pub(crate) const fn stage_offset(s: usize) -> usize {
    (1 << s) - 1
}

/// Partial sums for every stage's `g` nodes.
///
/// Stage `s` keeps the `2^s` bits `û_{sub}·F^{⊗s}` of the most recently
/// completed left subtree at that stage. Decoding a bit folds it upward by
/// XOR until it lands in a stage where it completes a left subtree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSums {
    n: usize,
    cells: Vec<u8>,
    scratch: Vec<u8>,
}

impl PartialSums {
    pub fn new(n: usize) -> Self {
        PartialSums {
            n,
            cells: vec![0; 1 << n],
            scratch: vec![0; 1 << n],
        }
    }

    pub fn clear(&mut self) {
        self.cells.fill(0);
    }

    /// Partial sums feeding the stage-`s` `g` nodes.
    #[inline]
    pub fn stage(&self, s: usize) -> &[u8] {
        &self.cells[stage_offset(s)..stage_offset(s + 1)]
    }

    /// Folds decision `bit` for 0-based index `t` into the memory.
    pub fn update(&mut self, t: usize, bit: u8) {
        let mut len = 1;
        self.scratch[0] = bit;
        for s in 0..self.n {
            let off = stage_offset(s);
            if !is_g_node(t, s) {
                self.cells[off..off + len].copy_from_slice(&self.scratch[..len]);
                return;
            }
            let (cur, rest) = self.scratch.split_at_mut(len);
            rest[..len].copy_from_slice(cur);
            for (c, l) in cur.iter_mut().zip(&self.cells[off..off + len]) {
                *c ^= l;
            }
            len *= 2;
        }
    }

    pub(crate) fn copy_from(&mut self, other: &PartialSums) {
        self.cells.copy_from_slice(&other.cells);
    }
}

pub(crate) fn compute_stage<K: Kernel>(
    kernel: &K,
    input: &[LlPair<K::Value>],
    out: &mut [LlPair<K::Value>],
    s: usize,
    t: usize,
    psums: &PartialSums,
) {
    let half = 1 << s;
    let (upper, lower) = input[..2 * half].split_at(half);
    if is_g_node(t, s) {
        let us = psums.stage(s);
        for j in 0..half {
            out[j] = kernel.g(upper[j], lower[j], us[j], s);
        }
    } else {
        for j in 0..half {
            out[j] = kernel.f(upper[j], lower[j], s);
        }
    }
}

/// Computes the `2^s` stage-`s` pairs for bit `i` (1-based) from the
/// `2^(s+1)` stage-`s+1` pairs.
pub fn update_stage<K: Kernel>(
    kernel: &K,
    inputs: &[LlPair<K::Value>],
    s: usize,
    psums: &PartialSums,
    i: usize,
) -> Result<Vec<LlPair<K::Value>>> {
    if i == 0 || s >= psums.n || inputs.len() != 2 << s {
        return param(format!(
            "update_stage: bit {i}, stage {s} needs {} inputs, got {}",
            2usize << s,
            inputs.len()
        ));
    }
    let mut out = vec![LlPair::default(); 1 << s];
    compute_stage(kernel, inputs, &mut out, s, i - 1, psums);
    Ok(out)
}

/// Reusable single-path SC decoder.
#[derive(Debug, Clone)]
pub struct ScDecoder<K: Kernel> {
    kernel: K,
    n: usize,
    stages: Vec<LlPair<K::Value>>,
    psums: PartialSums,
}

impl<K: Kernel> ScDecoder<K> {
    pub fn new(kernel: K, n: usize) -> Self {
        ScDecoder {
            kernel,
            n,
            stages: vec![LlPair::default(); 1 << n],
            psums: PartialSums::new(n),
        }
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    /// Decodes one frame and returns the full `û` (frozen positions are 0).
    pub fn decode(&mut self, code: &PolarCode, channel: &[LlPair<K::Value>]) -> Vec<u8> {
        let n = self.n;
        assert_eq!(code.n(), n, "decoder built for a different blocklength");
        assert_eq!(channel.len(), code.len(), "channel length mismatch");
        let len = code.len();
        self.psums.clear();
        let mut u = vec![0u8; len];
        for t in 0..len {
            for s in (0..first_stage(t, n)).rev() {
                let (lo, hi) = self.stages.split_at_mut(stage_offset(s + 1));
                let input = if s + 1 == n { channel } else { &hi[..2 << s] };
                compute_stage(&self.kernel, input, &mut lo[stage_offset(s)..], s, t, &self.psums);
            }
            let bit = if code.is_frozen(t) {
                0
            } else if n == 0 {
                channel[0].decide()
            } else {
                self.stages[0].decide()
            };
            u[t] = bit;
            self.psums.update(t, bit);
        }
        u
    }
}

/// One-shot SC decode; returns `û_1^N`.
pub fn sc_decode<K: Kernel + Clone>(code: &PolarCode, channel: &[LlPair<K::Value>], kernel: &K) -> Vec<u8> {
    ScDecoder::new(kernel.clone(), code.n()).decode(code, channel)
}
