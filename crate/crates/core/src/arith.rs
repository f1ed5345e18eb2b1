//! Negative-LL update kernels.
//!
//! An [`LlPair`] holds `(-ln W(·|0), -ln W(·|1))`. Smaller is more likely, so
//! hard decisions take the argmin. The `½` factors of the probability-domain
//! update rules are dropped: they add the same `ln 2` to every value at a
//! stage and never change a decision or a path ordering.
//!
//! Three evaluation models are provided as [`Kernel`] implementations:
//! [`MinStar`] (exact), [`MinApprox`] (min*(a,b) ≈ min(a,b)) and
//! [`FixedPoint`], which uses the min approximation on unsigned integers and
//! grows the word by one bit per stage so that no stage can overflow.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// A pair of negative log-likelihoods for bit values 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LlPair<T> {
    pub v0: T,
    pub v1: T,
}

impl<T: Copy + PartialOrd> LlPair<T> {
    pub const fn new(v0: T, v1: T) -> Self {
        LlPair { v0, v1 }
    }

    /// Hard decision: the bit with the smaller negative LL, ties to 0.
    #[inline]
    pub fn decide(&self) -> u8 {
        u8::from(self.v1 < self.v0)
    }

    #[inline]
    pub fn get(&self, bit: u8) -> T {
        if bit == 0 {
            self.v0
        } else {
            self.v1
        }
    }
}

/// `min*(a,b) = -ln(e^{-a} + e^{-b}) = min(a,b) - ln(1 + e^{-|a-b|})`, or
/// plain `min` when `exact` is false.
#[inline]
pub fn min_star(a: f64, b: f64, exact: bool) -> f64 {
    let m = a.min(b);
    if exact {
        m - (-(a - b).abs()).exp().ln_1p()
    } else {
        m
    }
}

/// The `f` and `g` node updates of the decoding graph.
///
/// `stage_out` is the stage the result is written to (stage `n` holds the
/// channel LLs, stage 0 the decision LLs).
pub trait Kernel: Debug + Send + Sync {
    type Value: Copy + PartialOrd + Debug + Default + Send + Sync;

    /// `(min*(a0+b0, a1+b1), min*(a1+b0, a0+b1))`.
    fn f(&self, a: LlPair<Self::Value>, b: LlPair<Self::Value>, stage_out: usize) -> LlPair<Self::Value>;

    /// `(a[u]+b0, a[1-u]+b1)` for partial sum `u`.
    fn g(&self, a: LlPair<Self::Value>, b: LlPair<Self::Value>, u: u8, stage_out: usize) -> LlPair<Self::Value>;

    /// Metric reported for inactive list paths; never preferred over a live one.
    fn saturated(&self) -> Self::Value;
}

/// Exact min* arithmetic in `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MinStar;

/// min*(a,b) ≈ min(a,b) in `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MinApprox;

#[inline]
fn g_f64(a: LlPair<f64>, b: LlPair<f64>, u: u8) -> LlPair<f64> {
    if u == 0 {
        LlPair::new(a.v0 + b.v0, a.v1 + b.v1)
    } else {
        LlPair::new(a.v1 + b.v0, a.v0 + b.v1)
    }
}

impl Kernel for MinStar {
    type Value = f64;

    #[inline]
    fn f(&self, a: LlPair<f64>, b: LlPair<f64>, _stage_out: usize) -> LlPair<f64> {
        LlPair::new(
            min_star(a.v0 + b.v0, a.v1 + b.v1, true),
            min_star(a.v1 + b.v0, a.v0 + b.v1, true),
        )
    }

    #[inline]
    fn g(&self, a: LlPair<f64>, b: LlPair<f64>, u: u8, _stage_out: usize) -> LlPair<f64> {
        g_f64(a, b, u)
    }

    fn saturated(&self) -> f64 {
        f64::INFINITY
    }
}

impl Kernel for MinApprox {
    type Value = f64;

    #[inline]
    fn f(&self, a: LlPair<f64>, b: LlPair<f64>, _stage_out: usize) -> LlPair<f64> {
        LlPair::new((a.v0 + b.v0).min(a.v1 + b.v1), (a.v1 + b.v0).min(a.v0 + b.v1))
    }

    #[inline]
    fn g(&self, a: LlPair<f64>, b: LlPair<f64>, u: u8, _stage_out: usize) -> LlPair<f64> {
        g_f64(a, b, u)
    }

    fn saturated(&self) -> f64 {
        f64::INFINITY
    }
}

/// Unsigned fixed-point LLs with one bit of growth per stage.
///
/// Stage `s` values are `Q_ch + (n - s)` bits wide; channel LLs (stage `n`)
/// use `Q_ch` bits and stage 0 uses `Q_max = Q_ch + n`. Values are carried
/// in a `u64`; the width bound is checked with debug assertions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPoint {
    qch: u32,
    n: u32,
}

impl FixedPoint {
    pub fn new(qch: u32, n: usize) -> Result<Self> {
        if !(1..=16).contains(&qch) {
            return param(format!("Q_ch={qch} not in [1, 16]"));
        }
        if n > 40 {
            return param(format!("n={n} too large for 64-bit LL words"));
        }
        Ok(FixedPoint { qch, n: n as u32 })
    }

    pub fn qch(&self) -> u32 {
        self.qch
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Bits used at stage `s`.
    pub fn stage_width(&self, s: usize) -> Result<u32> {
        if s > self.n as usize {
            return param(format!("stage {s} not in [0, {}]", self.n));
        }
        Ok(self.width(s))
    }

    #[inline]
    fn width(&self, s: usize) -> u32 {
        self.qch + (self.n - s as u32)
    }

    /// Largest value representable at stage `s`.
    pub fn max_value(&self, s: usize) -> u64 {
        (1u64 << self.width(s)) - 1
    }

    pub fn q_max(&self) -> u32 {
        self.qch + self.n
    }

    #[inline]
    fn check(&self, out: LlPair<u64>, stage_out: usize) -> LlPair<u64> {
        debug_assert!(
            out.v0 <= self.max_value(stage_out) && out.v1 <= self.max_value(stage_out),
            "LL {out:?} overflows stage {stage_out} width {}",
            self.width(stage_out)
        );
        out
    }
}

impl Kernel for FixedPoint {
    type Value = u64;

    #[inline]
    fn f(&self, a: LlPair<u64>, b: LlPair<u64>, stage_out: usize) -> LlPair<u64> {
        self.check(
            LlPair::new((a.v0 + b.v0).min(a.v1 + b.v1), (a.v1 + b.v0).min(a.v0 + b.v1)),
            stage_out,
        )
    }

    #[inline]
    fn g(&self, a: LlPair<u64>, b: LlPair<u64>, u: u8, stage_out: usize) -> LlPair<u64> {
        let out = if u == 0 {
            LlPair::new(a.v0 + b.v0, a.v1 + b.v1)
        } else {
            LlPair::new(a.v1 + b.v0, a.v0 + b.v1)
        };
        self.check(out, stage_out)
    }

    fn saturated(&self) -> u64 {
        self.max_value(0)
    }
}

/// Selects one of the three evaluation models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ArithModel {
    ExactMinStar,
    ApproxMin,
    FixedPoint { qch: u32 },
}

impl ArithModel {
    /// Stage-`s` word width for a fixed-point model over `n` stages.
    pub fn stage_width(&self, n: usize, s: usize) -> Result<u32> {
        match *self {
            ArithModel::FixedPoint { qch } => FixedPoint::new(qch, n)?.stage_width(s),
            _ => param("floating-point models have no stage width"),
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, ArithModel::FixedPoint { .. })
    }

    pub fn label(&self) -> String {
        match *self {
            ArithModel::ExactMinStar => "exact".into(),
            ArithModel::ApproxMin => "approx".into(),
            ArithModel::FixedPoint { qch } => format!("fixed-q{qch}"),
        }
    }
}
