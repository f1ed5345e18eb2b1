//! Polar code definition, frozen-set construction and encoding.
//!
//! The generator matrix is `G = F^{⊗n}` with `F = [[1, 0], [1, 1]]` and no
//! bit-reversal permutation, so bit `u_i` and codeword bit `x_i` are both in
//! natural order. Indices in this module are 0-based.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Frozen-set construction method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Construction {
    /// Bhattacharyya parameter recursion on a BEC with the given erasure
    /// probability.
    BhattacharyyaBec { erasure_prob: f64 },
    /// Gaussian-approximation density evolution for BPSK over AWGN at a
    /// design Eb/N0 (dB). The noise level is derived with the code rate.
    GaussianApprox { design_ebn0_db: f64 },
}

impl Construction {
    fn validate(&self) -> Result<()> {
        match *self {
            Construction::BhattacharyyaBec { erasure_prob } => {
                if !(erasure_prob > 0.0 && erasure_prob < 1.0) {
                    return param(format!("erasure probability {erasure_prob} not in (0, 1)"));
                }
            }
            Construction::GaussianApprox { design_ebn0_db } => {
                if !design_ebn0_db.is_finite() {
                    return param("design Eb/N0 must be finite");
                }
            }
        }
        Ok(())
    }
}

/// A polar code of blocklength `N = 2^n` with `K` information bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarCode {
    n: usize,
    frozen: Vec<bool>,
    info: Vec<usize>,
}

impl PolarCode {
    /// Builds a code from an explicit frozen mask (`true` = frozen).
    pub fn from_frozen(frozen: Vec<bool>) -> Result<Self> {
        let len = frozen.len();
        if len == 0 || !len.is_power_of_two() {
            return param(format!("blocklength {len} is not a power of two"));
        }
        let info: Vec<usize> = (0..len).filter(|&i| !frozen[i]).collect();
        if info.is_empty() {
            return param("code has no information bits");
        }
        Ok(PolarCode {
            n: len.trailing_zeros() as usize,
            frozen,
            info,
        })
    }

    /// Picks the `k` most reliable synthetic channels of a length-`len` code.
    pub fn construct(len: usize, k: usize, method: Construction) -> Result<Self> {
        check_dims(len, k)?;
        method.validate()?;
        let rate = k as f64 / len as f64;
        let order = reliability_order(len, &method, rate);
        let mut frozen = vec![true; len];
        for &i in &order[..k] {
            frozen[i] = false;
        }
        PolarCode::from_frozen(frozen)
    }

    /// log2 of the blocklength.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Blocklength `N`.
    pub fn len(&self) -> usize {
        self.frozen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frozen.is_empty()
    }

    /// Number of information bits `K`.
    pub fn k(&self) -> usize {
        self.info.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.len() as f64
    }

    pub fn frozen(&self) -> &[bool] {
        &self.frozen
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    /// Non-frozen indices in increasing order.
    pub fn info_indices(&self) -> &[usize] {
        &self.info
    }

    /// Places `info` at the non-frozen positions and zeros elsewhere.
    pub fn embed(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k() {
            return param(format!("expected {} info bits, got {}", self.k(), info.len()));
        }
        if let Some(b) = info.iter().find(|&&b| b > 1) {
            return param(format!("bit value {b} is not 0 or 1"));
        }
        let mut u = vec![0u8; self.len()];
        for (&i, &b) in self.info.iter().zip(info) {
            u[i] = b;
        }
        Ok(u)
    }

    /// Reads the information bits out of a full `u` vector.
    pub fn extract(&self, u: &[u8]) -> Vec<u8> {
        self.info.iter().map(|&i| u[i]).collect()
    }

    /// Encodes `K` information bits into an `N`-bit codeword `x = u·F^{⊗n}`.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        let mut x = self.embed(info)?;
        polar_transform(&mut x);
        Ok(x)
    }

    /// Writes the frozen set as `"N K"` followed by one `'0'`/`'1'` per index
    /// (`'1'` = frozen).
    pub fn write_frozen<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.len(), self.k())?;
        let line: String = self.frozen.iter().map(|&f| if f { '1' } else { '0' }).collect();
        writeln!(w, "{line}")?;
        Ok(())
    }

    pub fn to_frozen_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.len(), self.k());
        s.extend(self.frozen.iter().map(|&f| if f { '1' } else { '0' }));
        s.push('\n');
        s
    }

    pub fn read_frozen<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (len, k) = loop {
            let Some((idx, line)) = lines.next() else {
                return Err(Error::Parse { line: 1, msg: "missing header".into() });
            };
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| Error::Parse { line: idx + 1, msg: msg.into() };
            if fields.len() != 2 {
                return Err(bad("header must be \"N K\""));
            }
            let len: usize = fields[0].parse().map_err(|_| bad("bad N"))?;
            let k: usize = fields[1].parse().map_err(|_| bad("bad K"))?;
            break (len, k);
        };
        let mut frozen = Vec::with_capacity(len);
        let mut last_line = 1;
        for (idx, line) in lines {
            let line = line?;
            last_line = idx + 1;
            for c in line.chars().filter(|c| !c.is_whitespace()) {
                match c {
                    '0' => frozen.push(false),
                    '1' => frozen.push(true),
                    _ => {
                        return Err(Error::Parse {
                            line: idx + 1,
                            msg: format!("unexpected character {c:?}"),
                        })
                    }
                }
            }
        }
        if frozen.len() != len {
            return Err(Error::Parse {
                line: last_line,
                msg: format!("expected {len} flags, found {}", frozen.len()),
            });
        }
        let code = PolarCode::from_frozen(frozen)?;
        if code.k() != k {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header says K={k} but mask has {} information bits", code.k()),
            });
        }
        Ok(code)
    }
}

fn check_dims(len: usize, k: usize) -> Result<()> {
    if len == 0 || !len.is_power_of_two() {
        return param(format!("blocklength {len} is not a power of two"));
    }
    if k == 0 || k > len {
        return param(format!("K={k} not in [1, {len}]"));
    }
    Ok(())
}

/// In-place `x ← x·F^{⊗n}` over GF(2). The transform is its own inverse.
pub fn polar_transform(x: &mut [u8]) {
    let len = x.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for block in (0..len).step_by(2 * half) {
            for j in block..block + half {
                x[j] ^= x[j + half];
            }
        }
        half *= 2;
    }
}

/// Per-index reliability scores (larger is more reliable).
///
/// The first polarization step is applied to the most significant index bit,
/// matching the natural-order decoding graph: a 0 bit takes the `f` (worse)
/// branch and a 1 bit the `g` (better) branch.
pub fn reliabilities(len: usize, method: &Construction, rate: f64) -> Vec<f64> {
    match *method {
        Construction::BhattacharyyaBec { erasure_prob } => {
            polarize(len, erasure_prob, |z| 2.0 * z - z * z, |z| z * z)
                .into_iter()
                .map(|z| -z)
                .collect()
        }
        Construction::GaussianApprox { design_ebn0_db } => {
            let sigma2 = 1.0 / (2.0 * rate * 10f64.powf(design_ebn0_db / 10.0));
            gaussian_approx_means(len, sigma2)
        }
    }
}

/// Mean LLRs of the synthetic channels under the Gaussian approximation.
pub fn gaussian_approx_means(len: usize, sigma2: f64) -> Vec<f64> {
    polarize(len, 2.0 / sigma2, ga_minus, |m| 2.0 * m)
}

fn polarize(len: usize, init: f64, minus: impl Fn(f64) -> f64, plus: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut cur = vec![init];
    while cur.len() < len {
        let mut next = Vec::with_capacity(cur.len() * 2);
        for &v in &cur {
            next.push(minus(v));
            next.push(plus(v));
        }
        cur = next;
    }
    cur
}

/// Indices sorted from most to least reliable. Ties go to the higher index.
pub fn reliability_order(len: usize, method: &Construction, rate: f64) -> Vec<usize> {
    let scores = reliabilities(len, method, rate);
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(b.cmp(&a)));
    order
}

// Chung's approximation of φ(x) = 1 − E[tanh(u/2)], u ~ N(x, 2x), in log form.
fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < 10.0 {
        -0.4527 * x.powf(0.86) + 0.0218
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

fn ln_phi_inv(target: f64) -> f64 {
    if target >= 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while ln_phi(hi) > target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

// m⁻ = φ⁻¹(1 − (1 − φ(m))²), evaluated as ln φ + ln(2 − φ) to survive large m.
fn ga_minus(m: f64) -> f64 {
    let lp = ln_phi(m);
    ln_phi_inv(lp + (2.0 - lp.exp()).ln())
}
