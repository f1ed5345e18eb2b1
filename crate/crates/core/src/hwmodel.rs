//! Closed-form cost model of the list-SC decoder architecture.
//!
//! All logarithms are base 2.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Architecture parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HwConfig {
    /// Blocklength `N`.
    pub len: u64,
    /// Code rate `R = K/N`.
    pub rate: f64,
    /// List size `L`.
    pub list_size: u64,
    /// Processing elements per SC core.
    pub pes: u64,
    /// Channel LL width `Q_ch`.
    pub qch: u64,
    /// Clock frequency in Hz.
    pub f_clk: f64,
}

impl HwConfig {
    pub fn validate(&self) -> Result<()> {
        if self.len < 2 || !self.len.is_power_of_two() {
            return param(format!("N={} must be a power of two ≥ 2", self.len));
        }
        if self.pes == 0 || !self.pes.is_power_of_two() {
            return param(format!("P={} must be a power of two", self.pes));
        }
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return param(format!("R={} not in (0, 1]", self.rate));
        }
        if self.qch == 0 {
            return param("Q_ch must be positive");
        }
        if !(self.f_clk >= 0.0 && self.f_clk.is_finite()) {
            return param(format!("f_clk={} must be finite and non-negative", self.f_clk));
        }
        Ok(())
    }

    /// `log N`.
    pub fn n(&self) -> u64 {
        self.len.trailing_zeros() as u64
    }
}

/// `B_LL = (2L+2)·N·Q_ch + 2L·(2N − log N − Q_ch − 2)`.
pub fn ll_storage_bits(cfg: &HwConfig) -> u64 {
    let (len, l, q, n) = (cfg.len as i64, cfg.list_size as i64, cfg.qch as i64, cfg.n() as i64);
    ((2 * l + 2) * len * q + 2 * l * (2 * len - n - q - 2)) as u64
}

/// `B_LL` as `2·(N·Q_ch + L·Σ_{i<log N} 2^i·(Q_ch + log N − i))`.
pub fn ll_storage_bits_sum(cfg: &HwConfig) -> u64 {
    let n = cfg.n();
    let per_path: u64 = (0..n).map(|i| (1u64 << i) * (cfg.qch + n - i)).sum();
    2 * (cfg.len * cfg.qch + cfg.list_size * per_path)
}

/// `B_tot = (2L+2)·N·Q_ch + 2L·(3N − log N − Q_ch − 2)`: LL storage plus
/// `L` partial-sum and `L` path memories of `N` bits each.
pub fn total_state_bits(cfg: &HwConfig) -> u64 {
    let (len, l, q, n) = (cfg.len, cfg.list_size, cfg.qch, cfg.n());
    (2 * l + 2) * len * q + 2 * l * (3 * len - n - q - 2)
}

/// `L·⌈log L⌉·(log N − 1)`.
pub fn pointer_bits(cfg: &HwConfig) -> u64 {
    cfg.list_size * ceil_log2(cfg.list_size) * (cfg.n() - 1)
}

/// Comparators of a radix-`2L` sorter: `2L(2L−1)/2`.
pub fn comparator_count(list_size: u64) -> u64 {
    2 * list_size * (2 * list_size - 1) / 2
}

fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

fn pipeline_term(cfg: &HwConfig) -> Result<f64> {
    cfg.validate()?;
    if cfg.len < 4 * cfg.pes {
        return Err(Error::Domain(format!(
            "N={} < 4P={}: log(N/4P) is negative",
            cfg.len,
            4 * cfg.pes
        )));
    }
    let ratio = cfg.len as f64 / cfg.pes as f64;
    Ok(ratio * (ratio / 4.0).log2())
}

/// SC decoding cycles: `2N + (N/P)·log(N/4P)`.
pub fn sc_cycles(cfg: &HwConfig) -> Result<f64> {
    Ok(2.0 * cfg.len as f64 + pipeline_term(cfg)?)
}

/// List-SC decoding cycles: `(2+R)N + (N/P)·log(N/4P)`; the extra `R·N`
/// are idle cycles spent waiting on the registered metric sorter.
pub fn decode_cycles(cfg: &HwConfig) -> Result<f64> {
    Ok((2.0 + cfg.rate) * cfg.len as f64 + pipeline_term(cfg)?)
}

/// Idle-cycle overhead of the sorter register relative to `2N`, in percent.
pub fn idle_overhead_percent(cfg: &HwConfig) -> f64 {
    50.0 * cfg.rate
}

/// Coded throughput `f_clk·N / C_list` in bit/s.
pub fn coded_throughput(cfg: &HwConfig) -> Result<f64> {
    Ok(cfg.f_clk * cfg.len as f64 / decode_cycles(cfg)?)
}

/// Every model output for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HwReport {
    pub config: HwConfig,
    pub ll_storage_bits: u64,
    pub total_state_bits: u64,
    pub pointer_bits: u64,
    pub comparators: u64,
    pub decode_cycles: f64,
    pub sc_cycles: f64,
    pub throughput_bps: f64,
}

impl HwReport {
    pub fn new(cfg: &HwConfig) -> Result<Self> {
        Ok(HwReport {
            config: *cfg,
            ll_storage_bits: ll_storage_bits(cfg),
            total_state_bits: total_state_bits(cfg),
            pointer_bits: pointer_bits(cfg),
            comparators: comparator_count(cfg.list_size),
            decode_cycles: decode_cycles(cfg)?,
            sc_cycles: sc_cycles(cfg)?,
            throughput_bps: coded_throughput(cfg)?,
        })
    }

    /// Plain-text table, one quantity per line.
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut s = format!(
            "N={} R={} L={} P={} Q_ch={} f_clk={:.1} MHz\n",
            c.len,
            c.rate,
            c.list_size,
            c.pes,
            c.qch,
            c.f_clk / 1e6
        );
        s += &format!("LL storage:        {} bits\n", self.ll_storage_bits);
        s += &format!("state memory:      {} bits\n", self.total_state_bits);
        s += &format!("pointer memory:    {} pointer bits\n", self.pointer_bits);
        s += &format!("sorter:            {} comparators\n", self.comparators);
        s += &format!("decode latency:    {} cycles\n", fmt_num(self.decode_cycles));
        s += &format!("SC latency:        {} cycles\n", fmt_num(self.sc_cycles));
        s += &format!("coded throughput:  {:.1} Mbps\n", self.throughput_bps / 1e6);
        s
    }
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}
