use std::path::{Path, PathBuf};

use anyhow::Context;
use polarlist::hwmodel::HwConfig;
use serde::{Deserialize, Serialize};

use crate::{usage, Arith, Method};

pub const SEED_ENV: &str = "POLARLIST_SEED";

/// Optional TOML config. Every field can also be given as a flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub fer: Option<FerFile>,
    pub hwreport: Option<HwFile>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FerFile {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub method: Option<Method>,
    pub design_snr: Option<f64>,
    pub eps: Option<f64>,
    pub code: Option<PathBuf>,
    pub snrs: Option<Snrs>,
    pub list: Option<Vec<usize>>,
    pub sc: Option<bool>,
    pub arith: Option<Arith>,
    pub qch: Option<Vec<u32>>,
    pub float_baseline: Option<bool>,
    pub max_frames: Option<u64>,
    pub min_errors: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

/// `snrs = "1.0:0.5:3.0"` or `snrs = [1.0, 2.0]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Snrs {
    Spec(String),
    List(Vec<f64>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HwFile {
    pub n: Option<u64>,
    pub rate: Option<f64>,
    pub l: Option<u64>,
    pub p: Option<u64>,
    pub qch: Option<u64>,
    pub fclk: Option<f64>,
    pub json: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        match toml::from_str(&text) {
            Ok(cfg) => Ok(cfg),
            Err(e) => usage(format!("{}: {e}", path.display())),
        }
    }
}

pub fn resolve_seed(flag: Option<u64>, file: &FileConfig) -> anyhow::Result<u64> {
    if let Some(s) = flag.or(file.seed) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => match v.trim().parse() {
            Ok(s) => Ok(s),
            Err(_) => usage(format!("{SEED_ENV}={v:?} is not an unsigned integer")),
        },
        Err(_) => Ok(1),
    }
}

/// Parses `start:step:stop` (inclusive) or `a,b,c`.
pub fn parse_snrs(spec: &str) -> anyhow::Result<Vec<f64>> {
    let num = |s: &str| -> anyhow::Result<f64> {
        match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => usage(format!("bad SNR value {s:?}")),
        }
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if step <= 0.0 || stop < start {
                return usage(format!("SNR range {spec:?} needs step > 0 and stop >= start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            // round to the step's grid so 0.1 steps print cleanly
            Ok((0..count).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => usage(format!("SNR spec {spec:?} is neither start:step:stop nor a list")),
    }
}

/// Written next to every result file.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp: String,
    pub jobs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sim: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hw: Option<&'a HwConfig>,
    pub outputs: Vec<PathBuf>,
}

impl<'a> RunManifest<'a> {
    pub fn new(jobs: Option<usize>, outputs: Vec<PathBuf>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            timestamp: chrono::Utc::now().to_rfc3339(),
            jobs,
            sim: None,
            hw: None,
            outputs,
        }
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}
