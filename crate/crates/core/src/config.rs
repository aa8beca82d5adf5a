//! Run configuration: one JSON document carrying every tool's parameters,
//! a master seed, and the scale convention. Loading re-checks every module
//! invariant and rejects unknown keys by name — a typo in a config file
//! must fail loudly, not silently fall back to a default. The SHA-256
//! digest of the canonical serialization identifies the run in reports.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::detector::Mode;
use crate::entropy::AdcConfig;
use crate::{Error, Result};
use crate::homodyne::DetectorModel;
use crate::rf::GaConfig;
use crate::toeplitz::ExtractorConfig;

/// Vacuum-stream generation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// LO power, W.
    pub lo_power: f64,
    pub n_samples: usize,
    /// Welch segment length for PSD estimates; must be a power of two.
    pub segment_len: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { lo_power: 1.0e-3, n_samples: 1 << 20, segment_len: 4096 }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo_power.is_finite() && self.lo_power > 0.0) {
            return Err(Error::config(format!(
                "simulation.lo_power must be positive, got {}",
                self.lo_power
            )));
        }
        if self.n_samples < 2 {
            return Err(Error::config("simulation.n_samples must be at least 2"));
        }
        if self.segment_len < 2 || !self.segment_len.is_power_of_two() {
            return Err(Error::config(format!(
                "simulation.segment_len must be a power of two >= 2, got {}",
                self.segment_len
            )));
        }
        Ok(())
    }
}

/// Batch statistical-test parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    /// Sequences per batch; the proportion CI needs at least 10.
    pub batch_sequences: usize,
    /// Bits per sequence.
    pub sequence_len: usize,
    pub alpha: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { batch_sequences: 100, sequence_len: 1_000_000, alpha: 0.01 }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_sequences < 10 {
            return Err(Error::config(format!(
                "suite.batch_sequences must be at least 10, got {}",
                self.batch_sequences
            )));
        }
        if self.sequence_len < 128 {
            return Err(Error::config(format!(
                "suite.sequence_len must be at least 128, got {}",
                self.sequence_len
            )));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(format!(
                "suite.alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Full configuration for a run. Any subset of fields may appear in the
/// file; the rest take defaults. Per-module seeds are derived from
/// `rng_seed`, so one number pins the whole chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub rng_seed: u64,
    pub mode: Mode,
    pub out_dir: String,
    pub detector: DetectorModel,
    pub adc: AdcConfig,
    pub extractor: ExtractorConfig,
    /// Clip excursion e_max = excursion_factor · σ of the signal.
    pub excursion_factor: f64,
    /// Parallel extractor channels.
    pub channels: usize,
    pub ga: GaConfig,
    pub simulation: SimConfig,
    pub suite: SuiteConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rng_seed: 1,
            mode: Mode::PaperLiteral,
            out_dir: "out".to_string(),
            detector: DetectorModel::default(),
            adc: AdcConfig::default(),
            extractor: ExtractorConfig::default(),
            excursion_factor: 5.0,
            channels: 4,
            ga: GaConfig::default(),
            simulation: SimConfig::default(),
            suite: SuiteConfig::default(),
        }
    }
}

// Known key paths, one slice per JSON object. Kept in lockstep with the
// structs by `schema_covers_every_serialized_key`.
const KEYS_TOP: &[&str] = &[
    "rng_seed",
    "mode",
    "out_dir",
    "detector",
    "adc",
    "extractor",
    "excursion_factor",
    "channels",
    "ga",
    "simulation",
    "suite",
];
const KEYS_DETECTOR: &[&str] = &[
    "sample_rate",
    "shot_noise_psd_per_mw",
    "elec_noise_psd",
    "f3db",
    "ripple_db",
    "saturation_power",
    "pd_gain_ratio",
    "rng_seed",
    "flicker_corner",
];
const KEYS_ADC: &[&str] = &["bits", "half_range"];
const KEYS_EXTRACTOR: &[&str] = &["n_in", "m_out", "epsilon_hash", "h_min_per_bit"];
const KEYS_GA: &[&str] = &[
    "population",
    "generations",
    "mutation_rate",
    "crossover_rate",
    "rng_seed",
];
const KEYS_SIMULATION: &[&str] = &["lo_power", "n_samples", "segment_len"];
const KEYS_SUITE: &[&str] = &["batch_sequences", "sequence_len", "alpha"];

const SECTIONS: &[(&str, &[&str])] = &[
    ("detector", KEYS_DETECTOR),
    ("adc", KEYS_ADC),
    ("extractor", KEYS_EXTRACTOR),
    ("ga", KEYS_GA),
    ("simulation", KEYS_SIMULATION),
    ("suite", KEYS_SUITE),
];

/// Every key path in `value` not named by the schema. Collected in full
/// rather than failing on the first, so one load reports every typo.
fn unknown_keys(value: &serde_json::Value) -> Vec<String> {
    let mut out = Vec::new();
    let serde_json::Value::Object(map) = value else {
        return out;
    };
    for (key, sub) in map {
        if !KEYS_TOP.contains(&key.as_str()) {
            out.push(key.clone());
            continue;
        }
        let Some((_, known)) = SECTIONS.iter().find(|(name, _)| *name == key) else {
            continue;
        };
        if let serde_json::Value::Object(inner) = sub {
            for nested in inner.keys() {
                if !known.contains(&nested.as_str()) {
                    out.push(format!("{key}.{nested}"));
                }
            }
        }
    }
    out
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.detector.validate()?;
        self.adc.validate()?;
        self.extractor.validate()?;
        self.ga.validate()?;
        self.simulation.validate()?;
        self.suite.validate()?;
        if !(self.excursion_factor.is_finite() && self.excursion_factor > 0.0) {
            return Err(Error::config(format!(
                "excursion_factor must be positive, got {}",
                self.excursion_factor
            )));
        }
        if self.channels == 0 {
            return Err(Error::config("channels must be at least 1"));
        }
        if self.out_dir.is_empty() {
            return Err(Error::config("out_dir must not be empty"));
        }
        Ok(())
    }

    /// SHA-256 over the compact canonical serialization. Field order is
    /// fixed by the struct, so equal configs digest equally.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("RunConfig always serializes");
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parses, rejects unknown keys by name, and re-validates.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if !value.is_object() {
        return Err(Error::config("config root must be a JSON object"));
    }
    let unknown = unknown_keys(&value);
    if !unknown.is_empty() {
        return Err(Error::config(format!(
            "unknown config keys: {}",
            unknown.join(", ")
        )));
    }
    let config: RunConfig = serde_json::from_value(value)?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}
