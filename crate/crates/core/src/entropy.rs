//! ADC quantization and min-entropy accounting.
//!
//! Covers the digitization side of the randomness source: an ideal
//! mid-rise quantizer with saturating end codes, the empirical min-entropy
//! of the resulting codes, the conditional min-entropy of the quantum
//! noise when an adversary holds the classical noise (the c1/c2 bound),
//! the safety condition c1 ≤ c2 under which the simplified bound applies,
//! and the quantum-to-classical noise ratio.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::homodyne::SampleStream;
use crate::{Error, Result};

/// Ideal ADC transfer description: `bits` output bits spanning
/// ±`half_range` volts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdcConfig {
    pub bits: u32,
    /// Half of the full input span R, V; inputs beyond ±R saturate.
    pub half_range: f64,
}

impl Default for AdcConfig {
    /// 8 bits over ±0.16 V, the digitizer setting the rest of the chain
    /// is sized around.
    fn default() -> Self {
        AdcConfig { bits: 8, half_range: 0.16 }
    }
}

impl AdcConfig {
    pub fn new(bits: u32, half_range: f64) -> Result<Self> {
        let adc = AdcConfig { bits, half_range };
        adc.validate()?;
        Ok(adc)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=16).contains(&self.bits) {
            return Err(Error::domain(format!("bits must lie in [1, 16], got {}", self.bits)));
        }
        if !self.half_range.is_finite() || self.half_range <= 0.0 {
            return Err(Error::domain(format!(
                "half_range must be positive, got {}",
                self.half_range
            )));
        }
        Ok(())
    }

    /// Number of output codes, 2^bits.
    pub fn levels(&self) -> usize {
        1 << self.bits
    }

    /// Code bin width δ = 2·half_range/2^bits, V.
    pub fn bin_width(&self) -> f64 {
        2.0 * self.half_range / self.levels() as f64
    }
}

/// Split of the measured noise into quantum and classical parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePartition {
    /// Quantum (shot) noise standard deviation σ_Q, V.
    pub sigma_q: f64,
    /// Classical (electronic) noise standard deviation σ_E, V.
    pub sigma_e: f64,
    /// Worst-case classical excursion bound e_max, V.
    pub e_max: f64,
}

impl NoisePartition {
    /// Builds a partition that bounds the classical excursion at
    /// `excursion_factor`·σ_E.
    pub fn from_sigmas(sigma_q: f64, sigma_e: f64, excursion_factor: f64) -> Self {
        NoisePartition { sigma_q, sigma_e, e_max: excursion_factor * sigma_e }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.sigma_q.is_finite() || self.sigma_q <= 0.0 {
            return Err(Error::domain(format!("sigma_q must be positive, got {}", self.sigma_q)));
        }
        if !self.sigma_e.is_finite() || self.sigma_e < 0.0 {
            return Err(Error::domain(format!(
                "sigma_e must be non-negative, got {}",
                self.sigma_e
            )));
        }
        if !self.e_max.is_finite() || self.e_max < 0.0 {
            return Err(Error::domain(format!("e_max must be non-negative, got {}", self.e_max)));
        }
        Ok(())
    }
}

/// Codes produced by pushing an analog stream through the ADC model.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedStream {
    /// One code per input sample, each in [0, 2^bits).
    pub codes: Vec<u16>,
    /// Samples below −R, clamped to code 0.
    pub saturated_low: usize,
    /// Samples at or above +R, clamped to the top code.
    pub saturated_high: usize,
}

impl QuantizedStream {
    pub fn saturated_total(&self) -> usize {
        self.saturated_low + self.saturated_high
    }
}

/// Quantizes into left-closed bins [−R + kδ, −R + (k+1)δ); out-of-range
/// samples clamp to the end codes and are counted, never rejected. Note
/// that 0 V falls on a bin edge, not a bin center.
pub fn quantize(s: &SampleStream, adc: &AdcConfig) -> Result<QuantizedStream> {
    adc.validate()?;
    let delta = adc.bin_width();
    let r = adc.half_range;
    let top = (adc.levels() - 1) as u16;
    let mut codes = Vec::with_capacity(s.samples.len());
    let mut saturated_low = 0usize;
    let mut saturated_high = 0usize;
    for &v in &s.samples {
        let code = if v < -r {
            saturated_low += 1;
            0
        } else {
            let k = ((v + r) / delta).floor() as i64;
            if k > top as i64 {
                saturated_high += 1;
                top
            } else {
                k as u16
            }
        };
        codes.push(code);
    }
    Ok(QuantizedStream { codes, saturated_low, saturated_high })
}

/// −log2 of the most frequent code's empirical probability.
pub fn empirical_min_entropy(codes: &[u16], bits: u32) -> Result<f64> {
    if codes.is_empty() {
        return Err(Error::domain("empirical min-entropy needs at least one sample"));
    }
    if !(1..=16).contains(&bits) {
        return Err(Error::domain(format!("bits must lie in [1, 16], got {bits}")));
    }
    let levels = 1usize << bits;
    let mut hist = vec![0u64; levels];
    for &c in codes {
        if (c as usize) >= levels {
            return Err(Error::domain(format!("code {c} out of range for {bits} bits")));
        }
        hist[c as usize] += 1;
    }
    let max = *hist.iter().max().unwrap();
    Ok(-(max as f64 / codes.len() as f64).log2())
}

/// Conditional min-entropy of the quantized quantum noise given classical
/// noise bounded by e_max. Returns (h, c1, c2) where c1 is the worst-case
/// probability of a saturating end code, c2 the probability of a bin-width
/// window centered on the Gaussian peak, and h = −log2(max(c1, c2)).
///
/// When c1 ≤ c2 this reduces exactly to the simplified bound h = −log2(c2).
pub fn conditional_min_entropy(np: &NoisePartition, adc: &AdcConfig) -> Result<(f64, f64, f64)> {
    np.validate()?;
    adc.validate()?;
    let delta = adc.bin_width();
    let rt2 = std::f64::consts::SQRT_2;
    let c1 = 0.5 * (erf((np.e_max - adc.half_range + 1.5 * delta) / (rt2 * np.sigma_q)) + 1.0);
    let c2 = erf(delta / (2.0 * rt2 * np.sigma_q));
    Ok((-c1.max(c2).log2(), c1, c2))
}

/// Safe-operation predicate: true iff c1 ≤ c2 (inclusive), i.e. the
/// classical excursion cannot push more probability into an end code than
/// the central bin already holds.
pub fn check_safety(np: &NoisePartition, adc: &AdcConfig) -> Result<bool> {
    let (_, c1, c2) = conditional_min_entropy(np, adc)?;
    Ok(c1 <= c2)
}

/// Quantum-to-classical noise ratio 10·log10(σ_Q²/σ_E²) in dB; `None`
/// flags an infinite ratio (zero classical noise).
pub fn qcnr(np: &NoisePartition) -> Result<Option<f64>> {
    np.validate()?;
    if np.sigma_e == 0.0 {
        return Ok(None);
    }
    Ok(Some(10.0 * (np.sigma_q * np.sigma_q / (np.sigma_e * np.sigma_e)).log10()))
}

/// Full entropy accounting for one quantized record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub h_min_empirical: f64,
    pub h_min_conditional: f64,
    pub c1: f64,
    pub c2: f64,
    /// True when c1 ≤ c2.
    pub safe: bool,
    /// None encodes an infinite ratio (zero classical noise).
    pub qcnr_db: Option<f64>,
    pub saturated_low: usize,
    pub saturated_high: usize,
}

pub fn entropy_report(
    q: &QuantizedStream,
    np: &NoisePartition,
    adc: &AdcConfig,
) -> Result<EntropyReport> {
    let (h_cond, c1, c2) = conditional_min_entropy(np, adc)?;
    Ok(EntropyReport {
        h_min_empirical: empirical_min_entropy(&q.codes, adc.bits)?,
        h_min_conditional: h_cond,
        c1,
        c2,
        safe: c1 <= c2,
        qcnr_db: qcnr(np)?,
        saturated_low: q.saturated_low,
        saturated_high: q.saturated_high,
    })
}
