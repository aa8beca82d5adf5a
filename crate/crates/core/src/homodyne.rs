//! Balanced homodyne detector simulator.
//!
//! Generates voltage sample streams for a detector measuring the vacuum
//! state: band-shaped Gaussian shot noise whose variance scales with
//! local-oscillator power (hard-clamped at the saturation power) plus
//! independent electronic noise. A common-mode tone generator injects the
//! same intensity modulation into a single-photodiode record and the
//! balanced output, which is what the CMRR measurement compares.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::seeding::{derive_seed, derive_seed2, rng_from_seed};
use crate::{db_to_linear, Error, Result};

/// Samples per generation chunk. Every chunk draws from its own derived
/// seed, so a stream's prefix never depends on the total length requested.
const CHUNK: usize = 1 << 20;

// Stream tags for seed derivation; distinct tags keep the noise components
// statistically independent.
const TAG_SHOT: u64 = 1;
const TAG_ELEC: u64 = 2;
const TAG_SINGLE_PD: u64 = 3;

/// Voltage produced per milliwatt of detected optical power; fixes the
/// scale of the injected modulation tone relative to the noise terms.
const TONE_VOLTS_PER_MW: f64 = 1.0;

/// Physical model of the balanced detector and its readout chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorModel {
    /// Sample rate of the digitized output, Hz.
    pub sample_rate: f64,
    /// One-sided shot-noise PSD in V²/Hz produced per milliwatt of LO power.
    pub shot_noise_psd_per_mw: f64,
    /// One-sided electronic-noise PSD in V²/Hz, independent of the LO.
    pub elec_noise_psd: f64,
    /// Single-pole −3 dB corner of the detector response, Hz.
    pub f3db: f64,
    /// Peak in-band deviation of the deterministic gain ripple, dB.
    pub ripple_db: f64,
    /// LO power above which the response stops growing, W.
    pub saturation_power: f64,
    /// Responsivity ratio PD2/PD1; 1.0 is a perfectly balanced pair.
    pub pd_gain_ratio: f64,
    /// Master seed for all noise generation.
    pub rng_seed: u64,
    /// Corner frequency of an optional 1/f electronic-noise term, Hz.
    pub flicker_corner: Option<f64>,
}

impl Default for DetectorModel {
    /// Desk-scale model of the measured detector: 1.9 GHz bandwidth, 2 mW
    /// saturation, and a 41.5 dB shot-to-electronic PSD ratio at 1.75 GHz
    /// for a 1 mW LO.
    fn default() -> Self {
        let f3db = 1.9e9;
        let shot = 1.25e-12;
        let pole = 1.0 / (1.0 + (1.75e9_f64 / f3db).powi(2));
        DetectorModel {
            sample_rate: 6.4e9,
            shot_noise_psd_per_mw: shot,
            elec_noise_psd: shot * pole / db_to_linear(41.5),
            f3db,
            ripple_db: 0.0,
            saturation_power: 2.0e-3,
            pd_gain_ratio: 1.0,
            rng_seed: 1,
            flicker_corner: None,
        }
    }
}

impl DetectorModel {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            (self.sample_rate, "sample_rate"),
            (self.f3db, "f3db"),
            (self.saturation_power, "saturation_power"),
            (self.pd_gain_ratio, "pd_gain_ratio"),
        ];
        for (v, name) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            (self.shot_noise_psd_per_mw, "shot_noise_psd_per_mw"),
            (self.elec_noise_psd, "elec_noise_psd"),
            (self.ripple_db, "ripple_db"),
        ];
        for (v, name) in non_negative {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::domain(format!("{name} must be non-negative, got {v}")));
            }
        }
        if let Some(fc) = self.flicker_corner {
            if !fc.is_finite() || fc <= 0.0 {
                return Err(Error::domain(format!("flicker_corner must be positive, got {fc}")));
            }
        }
        Ok(())
    }

    /// Squared magnitude of the detector response at `f`: a single pole at
    /// `f3db` times a sinusoidal gain ripple bounded by ±`ripple_db`.
    pub fn response_sq(&self, f: f64) -> f64 {
        let pole = 1.0 / (1.0 + (f / self.f3db).powi(2));
        if self.ripple_db == 0.0 {
            pole
        } else {
            let period = self.f3db / 5.0;
            pole * db_to_linear(self.ripple_db * (std::f64::consts::TAU * f / period).sin())
        }
    }

    /// One-sided electronic-noise PSD at `f`; flat unless a 1/f corner is set.
    fn elec_psd_at(&self, f: f64) -> f64 {
        match self.flicker_corner {
            None => self.elec_noise_psd,
            // Floor at the first synthesis bin so the DC bin stays finite.
            Some(fc) => self.elec_noise_psd * (1.0 + fc / f.max(self.sample_rate / CHUNK as f64)),
        }
    }
}

/// A finite record of detector output voltage samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStream {
    pub samples: Vec<f64>,
    /// Sample rate in Hz.
    pub sample_rate: f64,
    /// Requested LO power in W (before any saturation clamp).
    pub lo_power: f64,
}

impl SampleStream {
    /// Mean-removed sample variance.
    pub fn variance(&self) -> f64 {
        let n = self.samples.len() as f64;
        let mean = self.samples.iter().sum::<f64>() / n;
        self.samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
    }
}

/// White N(0, sigma²) samples, drawn chunk by chunk.
fn white_noise(master: u64, n: usize, sigma: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut chunk = 0u64;
    while out.len() < n {
        let take = (n - out.len()).min(CHUNK);
        let mut rng = rng_from_seed(derive_seed(master, chunk));
        out.extend((0..take).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)));
        chunk += 1;
    }
    out
}

/// Gaussian noise with one-sided PSD `psd(f)`, built by spectrally shaping
/// white chunks. The per-bin amplitude gain g = sqrt(psd·fs/2) makes the
/// output's one-sided PSD equal the target (2·g²/fs = psd).
fn shaped_noise(master: u64, n: usize, sample_rate: f64, psd: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(CHUNK);
    let ifft = planner.plan_fft_inverse(CHUNK);
    // Symmetric gain (g[k] = g[CHUNK-k]) keeps the filtered signal real.
    let gain: Vec<f64> = (0..CHUNK)
        .map(|k| {
            let f = k.min(CHUNK - k) as f64 * sample_rate / CHUNK as f64;
            (psd(f) * sample_rate / 2.0).sqrt()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    let mut chunk = 0u64;
    while out.len() < n {
        let mut rng = rng_from_seed(derive_seed(master, chunk));
        let mut buf: Vec<Complex64> = (0..CHUNK)
            .map(|_| Complex64::new(rng.sample::<f64, _>(StandardNormal), 0.0))
            .collect();
        fft.process(&mut buf);
        for (b, &g) in buf.iter_mut().zip(&gain) {
            *b *= g;
        }
        ifft.process(&mut buf);
        let take = (n - out.len()).min(CHUNK);
        let scale = 1.0 / CHUNK as f64;
        out.extend(buf[..take].iter().map(|c| c.re * scale));
        chunk += 1;
    }
    out
}

/// Generates the shot-noise and electronic-noise components of a vacuum
/// measurement separately; their sum is the detector output. Exposed so the
/// entropy accounting can partition the two variances.
///
/// The shot component's seed derivation mixes in the effective (clamped) LO
/// power, so different powers give independent draws while requests above
/// saturation reproduce the clamped stream sample for sample.
pub fn generate_vacuum_components(
    m: &DetectorModel,
    lo_power: f64,
    n_samples: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    m.validate()?;
    if !lo_power.is_finite() || lo_power < 0.0 {
        return Err(Error::domain(format!("lo_power must be >= 0, got {lo_power}")));
    }
    if n_samples == 0 {
        return Err(Error::domain("n_samples must be positive"));
    }
    let p_eff = lo_power.min(m.saturation_power);
    let p_mw = p_eff / 1e-3;
    let shot = if p_mw == 0.0 || m.shot_noise_psd_per_mw == 0.0 {
        vec![0.0; n_samples]
    } else {
        let master = derive_seed2(m.rng_seed, TAG_SHOT, p_eff.to_bits());
        let scale = m.shot_noise_psd_per_mw * p_mw;
        shaped_noise(master, n_samples, m.sample_rate, |f| scale * m.response_sq(f))
    };
    let elec_master = derive_seed(m.rng_seed, TAG_ELEC);
    let elec = match m.flicker_corner {
        None => {
            let sigma = (m.elec_noise_psd * m.sample_rate / 2.0).sqrt();
            white_noise(elec_master, n_samples, sigma)
        }
        Some(_) => shaped_noise(elec_master, n_samples, m.sample_rate, |f| m.elec_psd_at(f)),
    };
    Ok((shot, elec))
}

/// Simulates the balanced output while one beam-splitter input is vacuum.
pub fn generate_vacuum_stream(
    m: &DetectorModel,
    lo_power: f64,
    n_samples: usize,
) -> Result<SampleStream> {
    let (shot, elec) = generate_vacuum_components(m, lo_power, n_samples)?;
    let samples = shot.iter().zip(&elec).map(|(a, b)| a + b).collect();
    Ok(SampleStream { samples, sample_rate: m.sample_rate, lo_power })
}

/// Simulates an intensity-modulation tone test: returns the single-PD
/// record carrying the tone at full amplitude and the balanced output where
/// only the channel-mismatch fraction |1 − pd_gain_ratio| of it survives.
pub fn generate_cm_tone_streams(
    m: &DetectorModel,
    lo_power: f64,
    tone_freq: f64,
    tone_depth: f64,
    n_samples: usize,
) -> Result<(SampleStream, SampleStream)> {
    m.validate()?;
    if !tone_freq.is_finite() || tone_freq <= 0.0 || tone_freq >= m.sample_rate / 2.0 {
        return Err(Error::domain(format!(
            "tone_freq must lie in (0, sample_rate/2) to avoid aliasing, got {tone_freq}"
        )));
    }
    if !(tone_depth > 0.0 && tone_depth < 1.0) {
        return Err(Error::domain(format!("tone_depth must lie in (0, 1), got {tone_depth}")));
    }
    let (shot, elec) = generate_vacuum_components(m, lo_power, n_samples)?;
    // The single-PD record gets an independent noise draw of the same
    // statistics; the tone itself is common to both photodiodes.
    let single_seed = derive_seed(m.rng_seed, TAG_SINGLE_PD);
    let single_model = DetectorModel { rng_seed: single_seed, ..m.clone() };
    let (s_shot, s_elec) = generate_vacuum_components(&single_model, lo_power, n_samples)?;

    let p_eff = lo_power.min(m.saturation_power);
    let amp = tone_depth * (p_eff / 1e-3) * TONE_VOLTS_PER_MW;
    let residual = amp * (1.0 - m.pd_gain_ratio);
    let w = std::f64::consts::TAU * tone_freq / m.sample_rate;
    let mut single = Vec::with_capacity(n_samples);
    let mut balanced = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let tone = (w * i as f64).sin();
        single.push(s_shot[i] + s_elec[i] + amp * tone);
        balanced.push(shot[i] + elec[i] + residual * tone);
    }
    let fs = m.sample_rate;
    Ok((
        SampleStream { samples: single, sample_rate: fs, lo_power },
        SampleStream { samples: balanced, sample_rate: fs, lo_power },
    ))
}
