//! Power spectral density estimation and spectral figures of merit.
//!
//! `estimate_spectrum` implements the averaged-periodogram method with
//! rectangular segments at 50% overlap and one-sided scaling. The
//! `measure_*` functions read detector figures of merit off the result:
//! spectral SNR, in-band flatness, −3 dB bandwidth, and common-mode
//! rejection. Noise-floor comparisons run on median-smoothed dB values to
//! stabilize single-bin estimates; tone-bin comparisons use raw bins so
//! coherent peaks are not smeared.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::homodyne::SampleStream;
use crate::{Error, Result};

/// One-sided power spectral density on a uniform frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    /// Bin centers in Hz: k·fs/n from DC to Nyquist inclusive.
    pub frequencies: Vec<f64>,
    /// PSD per bin, 10·log10 of power per Hz.
    pub psd_db: Vec<f64>,
    /// Grid spacing fs/n, Hz.
    pub resolution_bw: f64,
}

impl SpectrumEstimate {
    /// Index of the bin nearest `f`; `f` must lie inside the grid span.
    fn nearest_bin(&self, f: f64) -> Result<usize> {
        let lo = self.frequencies[0];
        let hi = *self.frequencies.last().unwrap();
        if !f.is_finite() || f < lo || f > hi {
            return Err(Error::domain(format!(
                "frequency {f} Hz outside the spectrum grid [{lo}, {hi}] Hz"
            )));
        }
        let idx = ((f - lo) / self.resolution_bw).round() as usize;
        Ok(idx.min(self.frequencies.len() - 1))
    }
}

fn same_grid(a: &SpectrumEstimate, b: &SpectrumEstimate) -> bool {
    if a.frequencies.len() != b.frequencies.len() || a.frequencies.is_empty() {
        return false;
    }
    let tol = 1e-6 * a.resolution_bw;
    (a.resolution_bw - b.resolution_bw).abs() <= tol
        && (a.frequencies[0] - b.frequencies[0]).abs() <= tol
}

/// Median over a 5-bin window centered on each bin; the window shrinks at
/// the grid edges.
fn median_smooth(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut out = Vec::with_capacity(n);
    let mut window: Vec<f64> = Vec::with_capacity(5);
    for i in 0..n {
        window.clear();
        window.extend_from_slice(&values[i.saturating_sub(2)..=(i + 2).min(n - 1)]);
        window.sort_by(|a, b| a.total_cmp(b));
        let m = window.len();
        out.push(if m % 2 == 1 {
            window[m / 2]
        } else {
            0.5 * (window[m / 2 - 1] + window[m / 2])
        });
    }
    out
}

/// Averaged-periodogram PSD estimate: rectangular segments of `segment_len`
/// samples at 50% overlap, one-sided scaling (interior bins fold in the
/// mirrored negative frequency).
pub fn estimate_spectrum(s: &SampleStream, segment_len: usize) -> Result<SpectrumEstimate> {
    if segment_len < 2 || !segment_len.is_power_of_two() {
        return Err(Error::domain(format!(
            "segment_len must be a power of two >= 2, got {segment_len}"
        )));
    }
    if segment_len > s.samples.len() {
        return Err(Error::domain(format!(
            "segment_len {segment_len} exceeds stream length {}",
            s.samples.len()
        )));
    }
    let n = segment_len;
    let fs = s.sample_rate;
    let hop = n / 2;
    let n_bins = n / 2 + 1;
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut acc = vec![0.0f64; n_bins];
    let mut buf = vec![Complex64::default(); n];
    let mut segments = 0usize;
    let mut start = 0usize;
    while start + n <= s.samples.len() {
        for (b, &x) in buf.iter_mut().zip(&s.samples[start..start + n]) {
            *b = Complex64::new(x, 0.0);
        }
        fft.process(&mut buf);
        for (k, a) in acc.iter_mut().enumerate() {
            let fold = if k == 0 || k == n / 2 { 1.0 } else { 2.0 };
            *a += fold * buf[k].norm_sqr() / (n as f64 * fs);
        }
        segments += 1;
        start += hop;
    }
    let psd_db = acc
        .iter()
        .map(|&p| 10.0 * (p / segments as f64).max(1e-300).log10())
        .collect();
    let frequencies = (0..n_bins).map(|k| k as f64 * fs / n as f64).collect();
    Ok(SpectrumEstimate { frequencies, psd_db, resolution_bw: fs / n as f64 })
}

/// Smoothed PSD difference, signal minus noise, at the bin nearest `f`.
pub fn measure_snr_spectrum(
    sig: &SpectrumEstimate,
    noise: &SpectrumEstimate,
    f: f64,
) -> Result<f64> {
    if !same_grid(sig, noise) {
        return Err(Error::domain("spectra must share one frequency grid"));
    }
    let idx = sig.nearest_bin(f)?;
    Ok(median_smooth(&sig.psd_db)[idx] - median_smooth(&noise.psd_db)[idx])
}

/// Half the peak-to-peak spread of the smoothed PSD inside `band`
/// (inclusive), i.e. the value x in a "±x dB" flatness statement.
pub fn measure_band_flatness(s: &SpectrumEstimate, band: (f64, f64)) -> Result<f64> {
    let (f_lo, f_hi) = band;
    let smoothed = median_smooth(&s.psd_db);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut hit = false;
    for (f, &db) in s.frequencies.iter().zip(&smoothed) {
        if (f_lo..=f_hi).contains(f) {
            min = min.min(db);
            max = max.max(db);
            hit = true;
        }
    }
    if !hit {
        return Err(Error::domain(format!(
            "band [{f_lo}, {f_hi}] Hz contains no spectrum bins"
        )));
    }
    Ok((max - min) / 2.0)
}

/// Lowest frequency above `ref_freq` where the smoothed PSD has fallen 3 dB
/// below its value at `ref_freq`, linearly interpolated between bins.
/// `None` when the grid never crosses −3 dB.
pub fn measure_bandwidth(s: &SpectrumEstimate, ref_freq: f64) -> Result<Option<f64>> {
    let smoothed = median_smooth(&s.psd_db);
    let ref_idx = s.nearest_bin(ref_freq)?;
    let target = smoothed[ref_idx] - 3.0;
    for i in ref_idx + 1..smoothed.len() {
        if smoothed[i] < target {
            // First bin below target; its predecessor is still at or above.
            let frac = (smoothed[i - 1] - target) / (smoothed[i - 1] - smoothed[i]);
            return Ok(Some(s.frequencies[i - 1] + frac * s.resolution_bw));
        }
    }
    Ok(None)
}

/// Tone-bin PSD in the single-photodiode spectrum minus the same bin in the
/// balanced spectrum, both raw. The tone must stand at least 10 dB above
/// the single-PD local floor to be measurable.
pub fn measure_cmrr(
    single_pd: &SpectrumEstimate,
    balanced: &SpectrumEstimate,
    tone_freq: f64,
) -> Result<f64> {
    if !same_grid(single_pd, balanced) {
        return Err(Error::domain("spectra must share one frequency grid"));
    }
    let idx = single_pd.nearest_bin(tone_freq)?;
    // Local floor: median of the bins 3..=12 away on both sides, skipping
    // the tone's immediate neighbors where leakage could land.
    let n = single_pd.psd_db.len();
    let mut floor_bins: Vec<f64> = Vec::new();
    for d in 3..=12usize {
        if let Some(i) = idx.checked_sub(d) {
            floor_bins.push(single_pd.psd_db[i]);
        }
        if idx + d < n {
            floor_bins.push(single_pd.psd_db[idx + d]);
        }
    }
    if floor_bins.len() < 4 {
        return Err(Error::measurement(format!(
            "not enough bins around {tone_freq} Hz to estimate the local floor"
        )));
    }
    floor_bins.sort_by(|a, b| a.total_cmp(b));
    let m = floor_bins.len();
    let floor = if m % 2 == 1 {
        floor_bins[m / 2]
    } else {
        0.5 * (floor_bins[m / 2 - 1] + floor_bins[m / 2])
    };
    let peak = single_pd.psd_db[idx];
    if peak - floor < 10.0 {
        return Err(Error::measurement(format!(
            "tone at {tone_freq} Hz not resolvable: {:.2} dB above the local floor",
            peak - floor
        )));
    }
    Ok(peak - balanced.psd_db[idx])
}
