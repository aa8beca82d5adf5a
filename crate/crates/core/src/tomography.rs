//! Shot-noise calibration against LO power and vacuum-state phase-space
//! reconstruction.
//!
//! Heterodyne quadrature pairs are generated with caller-set ground truth
//! (variance = slope·power + intercept per axis), calibrated by ordinary
//! least squares over a power sweep, normalized so pure shot noise has
//! per-axis variance 1/2, and histogrammed on the α plane for comparison
//! with the analytic vacuum Husimi function Q(α) = (1/π)·exp(−|α|²).

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::seeding::{derive_seed2, rng_from_seed};
use crate::{Error, Result};

const TAG_QUAD_P: u64 = 31;
const TAG_QUAD_Q: u64 = 32;

/// Paired quadrature samples at one LO power.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureStream {
    /// (p, q) samples in volts.
    pub pairs: Vec<(f64, f64)>,
    /// LO power in watts.
    pub lo_power: f64,
    pub sample_rate: f64,
}

impl QuadratureStream {
    pub fn validate(&self) -> Result<()> {
        if self.pairs.is_empty() {
            return Err(Error::domain("quadrature stream must be non-empty"));
        }
        if !self.lo_power.is_finite() || self.lo_power < 0.0 {
            return Err(Error::domain(format!("lo_power must be finite and >= 0, got {}", self.lo_power)));
        }
        if !self.sample_rate.is_finite() || self.sample_rate <= 0.0 {
            return Err(Error::domain(format!("sample_rate must be positive, got {}", self.sample_rate)));
        }
        if self.pairs.iter().any(|&(p, q)| !p.is_finite() || !q.is_finite()) {
            return Err(Error::domain("quadrature samples must be finite"));
        }
        Ok(())
    }

    fn axis_stats(&self, pick: impl Fn(&(f64, f64)) -> f64) -> (f64, f64) {
        let n = self.pairs.len() as f64;
        let mean = self.pairs.iter().map(&pick).sum::<f64>() / n;
        let var = self.pairs.iter().map(|s| (pick(s) - mean).powi(2)).sum::<f64>() / n;
        (mean, var)
    }

    pub fn variance_p(&self) -> f64 {
        self.axis_stats(|s| s.0).1
    }

    pub fn variance_q(&self) -> f64 {
        self.axis_stats(|s| s.1).1
    }
}

/// Ground truth for the quadrature generator: each axis draws independent
/// Gaussians with variance slope·power + intercept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeterodyneModel {
    /// Quadrature variance per watt of LO power (V²/W).
    pub shot_variance_per_watt: f64,
    /// Power-independent electronic variance floor (V²).
    pub electronic_variance: f64,
    pub sample_rate: f64,
    pub rng_seed: u64,
}

impl HeterodyneModel {
    pub fn validate(&self) -> Result<()> {
        if !self.shot_variance_per_watt.is_finite() || self.shot_variance_per_watt < 0.0 {
            return Err(Error::domain(format!(
                "shot_variance_per_watt must be finite and >= 0, got {}",
                self.shot_variance_per_watt
            )));
        }
        if !self.electronic_variance.is_finite() || self.electronic_variance < 0.0 {
            return Err(Error::domain(format!(
                "electronic_variance must be finite and >= 0, got {}",
                self.electronic_variance
            )));
        }
        if !self.sample_rate.is_finite() || self.sample_rate <= 0.0 {
            return Err(Error::domain(format!("sample_rate must be positive, got {}", self.sample_rate)));
        }
        Ok(())
    }
}

/// Draws `n` independent (p, q) Gaussian pairs at the given LO power.
/// The p and q streams are seeded separately (and per power), so different
/// powers and axes never share draws while the whole sweep stays
/// reproducible from one model seed.
pub fn generate_heterodyne_stream(
    model: &HeterodyneModel,
    lo_power: f64,
    n: usize,
) -> Result<QuadratureStream> {
    model.validate()?;
    if !lo_power.is_finite() || lo_power < 0.0 {
        return Err(Error::domain(format!("lo_power must be finite and >= 0, got {lo_power}")));
    }
    if n == 0 {
        return Err(Error::domain("sample count must be positive"));
    }
    let sigma = (model.shot_variance_per_watt * lo_power + model.electronic_variance).sqrt();
    let mut rng_p = rng_from_seed(derive_seed2(model.rng_seed, TAG_QUAD_P, lo_power.to_bits()));
    let mut rng_q = rng_from_seed(derive_seed2(model.rng_seed, TAG_QUAD_Q, lo_power.to_bits()));
    let pairs = (0..n)
        .map(|_| {
            let p: f64 = rng_p.sample(StandardNormal);
            let q: f64 = rng_q.sample(StandardNormal);
            (sigma * p, sigma * q)
        })
        .collect();
    Ok(QuadratureStream { pairs, lo_power, sample_rate: model.sample_rate })
}

/// Least-squares line through (power, variance) points for one quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFit {
    /// Variance per watt.
    pub slope: f64,
    /// Variance at zero power (electronic floor).
    pub intercept: f64,
    pub r_squared: f64,
}

/// Per-quadrature calibration results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeterodyneCalibration {
    pub p: CalibrationFit,
    pub q: CalibrationFit,
}

/// Ordinary least squares of variance against power. Exact linear data
/// recovers slope and intercept to machine precision with r² = 1; constant
/// data fits slope 0 with r² defined as 1 (zero residuals).
pub fn fit_variance_vs_power(points: &[(f64, f64)]) -> Result<CalibrationFit> {
    let mut powers: Vec<f64> = points.iter().map(|&(x, _)| x).collect();
    powers.sort_by(|a, b| a.total_cmp(b));
    powers.dedup();
    if powers.len() < 3 {
        return Err(Error::domain(format!(
            "calibration needs at least 3 distinct powers, got {}",
            powers.len()
        )));
    }
    if points.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::domain("calibration points must be finite"));
    }
    let n = points.len() as f64;
    let x_mean = points.iter().map(|&(x, _)| x).sum::<f64>() / n;
    let y_mean = points.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|&(x, _)| (x - x_mean).powi(2)).sum();
    let sxy: f64 = points.iter().map(|&(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res: f64 = points.iter().map(|&(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let ss_tot: f64 = points.iter().map(|&(_, y)| (y - y_mean).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    Ok(CalibrationFit { slope, intercept, r_squared })
}

/// Fits sample variance against LO power for each quadrature axis.
pub fn calibrate_shot_noise(streams: &[QuadratureStream]) -> Result<HeterodyneCalibration> {
    for s in streams {
        s.validate()?;
    }
    let pts_p: Vec<(f64, f64)> = streams.iter().map(|s| (s.lo_power, s.variance_p())).collect();
    let pts_q: Vec<(f64, f64)> = streams.iter().map(|s| (s.lo_power, s.variance_q())).collect();
    Ok(HeterodyneCalibration { p: fit_variance_vs_power(&pts_p)?, q: fit_variance_vs_power(&pts_q)? })
}

/// Mean-subtracted, shot-noise-normalized phase-space points.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaPoints {
    /// (Re α, Im α) per sample.
    pub points: Vec<(f64, f64)>,
    /// Set when an input axis had zero variance (nothing to normalize).
    pub degenerate: bool,
}

/// Maps quadrature voltages onto the α plane: subtract each axis mean,
/// divide by √(2·slope·power). Pure shot noise then has per-axis variance
/// 1/2, matching Q(α) = (1/π)·exp(−|α|²) for vacuum.
pub fn normalize_quadratures(
    s: &QuadratureStream,
    fit: &CalibrationFit,
    at_power: f64,
) -> Result<AlphaPoints> {
    s.validate()?;
    if !fit.slope.is_finite() || fit.slope <= 0.0 {
        return Err(Error::measurement(format!(
            "calibration slope must be positive to normalize, got {}",
            fit.slope
        )));
    }
    if !at_power.is_finite() || at_power <= 0.0 {
        return Err(Error::domain(format!("normalization power must be positive, got {at_power}")));
    }
    let (mean_p, var_p) = s.axis_stats(|x| x.0);
    let (mean_q, var_q) = s.axis_stats(|x| x.1);
    let scale = (2.0 * fit.slope * at_power).sqrt();
    let points = s
        .pairs
        .iter()
        .map(|&(p, q)| ((p - mean_p) / scale, (q - mean_q) / scale))
        .collect();
    Ok(AlphaPoints { points, degenerate: var_p == 0.0 || var_q == 0.0 })
}

/// Rectangular phase-space grid definition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { re_min: -3.0, re_max: 3.0, im_min: -3.0, im_max: 3.0, n_re: 64, n_im: 64 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.re_max <= self.re_min || self.im_max <= self.im_min {
            return Err(Error::domain("grid ranges must be finite with max > min"));
        }
        if self.n_re == 0 || self.n_im == 0 {
            return Err(Error::domain("grid must have at least one cell per axis"));
        }
        Ok(())
    }

    pub fn cell_width_re(&self) -> f64 {
        (self.re_max - self.re_min) / self.n_re as f64
    }

    pub fn cell_width_im(&self) -> f64 {
        (self.im_max - self.im_min) / self.n_im as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_width_re() * self.cell_width_im()
    }

    pub fn cell_center(&self, i_re: usize, i_im: usize) -> (f64, f64) {
        (
            self.re_min + (i_re as f64 + 0.5) * self.cell_width_re(),
            self.im_min + (i_im as f64 + 0.5) * self.cell_width_im(),
        )
    }

    /// Cell indices holding (re, im); `None` outside the grid. Upper edges
    /// are exclusive.
    pub fn bin_of(&self, re: f64, im: f64) -> Option<(usize, usize)> {
        if re < self.re_min || re >= self.re_max || im < self.im_min || im >= self.im_max {
            return None;
        }
        let i_re = ((re - self.re_min) / self.cell_width_re()) as usize;
        let i_im = ((im - self.im_min) / self.cell_width_im()) as usize;
        Some((i_re.min(self.n_re - 1), i_im.min(self.n_im - 1)))
    }
}

/// Density samples on a phase-space grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HusimiGrid {
    pub spec: GridSpec,
    /// Row-major, index i_im·n_re + i_re.
    pub density: Vec<f64>,
    pub cell_area: f64,
}

impl HusimiGrid {
    pub fn value(&self, i_re: usize, i_im: usize) -> f64 {
        self.density[i_im * self.spec.n_re + i_re]
    }

    /// Integrated density over the grid.
    pub fn total_mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.cell_area
    }

    pub fn max_density(&self) -> f64 {
        self.density.iter().fold(0.0f64, |a, &b| a.max(b))
    }
}

/// Histogram reconstruction plus its coverage accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub grid: HusimiGrid,
    pub in_grid_fraction: f64,
    /// Set when at least 2% of the points fell outside the grid.
    pub coverage_warning: Option<String>,
}

/// 2D histogram on the α plane with density = counts/(total·cell_area),
/// so Σ density·cell_area equals the in-grid point fraction exactly.
pub fn reconstruct_husimi(points: &[(f64, f64)], spec: &GridSpec) -> Result<Reconstruction> {
    spec.validate()?;
    if points.is_empty() {
        return Err(Error::domain("histogram needs at least one point"));
    }
    let mut counts = vec![0u64; spec.n_re * spec.n_im];
    let mut inside = 0u64;
    for &(re, im) in points {
        if let Some((i_re, i_im)) = spec.bin_of(re, im) {
            counts[i_im * spec.n_re + i_re] += 1;
            inside += 1;
        }
    }
    let total = points.len() as f64;
    let cell_area = spec.cell_area();
    let density = counts.iter().map(|&c| c as f64 / (total * cell_area)).collect();
    let in_grid_fraction = inside as f64 / total;
    let coverage_warning = if in_grid_fraction < 0.98 {
        Some(format!(
            "grid covers only {:.1}% of points; enlarge the ranges",
            100.0 * in_grid_fraction
        ))
    } else {
        None
    };
    Ok(Reconstruction {
        grid: HusimiGrid { spec: *spec, density, cell_area },
        in_grid_fraction,
        coverage_warning,
    })
}

/// Analytic vacuum Husimi function Q(α) = (1/π)·exp(−|α|²) at cell centers.
pub fn theoretical_vacuum_husimi(spec: &GridSpec) -> Result<HusimiGrid> {
    spec.validate()?;
    let mut density = Vec::with_capacity(spec.n_re * spec.n_im);
    for i_im in 0..spec.n_im {
        for i_re in 0..spec.n_re {
            let (x, y) = spec.cell_center(i_re, i_im);
            density.push((1.0 / PI) * (-(x * x + y * y)).exp());
        }
    }
    Ok(HusimiGrid { spec: *spec, density, cell_area: spec.cell_area() })
}

/// Bhattacharyya overlap Σ √(a·b)·cell_area between two densities on the
/// same grid; 1 for identical unit-mass densities, 0 for disjoint support.
pub fn compare_husimi(a: &HusimiGrid, b: &HusimiGrid) -> Result<f64> {
    if a.spec != b.spec {
        return Err(Error::domain("Husimi grids must share the same grid spec"));
    }
    Ok(a.density
        .iter()
        .zip(&b.density)
        .map(|(&x, &y)| (x * y).sqrt())
        .sum::<f64>()
        * a.cell_area)
}
