//! Frequency sweeps, per-frequency S-matrices, and cascade algebra.

use num_complex::Complex64;

use crate::{Error, Result};

/// Strictly increasing, strictly positive frequency grid in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySweep {
    points: Vec<f64>,
}

impl FrequencySweep {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("frequency sweep must be non-empty"));
        }
        if !(points[0] > 0.0) {
            return Err(Error::domain(format!(
                "frequency sweep must be positive, first point is {}",
                points[0]
            )));
        }
        for w in points.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::domain(format!(
                    "frequency sweep must be strictly increasing, got {} after {}",
                    w[1], w[0]
                )));
            }
        }
        Ok(FrequencySweep { points })
    }

    /// Uniform grid with `n >= 2` points, inclusive of both ends.
    pub fn linspace(start: f64, stop: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("linspace needs at least 2 points"));
        }
        let step = (stop - start) / (n - 1) as f64;
        Self::new((0..n).map(|i| start + step * i as f64).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of grid points; at least 1 by construction.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Index of the grid point nearest to `f`.
    pub fn nearest_index(&self, f: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, &p) in self.points.iter().enumerate() {
            let d = (p - f).abs();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }
}

/// One two-port scattering matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SMatrix {
    pub s11: Complex64,
    pub s12: Complex64,
    pub s21: Complex64,
    pub s22: Complex64,
}

impl SMatrix {
    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        SMatrix { s11: z, s12: z, s21: z, s22: z }
    }

    pub fn thru() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        SMatrix { s11: zero, s12: one, s21: one, s22: zero }
    }

    pub fn determinant(&self) -> Complex64 {
        self.s11 * self.s22 - self.s12 * self.s21
    }

    pub fn get(&self, param: crate::rf::goals::SParam) -> Complex64 {
        use crate::rf::goals::SParam::*;
        match param {
            S11 => self.s11,
            S12 => self.s12,
            S21 => self.s21,
            S22 => self.s22,
        }
    }

    /// Largest |S_ij| in the matrix.
    pub fn max_magnitude(&self) -> f64 {
        self.s11
            .norm()
            .max(self.s12.norm())
            .max(self.s21.norm())
            .max(self.s22.norm())
    }
}

/// Two-port network sampled on a frequency sweep, referenced to `z_ref`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPortNetwork {
    sweep: FrequencySweep,
    matrices: Vec<SMatrix>,
    z_ref: f64,
}

impl TwoPortNetwork {
    pub fn new(sweep: FrequencySweep, matrices: Vec<SMatrix>, z_ref: f64) -> Result<Self> {
        if matrices.len() != sweep.len() {
            return Err(Error::domain(format!(
                "matrix count {} does not match sweep length {}",
                matrices.len(),
                sweep.len()
            )));
        }
        if !(z_ref > 0.0) {
            return Err(Error::domain(format!("z_ref must be positive, got {z_ref}")));
        }
        Ok(TwoPortNetwork { sweep, matrices, z_ref })
    }

    /// Ideal lossless thru on the given sweep.
    pub fn thru(sweep: FrequencySweep, z_ref: f64) -> Result<Self> {
        let n = sweep.len();
        Self::new(sweep, vec![SMatrix::thru(); n], z_ref)
    }

    /// Ideal matched pad: S11 = S22 = 0 and |S21| = 10^(−loss/20) at every
    /// frequency. A 10·log10(2) dB pad has K = 1.25 and μ = 2 exactly.
    pub fn matched_attenuator(loss_db: f64, sweep: FrequencySweep, z_ref: f64) -> Result<Self> {
        if !loss_db.is_finite() || loss_db < 0.0 {
            return Err(Error::domain(format!(
                "attenuation must be finite and >= 0 dB, got {loss_db}"
            )));
        }
        let a = Complex64::new(10f64.powf(-loss_db / 20.0), 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let m = SMatrix { s11: zero, s12: a, s21: a, s22: zero };
        let n = sweep.len();
        Self::new(sweep, vec![m; n], z_ref)
    }

    pub fn sweep(&self) -> &FrequencySweep {
        &self.sweep
    }

    pub fn matrices(&self) -> &[SMatrix] {
        &self.matrices
    }

    pub fn at(&self, i: usize) -> &SMatrix {
        &self.matrices[i]
    }

    pub fn z_ref(&self) -> f64 {
        self.z_ref
    }

    /// Chains `self` into `other` (port 2 of `self` feeding port 1 of
    /// `other`) via wave transfer matrices. Both networks must share the
    /// sweep and reference impedance, and `S21` must be nonzero everywhere.
    pub fn cascade(&self, other: &TwoPortNetwork) -> Result<TwoPortNetwork> {
        if self.sweep != other.sweep {
            return Err(Error::domain("cascade requires identical frequency sweeps"));
        }
        if self.z_ref != other.z_ref {
            return Err(Error::domain(format!(
                "cascade requires equal reference impedances, got {} and {}",
                self.z_ref, other.z_ref
            )));
        }
        let mut matrices = Vec::with_capacity(self.matrices.len());
        for (i, (a, b)) in self.matrices.iter().zip(&other.matrices).enumerate() {
            let ta = s_to_t(a).ok_or_else(|| zero_s21_error(self.sweep.points()[i]))?;
            let tb = s_to_t(b).ok_or_else(|| zero_s21_error(self.sweep.points()[i]))?;
            matrices.push(t_to_s(&t_mul(&ta, &tb)));
        }
        TwoPortNetwork::new(self.sweep.clone(), matrices, self.z_ref)
    }

    /// Resamples onto `target` by linear interpolation of real and
    /// imaginary parts. Every target point must lie within the source span;
    /// there is no extrapolation.
    pub fn interpolate_to(&self, target: &FrequencySweep) -> Result<TwoPortNetwork> {
        let src = self.sweep.points();
        let lo = src[0];
        let hi = src[src.len() - 1];
        let mut matrices = Vec::with_capacity(target.len());
        for &f in target.points() {
            if f < lo || f > hi {
                return Err(Error::domain(format!(
                    "interpolation target {f} Hz outside source span [{lo}, {hi}]"
                )));
            }
            // partition_point gives the first src point > f; f sits in
            // [src[k-1], src[k]].
            let k = src.partition_point(|&p| p <= f);
            if k == 0 {
                matrices.push(self.matrices[0]);
                continue;
            }
            if k == src.len() {
                matrices.push(self.matrices[src.len() - 1]);
                continue;
            }
            let (f0, f1) = (src[k - 1], src[k]);
            let t = (f - f0) / (f1 - f0);
            let (a, b) = (&self.matrices[k - 1], &self.matrices[k]);
            matrices.push(SMatrix {
                s11: lerp(a.s11, b.s11, t),
                s12: lerp(a.s12, b.s12, t),
                s21: lerp(a.s21, b.s21, t),
                s22: lerp(a.s22, b.s22, t),
            });
        }
        TwoPortNetwork::new(target.clone(), matrices, self.z_ref)
    }
}

fn lerp(a: Complex64, b: Complex64, t: f64) -> Complex64 {
    a + (b - a).scale(t)
}

fn zero_s21_error(f: f64) -> Error {
    Error::domain(format!("cascade undefined: S21 = 0 at {f} Hz"))
}

/// Wave transfer matrix [[t11, t12], [t21, t22]] mapping (a2, b2) -> (b1, a1).
type TMatrix = [Complex64; 4];

fn s_to_t(s: &SMatrix) -> Option<TMatrix> {
    if s.s21.norm() == 0.0 {
        return None;
    }
    Some([
        s.s12 - s.s11 * s.s22 / s.s21,
        s.s11 / s.s21,
        -s.s22 / s.s21,
        Complex64::new(1.0, 0.0) / s.s21,
    ])
}

fn t_mul(a: &TMatrix, b: &TMatrix) -> TMatrix {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

fn t_to_s(t: &TMatrix) -> SMatrix {
    SMatrix {
        s11: t[1] / t[3],
        s12: t[0] - t[1] * t[2] / t[3],
        s21: Complex64::new(1.0, 0.0) / t[3],
        s22: -t[2] / t[3],
    }
}
