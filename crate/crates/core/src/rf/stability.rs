//! Unconditional-stability screening of two-ports.
//!
//! Rollett K plus the two single-parameter mu factors. A frequency point is
//! unconditionally stable when all three exceed 1. Unilateral networks
//! (S12*S21 = 0) get K = +inf by convention; a 0/0 form in any factor is
//! reported as indeterminate rather than guessed.

use serde::Serialize;

use crate::rf::network::{SMatrix, TwoPortNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityClass {
    Stable,
    PotentiallyUnstable,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityRecord {
    pub frequency_hz: f64,
    pub k_factor: f64,
    pub mu_source: f64,
    pub mu_load: f64,
    /// Set when any factor hit a 0/0 form; that factor is NaN.
    pub indeterminate: bool,
}

impl StabilityRecord {
    pub fn class(&self) -> StabilityClass {
        if self.indeterminate {
            StabilityClass::Indeterminate
        } else if self.k_factor > 1.0 && self.mu_source > 1.0 && self.mu_load > 1.0 {
            StabilityClass::Stable
        } else {
            StabilityClass::PotentiallyUnstable
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub records: Vec<StabilityRecord>,
    pub stable_everywhere: bool,
}

/// Ratio with the conventions this module needs: +-inf for x/0 with
/// nonzero numerator, NaN for 0/0.
fn guarded_div(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num > 0.0 {
            f64::INFINITY
        } else if num < 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::NAN
        }
    } else {
        num / den
    }
}

fn factors(m: &SMatrix) -> (f64, f64, f64) {
    let delta = m.determinant();
    let s12s21 = (m.s12 * m.s21).norm();
    let k_num = 1.0 - m.s11.norm_sqr() - m.s22.norm_sqr() + delta.norm_sqr();
    let k = guarded_div(k_num, 2.0 * s12s21);
    let mu_load_den = (m.s22 - delta * m.s11.conj()).norm() + s12s21;
    let mu_load = guarded_div(1.0 - m.s11.norm_sqr(), mu_load_den);
    let mu_source_den = (m.s11 - delta * m.s22.conj()).norm() + s12s21;
    let mu_source = guarded_div(1.0 - m.s22.norm_sqr(), mu_source_den);
    (k, mu_source, mu_load)
}

/// Evaluates K and both mu factors at every sweep point.
pub fn stability_factors(network: &TwoPortNetwork) -> StabilityReport {
    let mut records = Vec::with_capacity(network.sweep().len());
    for (i, &f) in network.sweep().points().iter().enumerate() {
        let (k, mu_source, mu_load) = factors(network.at(i));
        let indeterminate = k.is_nan() || mu_source.is_nan() || mu_load.is_nan();
        records.push(StabilityRecord {
            frequency_hz: f,
            k_factor: k,
            mu_source,
            mu_load,
            indeterminate,
        });
    }
    let stable_everywhere = records
        .iter()
        .all(|r| r.class() == StabilityClass::Stable);
    StabilityReport { records, stable_everywhere }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rf::network::FrequencySweep;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(m: SMatrix) -> TwoPortNetwork {
        TwoPortNetwork::new(FrequencySweep::new(vec![1e9]).unwrap(), vec![m], 50.0).unwrap()
    }

    #[test]
    fn matched_3db_attenuator_factors() {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let m = SMatrix {
            s11: c(0.0, 0.0),
            s12: c(a, 0.0),
            s21: c(a, 0.0),
            s22: c(0.0, 0.0),
        };
        let report = stability_factors(&single(m));
        let r = &report.records[0];
        // Delta = -1/2: K = (1 + 1/4)/(2 * 1/2) = 1.25, mu = 1/(1/2) = 2.
        assert!((r.k_factor - 1.25).abs() < 1e-12, "K = {}", r.k_factor);
        assert!((r.mu_source - 2.0).abs() < 1e-12);
        assert!((r.mu_load - 2.0).abs() < 1e-12);
        assert_eq!(r.class(), StabilityClass::Stable);
        assert!(report.stable_everywhere);
    }

    #[test]
    fn unilateral_network_gets_infinite_k() {
        let m = SMatrix {
            s11: c(0.3, 0.1),
            s12: c(0.0, 0.0),
            s21: c(4.0, 0.0),
            s22: c(0.2, -0.1),
        };
        let report = stability_factors(&single(m));
        let r = &report.records[0];
        assert_eq!(r.k_factor, f64::INFINITY);
        assert!(!r.indeterminate);
        assert!(r.mu_source > 1.0 && r.mu_load > 1.0);
        assert_eq!(r.class(), StabilityClass::Stable);
    }

    #[test]
    fn reflective_port_flips_mu_sign() {
        // |S11| > 1: mu_load numerator negative.
        let m = SMatrix {
            s11: c(1.2, 0.0),
            s12: c(0.1, 0.0),
            s21: c(2.0, 0.0),
            s22: c(0.1, 0.0),
        };
        let report = stability_factors(&single(m));
        let r = &report.records[0];
        assert!(r.mu_load < 0.0, "mu_load = {}", r.mu_load);
        assert_eq!(r.class(), StabilityClass::PotentiallyUnstable);
        assert!(!report.stable_everywhere);
    }

    #[test]
    fn zero_matrix_is_stable_with_infinite_factors() {
        let report = stability_factors(&single(SMatrix::zero()));
        let r = &report.records[0];
        assert_eq!(r.k_factor, f64::INFINITY);
        assert_eq!(r.mu_source, f64::INFINITY);
        assert_eq!(r.mu_load, f64::INFINITY);
        assert_eq!(r.class(), StabilityClass::Stable);
    }

    #[test]
    fn zero_over_zero_is_indeterminate() {
        // Unilateral with |S11| = 1 exactly: mu_load = 0/0.
        let m = SMatrix {
            s11: c(1.0, 0.0),
            s12: c(0.0, 0.0),
            s21: c(0.0, 0.0),
            s22: c(0.0, 0.0),
        };
        // Delta = 0, so mu_load denominator |S22 - 0| + 0 = 0 and numerator
        // 1 - 1 = 0.
        let report = stability_factors(&single(m));
        let r = &report.records[0];
        assert!(r.indeterminate);
        assert_eq!(r.class(), StabilityClass::Indeterminate);
        assert!(!report.stable_everywhere);
    }

    #[test]
    fn trichotomy_is_exhaustive_and_exclusive() {
        let cases = [
            SMatrix::zero(),
            SMatrix::thru(),
            SMatrix {
                s11: c(0.5, 0.2),
                s12: c(0.3, 0.0),
                s21: c(3.0, 1.0),
                s22: c(0.4, -0.3),
            },
            SMatrix {
                s11: c(1.0, 0.0),
                s12: c(0.0, 0.0),
                s21: c(0.0, 0.0),
                s22: c(0.0, 0.0),
            },
        ];
        for m in cases {
            let report = stability_factors(&single(m));
            let r = &report.records[0];
            let classes = [
                StabilityClass::Stable,
                StabilityClass::PotentiallyUnstable,
                StabilityClass::Indeterminate,
            ];
            let matches: usize =
                classes.iter().filter(|&&class| r.class() == class).count();
            assert_eq!(matches, 1);
        }
    }

    #[test]
    fn thru_is_borderline_not_stable() {
        // Delta = -1, so K = (1 + 1)/2 = 1 and mu = 1/(0 + 1) = 1 exactly;
        // the strict > 1 rule classifies the lossless thru as borderline.
        let report = stability_factors(&single(SMatrix::thru()));
        let r = &report.records[0];
        assert!((r.k_factor - 1.0).abs() < 1e-15);
        assert!((r.mu_source - 1.0).abs() < 1e-15);
        assert!((r.mu_load - 1.0).abs() < 1e-15);
        assert_eq!(r.class(), StabilityClass::PotentiallyUnstable);
    }
}
