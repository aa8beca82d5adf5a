//! Lumped-element two-port synthesis and cascade chains.
//!
//! Series impedance Z on a Z0 reference: S21 = 2Z0/(2Z0+Z), S11 = Z/(2Z0+Z).
//! Shunt admittance Y: S21 = 2/(2+Z0·Y), S11 = -Z0·Y/(2+Z0·Y).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::rf::network::{FrequencySweep, SMatrix, TwoPortNetwork};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    SeriesInductor,
    SeriesCapacitor,
    ShuntInductor,
    ShuntCapacitor,
    SeriesResistor,
    ShuntResistor,
}

impl ElementKind {
    pub fn unit(&self) -> &'static str {
        match self {
            ElementKind::SeriesInductor | ElementKind::ShuntInductor => "H",
            ElementKind::SeriesCapacitor | ElementKind::ShuntCapacitor => "F",
            ElementKind::SeriesResistor | ElementKind::ShuntResistor => "ohm",
        }
    }
}

/// One chain element: either a passive one-value part or a tabulated
/// S-parameter block (e.g. a measured amplifier file).
#[derive(Debug, Clone)]
pub enum LumpedElement {
    Passive {
        kind: ElementKind,
        /// Henries, farads, or ohms according to `kind`.
        value: f64,
        /// Inclusive search bounds in the same unit. Equal bounds mark the
        /// element as fixed.
        bounds: (f64, f64),
        label: String,
    },
    SParamBlock { network: TwoPortNetwork, label: String },
}

impl LumpedElement {
    pub fn passive(
        kind: ElementKind,
        value: f64,
        bounds: (f64, f64),
        label: impl Into<String>,
    ) -> Result<Self> {
        let label = label.into();
        if !(bounds.0 > 0.0 && bounds.1 >= bounds.0) {
            return Err(Error::domain(format!(
                "element {label}: bounds ({}, {}) must be positive and ordered",
                bounds.0, bounds.1
            )));
        }
        if !(value >= bounds.0 && value <= bounds.1) {
            return Err(Error::domain(format!(
                "element {label}: value {value} outside bounds ({}, {})",
                bounds.0, bounds.1
            )));
        }
        Ok(LumpedElement::Passive { kind, value, bounds, label })
    }

    /// Fixed passive element (degenerate bounds).
    pub fn fixed(kind: ElementKind, value: f64, label: impl Into<String>) -> Result<Self> {
        Self::passive(kind, value, (value, value), label)
    }

    pub fn sparam_block(network: TwoPortNetwork, label: impl Into<String>) -> Self {
        LumpedElement::SParamBlock { network, label: label.into() }
    }

    pub fn label(&self) -> &str {
        match self {
            LumpedElement::Passive { label, .. } => label,
            LumpedElement::SParamBlock { label, .. } => label,
        }
    }

    /// True for passive elements with non-degenerate bounds.
    pub fn is_tunable(&self) -> bool {
        matches!(self, LumpedElement::Passive { bounds, .. } if bounds.0 < bounds.1)
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            LumpedElement::Passive { value, .. } => Some(*value),
            LumpedElement::SParamBlock { .. } => None,
        }
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        match self {
            LumpedElement::Passive { bounds, .. } => Some(*bounds),
            LumpedElement::SParamBlock { .. } => None,
        }
    }

    /// Returns a copy with a new value, clamped into bounds.
    pub(crate) fn with_value(&self, new_value: f64) -> LumpedElement {
        match self {
            LumpedElement::Passive { kind, bounds, label, .. } => LumpedElement::Passive {
                kind: *kind,
                value: new_value.clamp(bounds.0, bounds.1),
                bounds: *bounds,
                label: label.clone(),
            },
            LumpedElement::SParamBlock { .. } => self.clone(),
        }
    }
}

/// Cascade-ordered element chain, source to load.
#[derive(Debug, Clone)]
pub struct NetworkTopology {
    pub elements: Vec<LumpedElement>,
}

impl NetworkTopology {
    pub fn new(elements: Vec<LumpedElement>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::domain("topology must contain at least one element"));
        }
        Ok(NetworkTopology { elements })
    }

    pub fn tunable_indices(&self) -> Vec<usize> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_tunable())
            .map(|(i, _)| i)
            .collect()
    }
}

/// Realizes one element as a two-port on the given sweep.
///
/// S-parameter blocks are resampled onto the sweep by linear interpolation
/// and must cover its span.
pub fn synthesize_element(
    element: &LumpedElement,
    sweep: &FrequencySweep,
    z_ref: f64,
) -> Result<TwoPortNetwork> {
    match element {
        LumpedElement::SParamBlock { network, .. } => network.interpolate_to(sweep),
        LumpedElement::Passive { kind, value, label, .. } => {
            if !(*value > 0.0) {
                return Err(Error::domain(format!(
                    "element {label}: value must be positive, got {value}"
                )));
            }
            let mut matrices = Vec::with_capacity(sweep.len());
            for &f in sweep.points() {
                let w = 2.0 * std::f64::consts::PI * f;
                let j = Complex64::new(0.0, 1.0);
                let m = match kind {
                    ElementKind::SeriesInductor => series(j * (w * value), z_ref),
                    ElementKind::SeriesCapacitor => {
                        series(Complex64::new(1.0, 0.0) / (j * (w * value)), z_ref)
                    }
                    ElementKind::SeriesResistor => series(Complex64::new(*value, 0.0), z_ref),
                    ElementKind::ShuntInductor => {
                        shunt(Complex64::new(1.0, 0.0) / (j * (w * value)), z_ref)
                    }
                    ElementKind::ShuntCapacitor => shunt(j * (w * value), z_ref),
                    ElementKind::ShuntResistor => shunt(Complex64::new(1.0 / value, 0.0), z_ref),
                };
                matrices.push(m);
            }
            TwoPortNetwork::new(sweep.clone(), matrices, z_ref)
        }
    }
}

fn series(z: Complex64, z0: f64) -> SMatrix {
    let denom = z + 2.0 * z0;
    SMatrix {
        s11: z / denom,
        s12: 2.0 * z0 / denom,
        s21: 2.0 * z0 / denom,
        s22: z / denom,
    }
}

fn shunt(y: Complex64, z0: f64) -> SMatrix {
    let denom = y * z0 + 2.0;
    SMatrix {
        s11: -(y * z0) / denom,
        s12: 2.0 / denom,
        s21: 2.0 / denom,
        s22: -(y * z0) / denom,
    }
}

/// Left-fold of [`TwoPortNetwork::cascade`] over the synthesized elements.
pub fn evaluate_chain(
    topology: &NetworkTopology,
    sweep: &FrequencySweep,
    z_ref: f64,
) -> Result<TwoPortNetwork> {
    let mut acc: Option<TwoPortNetwork> = None;
    for element in &topology.elements {
        let net = synthesize_element(element, sweep, z_ref)?;
        acc = Some(match acc {
            None => net,
            Some(prev) => prev.cascade(&net)?,
        });
    }
    Ok(acc.expect("topology is non-empty by construction"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep() -> FrequencySweep {
        FrequencySweep::linspace(0.1e9, 3e9, 30).unwrap()
    }

    #[test]
    fn series_resistor_100_ohm_splits_evenly() {
        let e = LumpedElement::fixed(ElementKind::SeriesResistor, 100.0, "R1").unwrap();
        let net = synthesize_element(&e, &sweep(), 50.0).unwrap();
        for m in net.matrices() {
            assert!((m.s21.re - 0.5).abs() < 1e-15);
            assert!((m.s11.re - 0.5).abs() < 1e-15);
            assert!(m.s21.im.abs() < 1e-15);
        }
    }

    #[test]
    fn series_inductor_transparent_at_low_frequency() {
        // 1 nH at 100 kHz: |Z| = 6.3e-4 ohm against 2*Z0 = 100 ohm, so
        // |S11| ~ 6.3e-6 and |S21| is 1 up to second order.
        let e = LumpedElement::fixed(ElementKind::SeriesInductor, 1e-9, "L1").unwrap();
        let s = FrequencySweep::new(vec![1e5]).unwrap();
        let net = synthesize_element(&e, &s, 50.0).unwrap();
        assert!((net.at(0).s21.norm() - 1.0).abs() < 1e-9);
        assert!(net.at(0).s11.norm() < 1e-4);
    }

    #[test]
    fn shunt_capacitor_transparent_at_low_frequency() {
        let e = LumpedElement::fixed(ElementKind::ShuntCapacitor, 1e-12, "C1").unwrap();
        let s = FrequencySweep::new(vec![1e5]).unwrap();
        let net = synthesize_element(&e, &s, 50.0).unwrap();
        assert!((net.at(0).s21.norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn lossless_elements_conserve_power() {
        for kind in [
            ElementKind::SeriesInductor,
            ElementKind::SeriesCapacitor,
            ElementKind::ShuntInductor,
            ElementKind::ShuntCapacitor,
        ] {
            let value = match kind.unit() {
                "H" => 5e-9,
                _ => 2e-12,
            };
            let e = LumpedElement::fixed(kind, value, "x").unwrap();
            let net = synthesize_element(&e, &sweep(), 50.0).unwrap();
            for m in net.matrices() {
                let p = m.s11.norm_sqr() + m.s21.norm_sqr();
                assert!((p - 1.0).abs() < 1e-12, "{kind:?}: {p}");
            }
        }
    }

    #[test]
    fn reciprocity_preserved_by_chain() {
        let t = NetworkTopology::new(vec![
            LumpedElement::fixed(ElementKind::SeriesInductor, 3e-9, "L1").unwrap(),
            LumpedElement::fixed(ElementKind::ShuntCapacitor, 1.5e-12, "C1").unwrap(),
            LumpedElement::fixed(ElementKind::SeriesResistor, 20.0, "R1").unwrap(),
        ])
        .unwrap();
        let net = evaluate_chain(&t, &sweep(), 50.0).unwrap();
        for m in net.matrices() {
            assert!((m.s12 - m.s21).norm() < 1e-12);
        }
    }

    #[test]
    fn two_series_inductors_add() {
        let single =
            LumpedElement::fixed(ElementKind::SeriesInductor, 8e-9, "L").unwrap();
        let half = LumpedElement::fixed(ElementKind::SeriesInductor, 4e-9, "Lh").unwrap();
        let expect = synthesize_element(&single, &sweep(), 50.0).unwrap();
        let got = evaluate_chain(
            &NetworkTopology::new(vec![half.clone(), half]).unwrap(),
            &sweep(),
            50.0,
        )
        .unwrap();
        for (a, b) in expect.matrices().iter().zip(got.matrices()) {
            assert!((a.s11 - b.s11).norm() < 1e-12);
            assert!((a.s21 - b.s21).norm() < 1e-12);
        }
    }

    #[test]
    fn thru_block_chain_is_identity() {
        let block = LumpedElement::sparam_block(
            TwoPortNetwork::thru(sweep(), 50.0).unwrap(),
            "thru",
        );
        let net =
            evaluate_chain(&NetworkTopology::new(vec![block]).unwrap(), &sweep(), 50.0)
                .unwrap();
        for m in net.matrices() {
            assert!((m.s21.re - 1.0).abs() < 1e-15);
            assert!(m.s11.norm() < 1e-15);
        }
    }

    #[test]
    fn block_not_covering_sweep_is_rejected() {
        let narrow = TwoPortNetwork::thru(
            FrequencySweep::linspace(1e9, 2e9, 5).unwrap(),
            50.0,
        )
        .unwrap();
        let block = LumpedElement::sparam_block(narrow, "amp");
        let err = evaluate_chain(
            &NetworkTopology::new(vec![block]).unwrap(),
            &sweep(),
            50.0,
        );
        assert!(err.is_err());
    }

    #[test]
    fn element_construction_rules() {
        assert!(LumpedElement::passive(ElementKind::SeriesResistor, 50.0, (1.0, 100.0), "a")
            .is_ok());
        assert!(LumpedElement::passive(ElementKind::SeriesResistor, 0.5, (1.0, 100.0), "b")
            .is_err());
        assert!(LumpedElement::passive(ElementKind::SeriesResistor, 5.0, (10.0, 1.0), "c")
            .is_err());
        assert!(LumpedElement::passive(ElementKind::SeriesResistor, 5.0, (0.0, 10.0), "d")
            .is_err());
        assert!(NetworkTopology::new(vec![]).is_err());
    }

    #[test]
    fn tunable_detection() {
        let fixed = LumpedElement::fixed(ElementKind::SeriesResistor, 50.0, "rf").unwrap();
        let tunable =
            LumpedElement::passive(ElementKind::SeriesInductor, 5e-9, (1e-10, 1e-7), "lt")
                .unwrap();
        assert!(!fixed.is_tunable());
        assert!(tunable.is_tunable());
        let t = NetworkTopology::new(vec![fixed, tunable]).unwrap();
        assert_eq!(t.tunable_indices(), vec![1]);
    }
}
