//! Element-tolerance sensitivity of a chain's S-parameter response.
//!
//! Perturbations are logarithmic in the element value, which makes the
//! numbers comparable across henries, farads, and ohms: the reported
//! figure is d(band-mean |S| in dB) / d(ln value), estimated by a central
//! difference from `value*(1-h)` to `value*(1+h)`.

use serde::Serialize;

use crate::db::power_db;
use crate::rf::elements::{evaluate_chain, NetworkTopology};
use crate::rf::goals::SParam;
use crate::rf::network::FrequencySweep;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct SensitivityEntry {
    pub element_index: usize,
    pub label: String,
    /// d(band-mean dB)/d(ln value); 0 for non-tunable elements.
    pub sensitivity: f64,
    /// True when a perturbation hit the element bounds and was clamped.
    pub clamped: bool,
    pub tunable: bool,
}

fn band_mean_db(
    topology: &NetworkTopology,
    sweep: &FrequencySweep,
    z_ref: f64,
    param: SParam,
) -> Result<f64> {
    let net = evaluate_chain(topology, sweep, z_ref)?;
    let sum: f64 = net
        .matrices()
        .iter()
        .map(|m| power_db(m.get(param).norm()))
        .sum();
    Ok(sum / net.sweep().len() as f64)
}

/// Ranks elements by how strongly their value moves the band-mean |param|.
///
/// Entries come back sorted by descending |sensitivity|. Non-tunable
/// elements (S-parameter blocks, degenerate bounds) are listed with
/// sensitivity 0 so the ranking covers the whole chain.
pub fn sensitivity_analysis(
    topology: &NetworkTopology,
    sweep: &FrequencySweep,
    z_ref: f64,
    goal_param: SParam,
    rel_step: f64,
) -> Result<Vec<SensitivityEntry>> {
    if !(rel_step > 0.0 && rel_step <= 0.5) {
        return Err(Error::domain(format!(
            "rel_step must be in (0, 0.5], got {rel_step}"
        )));
    }
    let mut entries = Vec::with_capacity(topology.elements.len());
    for (i, element) in topology.elements.iter().enumerate() {
        if !element.is_tunable() {
            entries.push(SensitivityEntry {
                element_index: i,
                label: element.label().to_string(),
                sensitivity: 0.0,
                clamped: false,
                tunable: false,
            });
            continue;
        }
        let value = element.value().expect("tunable implies passive");
        let (lo, hi) = element.bounds().expect("tunable implies passive");
        let up = (value * (1.0 + rel_step)).min(hi);
        let down = (value * (1.0 - rel_step)).max(lo);
        let clamped = up < value * (1.0 + rel_step) || down > value * (1.0 - rel_step);
        if up <= down {
            // Bounds so tight that both probes collapse; nothing to measure.
            entries.push(SensitivityEntry {
                element_index: i,
                label: element.label().to_string(),
                sensitivity: 0.0,
                clamped: true,
                tunable: true,
            });
            continue;
        }
        let mut up_topology = topology.clone();
        up_topology.elements[i] = element.with_value(up);
        let mut down_topology = topology.clone();
        down_topology.elements[i] = element.with_value(down);
        let f_up = band_mean_db(&up_topology, sweep, z_ref, goal_param)?;
        let f_down = band_mean_db(&down_topology, sweep, z_ref, goal_param)?;
        // Unclamped: ln((1+h)/(1-h)) ~= 2h; use the spec divisor there and
        // the exact log span when a bound truncated the probe.
        let divisor = if clamped {
            (up / down).ln()
        } else {
            2.0 * rel_step
        };
        entries.push(SensitivityEntry {
            element_index: i,
            label: element.label().to_string(),
            sensitivity: (f_up - f_down) / divisor,
            clamped,
            tunable: true,
        });
    }
    entries.sort_by(|a, b| {
        b.sensitivity
            .abs()
            .partial_cmp(&a.sensitivity.abs())
            .expect("sensitivities are finite")
    });
    Ok(entries)
}
