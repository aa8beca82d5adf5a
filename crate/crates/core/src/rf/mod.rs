//! Two-port RF network analysis: S-parameter algebra, Touchstone I/O,
//! lumped-element synthesis, stability screening, goal-driven optimization,
//! and tolerance sensitivity.

pub mod elements;
pub mod ga;
pub mod goals;
pub mod network;
pub mod sensitivity;
pub mod stability;
pub mod touchstone;

pub use elements::{evaluate_chain, synthesize_element, ElementKind, LumpedElement, NetworkTopology};
pub use ga::{optimize_ga, GaConfig, GaResult};
pub use goals::{evaluate_goals, Comparison, Goal, GoalSet, SParam};
pub use network::{FrequencySweep, SMatrix, TwoPortNetwork};
pub use sensitivity::{sensitivity_analysis, SensitivityEntry};
pub use stability::{stability_factors, StabilityRecord, StabilityReport};
pub use touchstone::{parse_touchstone, write_touchstone, TouchstoneFormat};

use crate::Result;

/// Bundled matching problem used by the optimizer tools and examples:
/// series L and shunt C driving a series 100 Ω resistor into the 50 Ω
/// port, i.e. a 150 Ω effective load, with the goal S11 ≤ −10 dB over
/// 0.95–1.05 GHz on a 0.5–1.5 GHz sweep. `l` and `c` set the starting
/// values of the two tunable elements.
pub fn sample_match_problem(l: f64, c: f64) -> Result<(NetworkTopology, GoalSet, FrequencySweep)> {
    let topology = NetworkTopology::new(vec![
        LumpedElement::passive(ElementKind::SeriesInductor, l, (1e-10, 1e-7), "L1")?,
        LumpedElement::passive(ElementKind::ShuntCapacitor, c, (1e-13, 1e-10), "C1")?,
        LumpedElement::fixed(ElementKind::SeriesResistor, 100.0, "Rload")?,
    ])?;
    let goals = GoalSet::new(vec![Goal {
        parameter: SParam::S11,
        comparison: Comparison::Below,
        threshold_db: -10.0,
        band: (0.95e9, 1.05e9),
    }])?;
    let sweep = FrequencySweep::linspace(0.5e9, 1.5e9, 21)?;
    Ok((topology, goals, sweep))
}

/// The exact-match (L, C) for [`sample_match_problem`] at 1 GHz. With
/// Q = √(150/50 − 1) = √2: L = √2·50/ω, C = √2/(150·ω); S11 vanishes at
/// band center and the goal cost is zero.
pub fn sample_match_solution() -> (f64, f64) {
    let w = 2.0 * std::f64::consts::PI * 1e9;
    (2f64.sqrt() * 50.0 / w, 2f64.sqrt() / (150.0 * w))
}
