//! Decibel conversions shared across the crate.
//!
//! Power quantities use `10 log10`; amplitude quantities (S-parameters,
//! voltage ratios) use `20 log10` via [`power_db`] on the squared magnitude
//! or [`linear_to_db`] on a power ratio.

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB. Zero maps to `-inf`.
pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Amplitude magnitude to dB (`20 log10 |x|`).
pub fn power_db(amplitude: f64) -> f64 {
    20.0 * amplitude.log10()
}

/// Rounds a dB value to two decimals, ties to even. Presentation only;
/// comparisons and arithmetic always use the unrounded value.
pub fn round_db(db: f64) -> f64 {
    (db * 100.0).round_ties_even() / 100.0
}
