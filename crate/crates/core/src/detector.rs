//! Detector front-end noise budgets.
//!
//! Covers the three desk calculations that size a balanced receiver before
//! any board is built: the shot-noise-limited SNR available at a photodiode
//! output, the noise figure of a two-stage amplifier cascade, and the SNR
//! left after that cascade.
//!
//! Two computation modes exist side by side. `Standard` converts dB
//! quantities to linear scale before combining them (textbook Friis).
//! `PaperLiteral` substitutes dB values directly into the cascade formula
//! and divides a dB-valued SNR by a linear noise factor; this reproduces a
//! published budget that mixed scales. Every report tags which mode
//! produced it, and the two are never blended within one calculation.

use serde::{Deserialize, Serialize};

use crate::db::{db_to_linear, linear_to_db};
use crate::{Error, Result};

/// Elementary charge in coulombs (exact, 2019 SI).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Boltzmann constant in J/K (exact, 2019 SI).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Photodiode datasheet record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhotodiodeSpec {
    pub label: String,
    /// Responsivity in A/W.
    pub responsivity: f64,
    /// Dark current in amperes.
    pub dark_current: f64,
    /// Shunt resistance in ohms.
    pub shunt_resistance: f64,
    /// Junction (total) capacitance in farads.
    pub junction_capacitance: f64,
    /// -3 dB bandwidth in Hz.
    pub bandwidth: f64,
}

impl PhotodiodeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.responsivity > 0.0 && self.responsivity.is_finite()) {
            return Err(Error::domain(format!(
                "photodiode {}: responsivity must be positive, got {}",
                self.label, self.responsivity
            )));
        }
        if !(self.dark_current >= 0.0 && self.dark_current.is_finite()) {
            return Err(Error::domain(format!(
                "photodiode {}: dark_current must be non-negative, got {}",
                self.label, self.dark_current
            )));
        }
        if !(self.shunt_resistance > 0.0) {
            return Err(Error::domain(format!(
                "photodiode {}: shunt_resistance must be positive, got {}",
                self.label, self.shunt_resistance
            )));
        }
        if !(self.junction_capacitance > 0.0) {
            return Err(Error::domain(format!(
                "photodiode {}: junction_capacitance must be positive, got {}",
                self.label, self.junction_capacitance
            )));
        }
        if !(self.bandwidth > 0.0) {
            return Err(Error::domain(format!(
                "photodiode {}: bandwidth must be positive, got {}",
                self.label, self.bandwidth
            )));
        }
        Ok(())
    }
}

/// One RF gain stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplifierStageSpec {
    pub label: String,
    pub gain_db: f64,
    pub noise_figure_db: f64,
    /// -3 dB bandwidth in Hz.
    pub bandwidth: f64,
}

impl AmplifierStageSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.gain_db.is_finite() {
            return Err(Error::domain(format!(
                "amplifier {}: gain_db must be finite, got {}",
                self.label, self.gain_db
            )));
        }
        if !(self.noise_figure_db > 0.0 && self.noise_figure_db.is_finite()) {
            return Err(Error::domain(format!(
                "amplifier {}: noise_figure_db must be positive, got {}",
                self.label, self.noise_figure_db
            )));
        }
        if !(self.bandwidth > 0.0) {
            return Err(Error::domain(format!(
                "amplifier {}: bandwidth must be positive, got {}",
                self.label, self.bandwidth
            )));
        }
        Ok(())
    }
}

/// Operating point for the optical front end.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Environment {
    /// Temperature in kelvin.
    pub temperature: f64,
    /// Optical power on the diode in watts.
    pub optical_power: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Environment { temperature: 300.0, optical_power: 1.0e-3 }
    }
}

/// Scale convention for cascade arithmetic; see module docs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    PaperLiteral,
    Standard,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::PaperLiteral => write!(f, "paper-literal"),
            Mode::Standard => write!(f, "standard"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-literal" | "paper_literal" => Ok(Mode::PaperLiteral),
            "standard" => Ok(Mode::Standard),
            other => Err(Error::config(format!(
                "unknown mode {other:?}, expected \"paper-literal\" or \"standard\""
            ))),
        }
    }
}

/// A single SNR or noise-figure result together with the convention that
/// produced it and an echo of the inputs, for report files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnrReport {
    pub value_db: f64,
    pub mode: Mode,
    pub inputs: String,
}

/// Shot-noise-limited SNR at a photodiode output, in dB.
///
/// Ratio of the shot-noise current PSD `2 e P S` to the thermal and dark
/// current PSDs `4 k T / R_sh + 2 e i_dark`. Mode-independent: all inputs
/// are linear physical quantities.
pub fn shot_noise_limited_snr(pd: &PhotodiodeSpec, env: &Environment) -> Result<f64> {
    pd.validate()?;
    if !(env.optical_power > 0.0) {
        return Err(Error::domain(format!(
            "optical_power must be positive, got {}",
            env.optical_power
        )));
    }
    if !(env.temperature > 0.0) {
        return Err(Error::domain(format!(
            "temperature must be positive, got {}",
            env.temperature
        )));
    }
    let signal = 2.0 * ELEMENTARY_CHARGE * env.optical_power * pd.responsivity;
    let thermal = 4.0 * BOLTZMANN * env.temperature / pd.shunt_resistance;
    let dark = 2.0 * ELEMENTARY_CHARGE * pd.dark_current;
    Ok(linear_to_db(signal / (thermal + dark)))
}

/// Output SNR over explicit signal and noise powers, in dB.
pub fn snr_from_powers(p_signal: f64, p_elec: f64) -> Result<f64> {
    if !(p_signal > 0.0) {
        return Err(Error::domain(format!("p_signal must be positive, got {p_signal}")));
    }
    if !(p_elec > 0.0) {
        return Err(Error::domain(format!("p_elec must be positive, got {p_elec}")));
    }
    Ok(linear_to_db(p_signal / p_elec))
}

/// Two-stage cascade noise figure in dB.
///
/// `Standard` computes Friis on linear noise factors and gains, then
/// converts back. `PaperLiteral` applies `NF1 + (NF2 - 1) / G1` to the dB
/// values themselves, which requires a nonzero first-stage dB gain.
pub fn cascade_noise_figure(
    stage1: &AmplifierStageSpec,
    stage2: &AmplifierStageSpec,
    mode: Mode,
) -> Result<f64> {
    stage1.validate()?;
    stage2.validate()?;
    match mode {
        Mode::PaperLiteral => {
            if stage1.gain_db == 0.0 {
                return Err(Error::domain(format!(
                    "amplifier {}: zero first-stage gain (dB) in paper-literal cascade",
                    stage1.label
                )));
            }
            Ok(stage1.noise_figure_db + (stage2.noise_figure_db - 1.0) / stage1.gain_db)
        }
        Mode::Standard => {
            let f1 = db_to_linear(stage1.noise_figure_db);
            let f2 = db_to_linear(stage2.noise_figure_db);
            let g1 = db_to_linear(stage1.gain_db);
            if g1 == 0.0 {
                return Err(Error::domain(format!(
                    "amplifier {}: zero first-stage linear gain in cascade",
                    stage1.label
                )));
            }
            Ok(linear_to_db(f1 + (f2 - 1.0) / g1))
        }
    }
}

/// SNR remaining after a cascade of the given noise figure.
///
/// `Standard` subtracts the noise figure from the input SNR (both dB).
/// `PaperLiteral` divides the dB-valued input SNR by the linear noise
/// factor `10^(nf/10)`.
pub fn detector_output_snr(input_snr_db: f64, nf_db: f64, mode: Mode) -> f64 {
    match mode {
        Mode::PaperLiteral => input_snr_db / db_to_linear(nf_db),
        Mode::Standard => input_snr_db - nf_db,
    }
}

/// Datasheet presets for the candidate parts, used by the reports and
/// examples so every tool quotes the same numbers.
pub mod catalog {
    use super::{AmplifierStageSpec, PhotodiodeSpec};

    pub fn lsipd_a75() -> PhotodiodeSpec {
        PhotodiodeSpec {
            label: "LSIPD-A75".into(),
            responsivity: 0.90,
            dark_current: 18e-12,
            shunt_resistance: 50e9,
            junction_capacitance: 1.0e-12,
            bandwidth: 2.5e9,
        }
    }

    pub fn lsipd_a40() -> PhotodiodeSpec {
        PhotodiodeSpec {
            label: "LSIPD-A40".into(),
            responsivity: 0.85,
            dark_current: 20e-12,
            shunt_resistance: 30e9,
            junction_capacitance: 0.4e-12,
            bandwidth: 6.0e9,
        }
    }

    pub fn lsipd_ld50() -> PhotodiodeSpec {
        PhotodiodeSpec {
            label: "LSIPD-LD50".into(),
            responsivity: 0.90,
            dark_current: 5e-12,
            shunt_resistance: 100e9,
            junction_capacitance: 0.8e-12,
            bandwidth: 3.0e9,
        }
    }

    pub fn photodiodes() -> Vec<PhotodiodeSpec> {
        vec![lsipd_ld50(), lsipd_a75(), lsipd_a40()]
    }

    pub fn bgm1013() -> AmplifierStageSpec {
        AmplifierStageSpec {
            label: "BGM1013".into(),
            gain_db: 35.5,
            noise_figure_db: 4.6,
            bandwidth: 3.0e9,
        }
    }

    pub fn bga2817() -> AmplifierStageSpec {
        AmplifierStageSpec {
            label: "BGA2817".into(),
            gain_db: 24.3,
            noise_figure_db: 3.9,
            bandwidth: 3.0e9,
        }
    }

    pub fn aba52563() -> AmplifierStageSpec {
        AmplifierStageSpec {
            label: "ABA-52563".into(),
            gain_db: 21.5,
            noise_figure_db: 3.3,
            bandwidth: 3.0e9,
        }
    }

    pub fn amplifiers() -> Vec<AmplifierStageSpec> {
        vec![bgm1013(), bga2817(), aba52563()]
    }
}
