//! Optimization goals over S-parameter magnitudes in dB.

use serde::{Deserialize, Serialize};

use crate::db::power_db;
use crate::rf::network::{FrequencySweep, TwoPortNetwork};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SParam {
    S11,
    S12,
    S21,
    S22,
}

impl std::str::FromStr for SParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S11" => Ok(SParam::S11),
            "S12" => Ok(SParam::S12),
            "S21" => Ok(SParam::S21),
            "S22" => Ok(SParam::S22),
            other => Err(Error::config(format!("unknown S-parameter {other:?}"))),
        }
    }
}

impl std::fmt::Display for SParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SParam::S11 => "S11",
            SParam::S12 => "S12",
            SParam::S21 => "S21",
            SParam::S22 => "S22",
        };
        write!(f, "{s}")
    }
}

/// Which side of the threshold is compliant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Below,
    Above,
}

/// One band-limited magnitude constraint, e.g. "S11 below -10 dB in
/// 0.8..1.2 GHz".
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Goal {
    pub parameter: SParam,
    pub comparison: Comparison,
    pub threshold_db: f64,
    /// Inclusive band edges in Hz.
    pub band: (f64, f64),
}

impl Goal {
    pub fn validate(&self) -> Result<()> {
        if !self.threshold_db.is_finite() {
            return Err(Error::domain("goal threshold must be finite"));
        }
        if !(self.band.0 > 0.0 && self.band.1 >= self.band.0) {
            return Err(Error::domain(format!(
                "goal band ({}, {}) must be positive and ordered",
                self.band.0, self.band.1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoalSet {
    pub goals: Vec<Goal>,
}

impl GoalSet {
    pub fn new(goals: Vec<Goal>) -> Result<Self> {
        if goals.is_empty() {
            return Err(Error::domain("goal set must contain at least one goal"));
        }
        for g in &goals {
            g.validate()?;
        }
        Ok(GoalSet { goals })
    }

    /// Checks that every goal band lies within the sweep span, so that each
    /// goal actually constrains at least the surrounding grid.
    pub fn validate_against(&self, sweep: &FrequencySweep) -> Result<()> {
        let lo = sweep.points()[0];
        let hi = sweep.points()[sweep.len() - 1];
        for g in &self.goals {
            if g.band.0 < lo || g.band.1 > hi {
                return Err(Error::domain(format!(
                    "goal band ({}, {}) outside sweep span [{lo}, {hi}]",
                    g.band.0, g.band.1
                )));
            }
        }
        Ok(())
    }
}

/// Scalar cost of a network against a goal set: sum over goals and in-band
/// sweep points of squared dB violation. Zero iff every goal is met at
/// every in-band point. Monotone: tightening any threshold cannot lower
/// the cost.
pub fn evaluate_goals(network: &TwoPortNetwork, goals: &GoalSet) -> f64 {
    let mut cost = 0.0;
    for goal in &goals.goals {
        for (i, &f) in network.sweep().points().iter().enumerate() {
            if f < goal.band.0 || f > goal.band.1 {
                continue;
            }
            let mag_db = power_db(network.at(i).get(goal.parameter).norm());
            let violation = match goal.comparison {
                Comparison::Below => (mag_db - goal.threshold_db).max(0.0),
                Comparison::Above => (goal.threshold_db - mag_db).max(0.0),
            };
            cost += violation * violation;
        }
    }
    cost
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rf::network::SMatrix;
    use num_complex::Complex64;

    fn flat_net(s11_mag: f64, s21_mag: f64) -> TwoPortNetwork {
        let sweep = FrequencySweep::linspace(1e9, 2e9, 5).unwrap();
        let m = SMatrix {
            s11: Complex64::new(s11_mag, 0.0),
            s12: Complex64::new(s21_mag, 0.0),
            s21: Complex64::new(s21_mag, 0.0),
            s22: Complex64::new(s11_mag, 0.0),
        };
        TwoPortNetwork::new(sweep, vec![m; 5], 50.0).unwrap()
    }

    fn return_loss_goal(threshold_db: f64) -> GoalSet {
        GoalSet::new(vec![Goal {
            parameter: SParam::S11,
            comparison: Comparison::Below,
            threshold_db,
            band: (1e9, 2e9),
        }])
        .unwrap()
    }

    #[test]
    fn compliant_network_costs_zero() {
        // |S11| = 0.1 -> -20 dB, below -10 dB everywhere.
        let net = flat_net(0.1, 0.9);
        assert_eq!(evaluate_goals(&net, &return_loss_goal(-10.0)), 0.0);
    }

    #[test]
    fn violation_grows_quadratically() {
        // |S11| = 0.5 -> -6.02 dB, violates -10 dB by 3.98 dB at 5 points.
        let net = flat_net(0.5, 0.8);
        let v = power_db(0.5) + 10.0;
        let expected = 5.0 * v * v;
        let cost = evaluate_goals(&net, &return_loss_goal(-10.0));
        assert!((cost - expected).abs() < 1e-9, "got {cost}, expected {expected}");
    }

    #[test]
    fn tightening_threshold_never_lowers_cost() {
        let net = flat_net(0.3, 0.9);
        let mut prev = evaluate_goals(&net, &return_loss_goal(-2.0));
        for t in [-6.0, -10.0, -14.0, -18.0] {
            let cost = evaluate_goals(&net, &return_loss_goal(t));
            assert!(cost >= prev);
            prev = cost;
        }
    }

    #[test]
    fn above_goal_rewards_gain() {
        let goals = GoalSet::new(vec![Goal {
            parameter: SParam::S21,
            comparison: Comparison::Above,
            threshold_db: -1.0,
            band: (1e9, 2e9),
        }])
        .unwrap();
        assert_eq!(evaluate_goals(&flat_net(0.05, 0.99), &goals), 0.0);
        assert!(evaluate_goals(&flat_net(0.05, 0.5), &goals) > 0.0);
    }

    #[test]
    fn out_of_band_points_do_not_count() {
        let goals = GoalSet::new(vec![Goal {
            parameter: SParam::S11,
            comparison: Comparison::Below,
            threshold_db: -40.0,
            band: (1.2e9, 1.3e9), // covers only the 1.25e9 grid point
        }])
        .unwrap();
        let net = flat_net(0.5, 0.8);
        let v = power_db(0.5) + 40.0;
        let cost = evaluate_goals(&net, &goals);
        assert!((cost - v * v).abs() < 1e-9);
    }

    #[test]
    fn band_outside_sweep_rejected() {
        let sweep = FrequencySweep::linspace(1e9, 2e9, 5).unwrap();
        let goals = return_loss_goal(-10.0);
        assert!(goals.validate_against(&sweep).is_ok());
        let narrow = FrequencySweep::linspace(1.1e9, 1.9e9, 5).unwrap();
        assert!(goals.validate_against(&narrow).is_err());
    }
}
