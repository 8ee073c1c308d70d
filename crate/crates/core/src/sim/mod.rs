//! Monte-Carlo harness: random scenario generation, parameter sweeps through
//! the greedy solver, and end-to-end trade runs through the ledger.
//!
//! Iteration `k` of a run with base seed `s` draws from a ChaCha8 stream
//! seeded with `s` on stream `k`, so iterations are independent and a run is
//! reproducible regardless of how iterations are scheduled.

mod e2e;
mod generate;
mod stats;
mod sweep;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ledger::LedgerError;
use crate::model::ModelError;
use crate::solver::SolveError;

pub use e2e::{run_end_to_end, E2eOptions, TradeRecord, TradeTranscript};
pub use generate::{generate_scenario, iteration_rng, Sampler};
pub use stats::{linear_fit, mean, LinearFit};
pub use sweep::{
    sweep_battery, sweep_demands, sweep_device_split, BatterySplit, SweepPoint, SweepResult,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("{demands} demands requested but only {pairs} distinct buyer/type pairs exist")]
    TooManyDemands { demands: usize, pairs: usize },
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("device splits must share one total capacity: {0}")]
    UnequalSplits(String),
    #[error("could not draw a value above {bound} from N({mean}, {sd}) after {attempts} attempts")]
    Truncation {
        mean: f64,
        sd: f64,
        bound: f64,
        attempts: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

/// How the second parameter of the sampling-interval normal is read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalSpread {
    #[default]
    StdDev,
    Variance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub devices: usize,
    pub data_types: usize,
    pub buyers: usize,
    pub demands: usize,
    /// Battery per device, in energy units.
    pub battery: f64,
    pub price_mean: f64,
    pub price_sd: f64,
    /// Hours.
    pub duration_mean: f64,
    pub duration_sd: f64,
    pub min_duration: f64,
    /// Minutes.
    pub interval_mean: f64,
    pub interval_spread: f64,
    pub interval_spread_kind: IntervalSpread,
    pub min_interval: f64,
    /// Sensing energy per sample; type `j` uses entry `j % len`.
    pub sense_energy: Vec<f64>,
    /// Processing and transmission energy per sample.
    pub overhead_energy: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            devices: 5,
            data_types: 5,
            buyers: 10,
            demands: 50,
            battery: 2000.0,
            price_mean: 10.0,
            price_sd: 3.0,
            duration_mean: 5.0,
            duration_sd: 2.0,
            min_duration: 0.1,
            interval_mean: 10.0,
            interval_spread: 60.0,
            interval_spread_kind: IntervalSpread::StdDev,
            min_interval: 1.0,
            sense_energy: DEFAULT_SENSE_ENERGY.to_vec(),
            overhead_energy: DEFAULT_OVERHEAD_ENERGY,
            iterations: 1000,
            seed: 2021,
        }
    }
}

/// Per-type sensing energy, frozen from the calibration run.
pub const DEFAULT_SENSE_ENERGY: [f64; 5] = [10.0, 20.0, 30.0, 40.0, 50.0];
/// Per-sample processing and transmission energy, frozen from the
/// calibration run.
pub const DEFAULT_OVERHEAD_ENERGY: f64 = 25.0;

impl SimConfig {
    /// The evaluation defaults: 5 devices with 5 types, 10 buyers, 50 demands.
    pub fn table3() -> Self {
        Self::default()
    }

    /// Demand-count sweep setup: 10 data types requested by 50 buyers.
    pub fn demand_sweep() -> Self {
        Self {
            data_types: 10,
            buyers: 50,
            ..Self::default()
        }
    }

    /// Battery sweep setup: a single device.
    pub fn single_device() -> Self {
        Self {
            devices: 1,
            ..Self::default()
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self, SimError> {
        let cfg: Self = toml::from_str(s).map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn interval_sd(&self) -> f64 {
        match self.interval_spread_kind {
            IntervalSpread::StdDev => self.interval_spread,
            IntervalSpread::Variance => self.interval_spread.sqrt(),
        }
    }

    pub fn sense_energy_for(&self, data_type: usize) -> f64 {
        self.sense_energy[data_type % self.sense_energy.len()]
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidConfig(m.to_string()));
        if self.devices == 0 || self.data_types == 0 || self.buyers == 0 {
            return bad("devices, data_types and buyers must be positive");
        }
        if self.data_types > usize::from(u16::MAX) + 1 || self.buyers > u32::MAX as usize {
            return bad("too many data types or buyers");
        }
        if self.iterations == 0 {
            return bad("iterations must be positive");
        }
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !finite_nonneg(self.battery) {
            return bad("battery must be finite and non-negative");
        }
        for (name, v) in [
            ("price_sd", self.price_sd),
            ("duration_sd", self.duration_sd),
            ("interval_spread", self.interval_spread),
            ("overhead_energy", self.overhead_energy),
        ] {
            if !finite_nonneg(v) {
                return Err(SimError::InvalidConfig(format!("{name} must be finite and non-negative")));
            }
        }
        for v in [self.price_mean, self.duration_mean, self.interval_mean] {
            if !v.is_finite() {
                return bad("distribution means must be finite");
            }
        }
        if !(self.min_duration.is_finite() && self.min_duration > 0.0)
            || !(self.min_interval.is_finite() && self.min_interval > 0.0)
        {
            return bad("truncation bounds must be positive");
        }
        if self.sense_energy.is_empty() || !self.sense_energy.iter().all(|&e| finite_nonneg(e)) {
            return bad("sense_energy needs at least one finite non-negative entry");
        }
        if self
            .sense_energy
            .iter()
            .any(|&e| e + self.overhead_energy <= 0.0)
        {
            return bad("per-sample energy must be positive for every type");
        }
        let pairs = self.buyers.saturating_mul(self.data_types);
        if self.demands > pairs {
            return Err(SimError::TooManyDemands {
                demands: self.demands,
                pairs,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let t = SimConfig::table3();
        assert_eq!((t.devices, t.data_types, t.buyers, t.demands), (5, 5, 10, 50));
        assert_eq!((t.battery, t.iterations), (2000.0, 1000));
        let f = SimConfig::demand_sweep();
        assert_eq!((f.data_types, f.buyers), (10, 50));
        assert_eq!(SimConfig::single_device().devices, 1);
        for c in [t, f, SimConfig::single_device()] {
            c.validate().unwrap();
        }
    }

    #[test]
    fn variance_switch() {
        let mut c = SimConfig::default();
        assert_eq!(c.interval_sd(), 60.0);
        c.interval_spread_kind = IntervalSpread::Variance;
        assert!((c.interval_sd() - 60f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_impossible_configs() {
        let c = SimConfig {
            demands: 51,
            buyers: 10,
            data_types: 5,
            ..SimConfig::default()
        };
        assert!(matches!(c.validate(), Err(SimError::TooManyDemands { .. })));
        let c = SimConfig {
            sense_energy: vec![],
            ..SimConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn toml_round_trip() {
        let c = SimConfig::demand_sweep();
        let s = toml::to_string(&c).unwrap();
        assert_eq!(SimConfig::from_toml_str(&s).unwrap(), c);
        let partial = SimConfig::from_toml_str("devices = 1\nbattery = 500.0\n").unwrap();
        assert_eq!(partial.devices, 1);
        assert_eq!(partial.buyers, 10);
    }
}
