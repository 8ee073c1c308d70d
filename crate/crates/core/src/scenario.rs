//! Scenario container and its TOML file format.
//!
//! ```toml
//! seed = 7
//!
//! [[devices]]
//! id = "dev-1"
//! battery = 2000.0
//! overhead_energy = 0.1
//!
//! [[devices.offers]]
//! data_type = 0
//! quality_cap = 80
//! unit_price = 10.0
//! sense_energy = 0.5
//!
//! [[demands]]
//! buyer = 1
//! data_type = 0
//! duration = 5.0            # hours
//! sampling_interval = 0.25  # hours
//! quality = 50
//!
//! [quality_price_factors]   # optional f(q) multipliers, default 1
//! 90 = 1.2
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    sample_count, AllocationPlan, Assignment, Demand, DemandKey, Device, ModelError, Quality,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario has no devices")]
    NoDevices,
    #[error("duplicate device id {0}")]
    DuplicateDevice(String),
    #[error("duplicate demand for buyer {0}")]
    DuplicateDemand(DemandKey),
    #[error("quality factor for level {0} must be positive")]
    InvalidQualityFactor(Quality),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("scenario encode error: {0}")]
    Encode(#[from] toml::ser::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub devices: Vec<Device>,
    #[serde(default)]
    pub demands: Vec<Demand>,
    /// Optional price multiplier `f(q)` per demanded quality level.
    #[serde(
        default,
        skip_serializing_if = "BTreeMap::is_empty",
        with = "quality_factor_table"
    )]
    pub quality_price_factors: BTreeMap<Quality, f64>,
}

impl Scenario {
    pub fn new(devices: Vec<Device>, demands: Vec<Demand>) -> Self {
        Self {
            seed: None,
            devices,
            demands,
            quality_price_factors: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.devices.is_empty() {
            return Err(ScenarioError::NoDevices);
        }
        let mut ids = BTreeSet::new();
        for d in &self.devices {
            d.validate()?;
            if !ids.insert(d.id.as_str()) {
                return Err(ScenarioError::DuplicateDevice(d.id.0.clone()));
            }
        }
        let mut keys = BTreeSet::new();
        for d in &self.demands {
            d.validate()?;
            if !keys.insert(d.key()) {
                return Err(ScenarioError::DuplicateDemand(d.key()));
            }
        }
        for (q, f) in &self.quality_price_factors {
            if !(f.is_finite() && *f > 0.0) {
                return Err(ScenarioError::InvalidQualityFactor(*q));
            }
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario = toml::from_str(s)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml_string(&self) -> Result<String, ScenarioError> {
        Ok(toml::to_string(self)?)
    }

    pub fn quality_factor(&self, q: Quality) -> f64 {
        self.quality_price_factors.get(&q).copied().unwrap_or(1.0)
    }

    pub fn device_index(&self, id: &str) -> Option<usize> {
        self.devices.iter().position(|d| d.id.as_str() == id)
    }

    pub fn demand_index(&self, key: DemandKey) -> Option<usize> {
        self.demands.iter().position(|d| d.key() == key)
    }

    /// Builds a plan from `(device index, demand index)` pairs. Residuals are
    /// summed in demand-key order and revenue over the per-demand revenues in
    /// ascending order, so plans whose assignments earn the same amounts
    /// report bit-identical totals.
    pub fn plan_from_pairs(&self, pairs: &[(usize, usize)]) -> AllocationPlan {
        let mut sorted: Vec<(usize, usize)> = pairs.to_vec();
        sorted.sort_by_key(|&(_, d)| self.demands[d].key());
        let mut used = vec![0.0; self.devices.len()];
        let mut revenues = Vec::with_capacity(sorted.len());
        let mut assignments = Vec::with_capacity(sorted.len());
        for &(i, d) in &sorted {
            let (energy, rev) = self
                .option(i, d)
                .expect("plan pairs reference offered types");
            used[i] += energy;
            revenues.push(rev);
            assignments.push(Assignment {
                demand: self.demands[d].key(),
                device: self.devices[i].id.clone(),
            });
        }
        revenues.sort_by(f64::total_cmp);
        let revenue = revenues.iter().sum();
        let residual_battery = self
            .devices
            .iter()
            .zip(&used)
            .map(|(dev, u)| (dev.id.clone(), (dev.battery - u).max(0.0)))
            .collect();
        AllocationPlan {
            assignments,
            revenue,
            residual_battery,
        }
    }

    /// `(energy, revenue)` of serving demand `d` on device `i`, ignoring the
    /// quality cap. `None` when the device does not offer the type.
    pub(crate) fn option(&self, i: usize, d: usize) -> Option<(f64, f64)> {
        let device = &self.devices[i];
        let demand = &self.demands[d];
        let offer = device.offers.get(&demand.data_type)?;
        let n = sample_count(demand).ok()? as f64;
        let energy = n * (offer.sense_energy + device.overhead_energy);
        let revenue = n * (offer.unit_price * self.quality_factor(demand.quality));
        Some((energy, revenue))
    }
}

/// Precomputed quality-feasible `(energy, revenue)` for every device/demand
/// pair.
#[derive(Debug, Clone)]
pub(crate) struct Instance {
    pub batteries: Vec<f64>,
    /// `options[d][i]`, `None` when device `i` cannot serve demand `d` under
    /// the quality constraint.
    pub options: Vec<Vec<Option<(f64, f64)>>>,
}

impl Instance {
    pub fn new(s: &Scenario) -> Self {
        let options = s
            .demands
            .iter()
            .enumerate()
            .map(|(d, demand)| {
                s.devices
                    .iter()
                    .enumerate()
                    .map(|(i, dev)| {
                        if dev.can_serve_quality(demand) {
                            s.option(i, d)
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            batteries: s.devices.iter().map(|d| d.battery).collect(),
            options,
        }
    }

    pub fn num_devices(&self) -> usize {
        self.batteries.len()
    }

    pub fn quality_feasible(&self, d: usize) -> bool {
        self.options[d].iter().any(Option::is_some)
    }

    /// Whether some quality-feasible device could hold the demand on a full
    /// battery.
    pub fn battery_feasible(&self, d: usize) -> bool {
        self.options[d]
            .iter()
            .zip(&self.batteries)
            .any(|(o, b)| o.is_some_and(|(e, _)| e <= *b))
    }
}

mod quality_factor_table {
    use super::Quality;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(map: &BTreeMap<Quality, f64>, s: S) -> Result<S::Ok, S::Error> {
        let table: BTreeMap<String, f64> =
            map.iter().map(|(q, f)| (q.level().to_string(), *f)).collect();
        table.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Quality, f64>, D::Error> {
        let table = BTreeMap::<String, f64>::deserialize(d)?;
        table
            .into_iter()
            .map(|(k, f)| {
                let level: u32 = k.parse().map_err(serde::de::Error::custom)?;
                let q = Quality::new(level).map_err(serde::de::Error::custom)?;
                Ok((q, f))
            })
            .collect()
    }
}
