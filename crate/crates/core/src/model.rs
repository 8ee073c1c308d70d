//! Domain types shared by the solver, pricing, reputation, ledger and
//! simulator, plus the per-demand sample/energy/revenue arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("duration must be positive and finite, got {0}")]
    InvalidDuration(f64),
    #[error("sampling interval must be positive and finite, got {0}")]
    InvalidInterval(f64),
    #[error("quality level {0} is not on the ladder 10,20,...,100")]
    InvalidQuality(u32),
    #[error("device {device} does not offer data type {data_type}")]
    UnknownDataType { device: DeviceId, data_type: DataType },
    #[error("device {device}: {reason}")]
    InvalidDevice { device: DeviceId, reason: String },
}

/// Index of a data type within a scenario, dense in `[0, S)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DataType(pub u16);

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Buyer index `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BuyerId(pub u32);

impl fmt::Display for BuyerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeviceId(pub String);

impl DeviceId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DeviceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Marketplace participant (seller or buyer) as seen by the ledger and the
/// reputation store.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActorId(pub String);

impl ActorId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ActorId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// A level on the discrete quality ladder `{10, 20, ..., 100}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Quality(u8);

impl Quality {
    pub const MIN: Quality = Quality(10);
    pub const MAX: Quality = Quality(100);

    pub fn new(level: u32) -> Result<Self, ModelError> {
        if (10..=100).contains(&level) && level % 10 == 0 {
            Ok(Self(level as u8))
        } else {
            Err(ModelError::InvalidQuality(level))
        }
    }

    pub fn level(self) -> u32 {
        u32::from(self.0)
    }

    /// All ten ladder levels in ascending order.
    pub fn ladder() -> impl Iterator<Item = Quality> {
        (1..=10).map(|i| Quality(i * 10))
    }
}

impl TryFrom<u32> for Quality {
    type Error = ModelError;

    fn try_from(v: u32) -> Result<Self, Self::Error> {
        Quality::new(v)
    }
}

impl From<Quality> for u32 {
    fn from(q: Quality) -> u32 {
        q.level()
    }
}

impl fmt::Display for Quality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// What a device offers for one data type: quality cap `Q_ij`, unit price
/// `P_ij` and the sensing energy per sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Offer {
    pub quality_cap: Quality,
    pub unit_price: f64,
    pub sense_energy: f64,
}

/// A seller's battery-powered sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub id: DeviceId,
    /// Battery budget `B_i`, in energy units.
    pub battery: f64,
    /// Processing + transmission energy per sample, shared by all types.
    #[serde(default)]
    pub overhead_energy: f64,
    #[serde(with = "offer_list")]
    pub offers: BTreeMap<DataType, Offer>,
}

impl Device {
    pub fn new(id: impl Into<String>, battery: f64, overhead_energy: f64) -> Self {
        Self {
            id: DeviceId::new(id),
            battery,
            overhead_energy,
            offers: BTreeMap::new(),
        }
    }

    pub fn with_offer(
        mut self,
        data_type: DataType,
        quality_cap: Quality,
        unit_price: f64,
        sense_energy: f64,
    ) -> Self {
        self.offers.insert(
            data_type,
            Offer {
                quality_cap,
                unit_price,
                sense_energy,
            },
        );
        self
    }

    pub fn offer(&self, data_type: DataType) -> Result<&Offer, ModelError> {
        self.offers
            .get(&data_type)
            .ok_or_else(|| ModelError::UnknownDataType {
                device: self.id.clone(),
                data_type,
            })
    }

    /// Quality constraint: the device offers the type at a cap that covers
    /// the demanded quality.
    pub fn can_serve_quality(&self, demand: &Demand) -> bool {
        self.offers
            .get(&demand.data_type)
            .is_some_and(|o| demand.quality <= o.quality_cap)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |reason: String| ModelError::InvalidDevice {
            device: self.id.clone(),
            reason,
        };
        if !(self.battery.is_finite() && self.battery >= 0.0) {
            return Err(bad(format!("battery must be >= 0, got {}", self.battery)));
        }
        if !(self.overhead_energy.is_finite() && self.overhead_energy >= 0.0) {
            return Err(bad(format!(
                "overhead energy must be >= 0, got {}",
                self.overhead_energy
            )));
        }
        for (t, o) in &self.offers {
            if !(o.unit_price.is_finite() && o.unit_price > 0.0) {
                return Err(bad(format!("type {t}: unit price must be > 0")));
            }
            if !(o.sense_energy.is_finite() && o.sense_energy > 0.0) {
                return Err(bad(format!("type {t}: sense energy must be > 0")));
            }
        }
        Ok(())
    }
}

/// Identifies a demand by its (buyer, data type) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DemandKey {
    pub buyer: BuyerId,
    pub data_type: DataType,
}

impl fmt::Display for DemandKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.buyer, self.data_type)
    }
}

/// One buyer's request for one data type. Durations and intervals are in
/// hours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Demand {
    pub buyer: BuyerId,
    pub data_type: DataType,
    pub duration: f64,
    pub sampling_interval: f64,
    pub quality: Quality,
}

impl Demand {
    pub fn key(&self) -> DemandKey {
        DemandKey {
            buyer: self.buyer,
            data_type: self.data_type,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(ModelError::InvalidDuration(self.duration));
        }
        if !(self.sampling_interval.is_finite() && self.sampling_interval > 0.0) {
            return Err(ModelError::InvalidInterval(self.sampling_interval));
        }
        Ok(())
    }
}

/// Relative slack under which `duration / interval` is treated as an exact
/// integer before taking the ceiling.
const DIVISION_SLACK: f64 = 1e-9;

/// Number of samples needed to cover `duration` at `interval` spacing:
/// `ceil(duration / interval)`, at least 1.
pub fn samples_for(duration: f64, interval: f64) -> Result<u64, ModelError> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(ModelError::InvalidDuration(duration));
    }
    if !(interval.is_finite() && interval > 0.0) {
        return Err(ModelError::InvalidInterval(interval));
    }
    let ratio = duration / interval;
    let nearest = ratio.round();
    let n = if (ratio - nearest).abs() <= DIVISION_SLACK * ratio.max(1.0) {
        nearest
    } else {
        ratio.ceil()
    };
    Ok((n as u64).max(1))
}

/// `N_j^k`, the total number of samples a demand requires.
pub fn sample_count(demand: &Demand) -> Result<u64, ModelError> {
    samples_for(demand.duration, demand.sampling_interval)
}

/// `E_ij^k = N * (sense + overhead)`.
pub fn energy_cost(device: &Device, demand: &Demand) -> Result<f64, ModelError> {
    let offer = device.offer(demand.data_type)?;
    let n = sample_count(demand)? as f64;
    Ok(n * (offer.sense_energy + device.overhead_energy))
}

/// `N_j^k * P_ij`, with a quality-independent unit price.
pub fn demand_revenue(device: &Device, demand: &Demand) -> Result<f64, ModelError> {
    demand_revenue_scaled(device, demand, 1.0)
}

/// `N_j^k * P_ij * f(q^k)` for an externally supplied quality factor.
pub fn demand_revenue_scaled(
    device: &Device,
    demand: &Demand,
    quality_factor: f64,
) -> Result<f64, ModelError> {
    let offer = device.offer(demand.data_type)?;
    let n = sample_count(demand)? as f64;
    Ok(n * (offer.unit_price * quality_factor))
}

/// A single `x_ij^k = 1` entry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    pub demand: DemandKey,
    pub device: DeviceId,
}

/// The selected assignment plus the revenue it earns and the battery left
/// on every device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationPlan {
    /// Sorted by demand key.
    pub assignments: Vec<Assignment>,
    pub revenue: f64,
    pub residual_battery: BTreeMap<DeviceId, f64>,
}

impl AllocationPlan {
    pub fn device_for(&self, demand: DemandKey) -> Option<&DeviceId> {
        self.assignments
            .iter()
            .find(|a| a.demand == demand)
            .map(|a| &a.device)
    }
}

/// Serializes the offer map as a list of `{ data_type, ... }` tables, which
/// reads better in scenario files than a map keyed by stringified integers.
mod offer_list {
    use super::{DataType, Offer, Quality};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    #[derive(Serialize, Deserialize)]
    struct Entry {
        data_type: DataType,
        quality_cap: Quality,
        unit_price: f64,
        sense_energy: f64,
    }

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<DataType, Offer>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = map
            .iter()
            .map(|(t, o)| Entry {
                data_type: *t,
                quality_cap: o.quality_cap,
                unit_price: o.unit_price,
                sense_energy: o.sense_energy,
            })
            .collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<DataType, Offer>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        let mut map = BTreeMap::new();
        for e in entries {
            let prev = map.insert(
                e.data_type,
                Offer {
                    quality_cap: e.quality_cap,
                    unit_price: e.unit_price,
                    sense_energy: e.sense_energy,
                },
            );
            if prev.is_some() {
                return Err(serde::de::Error::custom(format!(
                    "data type {} offered twice",
                    e.data_type
                )));
            }
        }
        Ok(map)
    }
}
