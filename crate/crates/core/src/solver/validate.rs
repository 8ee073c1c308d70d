use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{AllocationPlan, DemandKey, DeviceId, Quality};
use crate::scenario::Scenario;

/// Relative tolerance on the battery constraint, absorbing summation-order
/// rounding between the solver's running residual and the canonical sum.
const BATTERY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UnknownDevice { device: DeviceId },
    UnknownDemand { demand: DemandKey },
    /// Eq. 2: a demand served by more than one device.
    MultipleDevices { demand: DemandKey, devices: Vec<DeviceId> },
    /// Eq. 1: assigned energy above the device battery.
    BatteryExceeded { device: DeviceId, used: f64, battery: f64 },
    /// Eq. 3: demanded quality above the device cap, or type not offered.
    QualityExceeded {
        device: DeviceId,
        demand: DemandKey,
        required: Quality,
        cap: Option<Quality>,
    },
    RevenueMismatch { reported: f64, recomputed: f64 },
    ResidualMismatch { device: DeviceId, reported: Option<f64>, recomputed: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownDevice { device } => write!(f, "unknown device {device}"),
            Violation::UnknownDemand { demand } => write!(f, "unknown demand {demand}"),
            Violation::MultipleDevices { demand, devices } => {
                write!(f, "demand {demand} assigned to {} devices", devices.len())
            }
            Violation::BatteryExceeded { device, used, battery } => {
                write!(f, "device {device} uses {used} of battery {battery}")
            }
            Violation::QualityExceeded { device, demand, required, cap } => match cap {
                Some(cap) => write!(f, "demand {demand} needs quality {required}, {device} caps at {cap}"),
                None => write!(f, "device {device} does not offer the type of {demand}"),
            },
            Violation::RevenueMismatch { reported, recomputed } => {
                write!(f, "revenue {reported} does not match recomputed {recomputed}")
            }
            Violation::ResidualMismatch { device, reported, recomputed } => {
                write!(f, "residual of {device} is {reported:?}, recomputed {recomputed}")
            }
        }
    }
}

/// Checks a plan against the battery, allocation and quality constraints and
/// recomputes its revenue and residuals from the scenario.
pub fn validate_plan(scenario: &Scenario, plan: &AllocationPlan) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    let mut by_demand: BTreeMap<DemandKey, Vec<DeviceId>> = BTreeMap::new();
    let mut pairs = Vec::new();
    let mut structurally_sound = true;

    for a in &plan.assignments {
        by_demand.entry(a.demand).or_default().push(a.device.clone());
        let device = scenario.device_index(a.device.as_str());
        let demand = scenario.demand_index(a.demand);
        if device.is_none() {
            violations.push(Violation::UnknownDevice {
                device: a.device.clone(),
            });
        }
        if demand.is_none() {
            violations.push(Violation::UnknownDemand { demand: a.demand });
        }
        let (Some(i), Some(d)) = (device, demand) else {
            structurally_sound = false;
            continue;
        };
        let dev = &scenario.devices[i];
        let dem = &scenario.demands[d];
        let cap = dev.offers.get(&dem.data_type).map(|o| o.quality_cap);
        if cap.is_none_or(|c| dem.quality > c) {
            violations.push(Violation::QualityExceeded {
                device: dev.id.clone(),
                demand: a.demand,
                required: dem.quality,
                cap,
            });
            if cap.is_none() {
                structurally_sound = false;
                continue;
            }
        }
        pairs.push((i, d));
    }

    for (demand, devices) in by_demand {
        if devices.len() > 1 {
            violations.push(Violation::MultipleDevices { demand, devices });
        }
    }

    let mut used = vec![0.0; scenario.devices.len()];
    for &(i, d) in &pairs {
        used[i] += scenario.option(i, d).map_or(0.0, |(e, _)| e);
    }
    for (dev, u) in scenario.devices.iter().zip(&used) {
        if *u > dev.battery + BATTERY_TOLERANCE * dev.battery.max(1.0) {
            violations.push(Violation::BatteryExceeded {
                device: dev.id.clone(),
                used: *u,
                battery: dev.battery,
            });
        }
    }

    if structurally_sound {
        let expected = scenario.plan_from_pairs(&pairs);
        if expected.revenue != plan.revenue {
            violations.push(Violation::RevenueMismatch {
                reported: plan.revenue,
                recomputed: expected.revenue,
            });
        }
        for (device, recomputed) in &expected.residual_battery {
            let reported = plan.residual_battery.get(device).copied();
            if reported != Some(*recomputed) {
                violations.push(Violation::ResidualMismatch {
                    device: device.clone(),
                    reported,
                    recomputed: *recomputed,
                });
            }
        }
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}
