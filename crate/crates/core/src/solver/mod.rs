//! Demand selection and allocation: the normalized-revenue greedy heuristic,
//! an exact branch-and-bound solver, and a plan validator.

mod exact;
mod greedy;
mod validate;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{demand_revenue, energy_cost, AllocationPlan, Demand, DemandKey, Device, ModelError};
use crate::scenario::ScenarioError;

pub use exact::{solve_exact, solve_exact_with, ExactLimits, ExactStrategy};
pub use greedy::{solve_greedy, solve_greedy_with, DeviceOrder, GreedyOptions};
pub use validate::{validate_plan, Violation};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("scenario has {actual} {what}, exact solver limit is {limit}")]
    LimitExceeded {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Greedy,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    /// A quality-feasible device exists but none had enough battery left.
    Battery,
    /// No device offers the type at the demanded quality.
    Quality,
    /// Feasible on its own but left out of the optimal selection.
    Dominated,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::Battery => "battery",
            RejectReason::Quality => "quality",
            RejectReason::Dominated => "dominated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub demand: DemandKey,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: Method,
    /// Proved optimal: set by the exact solver when it finishes within its budget.
    pub optimal: bool,
    pub selected_count: usize,
    pub plan: AllocationPlan,
    /// Sorted by demand key.
    pub rejected: Vec<Rejection>,
}

impl SolveReport {
    pub(crate) fn new(
        method: Method,
        optimal: bool,
        plan: AllocationPlan,
        mut rejected: Vec<Rejection>,
    ) -> Self {
        rejected.sort_by_key(|r| r.demand);
        Self {
            method,
            optimal,
            selected_count: plan.assignments.len(),
            plan,
            rejected,
        }
    }

    pub fn to_toml_string(&self) -> Result<String, toml::ser::Error> {
        toml::to_string(self)
    }

    /// Flat summary: one `revenue` row, one `residual` row per device, one
    /// `demand` row per scenario demand.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("record,id,value,detail\n");
        let _ = writeln!(out, "revenue,,{},", self.plan.revenue);
        for (dev, r) in &self.plan.residual_battery {
            let _ = writeln!(out, "residual,{dev},{r},");
        }
        let mut rows: Vec<(DemandKey, String)> = self
            .plan
            .assignments
            .iter()
            .map(|a| (a.demand, format!("selected,{}", a.device)))
            .chain(
                self.rejected
                    .iter()
                    .map(|r| (r.demand, format!("rejected,{}", r.reason.as_str()))),
            )
            .collect();
        rows.sort_by_key(|(k, _)| *k);
        for (k, status) in rows {
            let _ = writeln!(out, "demand,{k},{status}");
        }
        out
    }
}

/// Revenue per unit of energy for serving `demand` on `device`.
pub fn normalized_revenue(device: &Device, demand: &Demand) -> Result<f64, ModelError> {
    let revenue = demand_revenue(device, demand)?;
    let energy = energy_cost(device, demand)?;
    Ok(revenue / energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BuyerId, DataType, Quality};

    fn q(l: u32) -> Quality {
        Quality::new(l).unwrap()
    }

    fn demand(buyer: u32, duration: f64, interval: f64) -> Demand {
        Demand {
            buyer: BuyerId(buyer),
            data_type: DataType(0),
            duration,
            sampling_interval: interval,
            quality: q(10),
        }
    }

    #[test]
    fn normalized_revenue_examples() {
        let dev = Device::new("d", 100.0, 0.1).with_offer(DataType(0), q(80), 10.0, 0.5);
        let nr = normalized_revenue(&dev, &demand(1, 5.0, 1.0 / 6.0)).unwrap();
        assert!((nr - 300.0 / 18.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_revenue_independent_of_sample_count() {
        let dev = Device::new("d", 100.0, 0.2).with_offer(DataType(0), q(80), 7.0, 0.3);
        let a = normalized_revenue(&dev, &demand(1, 1.0, 0.5)).unwrap();
        let b = normalized_revenue(&dev, &demand(2, 40.0, 0.5)).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((a - 7.0 / 0.5).abs() < 1e-12);
    }

    #[test]
    fn normalized_revenue_scale_invariant() {
        let d = demand(1, 3.0, 0.25);
        let base = Device::new("d", 1.0, 0.2).with_offer(DataType(0), q(80), 7.0, 0.3);
        let scaled = Device::new("d", 1.0, 0.2 * 4.0).with_offer(DataType(0), q(80), 28.0, 1.2);
        let a = normalized_revenue(&base, &d).unwrap();
        let b = normalized_revenue(&scaled, &d).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
