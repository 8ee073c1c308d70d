//! Energy-aware demand selection and allocation for real-time IoT data
//! trading, together with the marketplace pieces around it: competition-based
//! pricing, attack-resistant reputation, an in-process subscription ledger
//! and a Monte-Carlo simulation harness.

pub mod ledger;
pub mod manifest;
pub mod model;
pub mod pricing;
pub mod reputation;
pub mod scenario;
pub mod sim;
pub mod solver;

pub use model::{
    demand_revenue, energy_cost, sample_count, ActorId, AllocationPlan, Assignment, BuyerId,
    DataType, Demand, DemandKey, Device, DeviceId, ModelError, Offer, Quality,
};
pub use scenario::{Scenario, ScenarioError};
