use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Method, RejectReason, Rejection, SolveError, SolveReport};
use crate::model::DemandKey;
use crate::scenario::{Instance, Scenario};

/// How the device scan order is maintained while demands are placed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceOrder {
    /// Sort once, ascending by initial battery.
    #[default]
    InitialBattery,
    /// Re-sort ascending by residual battery before every demand.
    ResidualBattery,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GreedyOptions {
    pub device_order: DeviceOrder,
}

pub fn solve_greedy(scenario: &Scenario) -> Result<SolveReport, SolveError> {
    solve_greedy_with(scenario, &GreedyOptions::default())
}

pub fn solve_greedy_with(
    scenario: &Scenario,
    options: &GreedyOptions,
) -> Result<SolveReport, SolveError> {
    scenario.validate()?;
    let inst = Instance::new(scenario);
    let keys: Vec<DemandKey> = scenario.demands.iter().map(|d| d.key()).collect();
    let (pairs, rejected) = run(&inst, &keys, options.device_order);
    let plan = scenario.plan_from_pairs(&pairs);
    let rejected = rejected
        .into_iter()
        .map(|(d, reason)| Rejection {
            demand: keys[d],
            reason,
        })
        .collect();
    Ok(SolveReport::new(Method::Greedy, false, plan, rejected))
}

struct SortKey {
    nr: f64,
    revenue: f64,
    key: DemandKey,
    index: usize,
}

/// Best normalized revenue over quality-feasible devices, with the revenue
/// earned on that device. Equal ratios keep the larger revenue.
fn best_ratio(options: &[Option<(f64, f64)>]) -> Option<(f64, f64)> {
    options.iter().flatten().fold(None, |best, &(e, r)| {
        let nr = r / e;
        match best {
            Some((bnr, brev)) if nr < bnr || (nr == bnr && r <= brev) => best,
            _ => Some((nr, r)),
        }
    })
}

/// Core greedy pass. Returns `(device, demand)` pairs in placement order and
/// the rejected demand indices.
pub(super) fn run(
    inst: &Instance,
    keys: &[DemandKey],
    device_order: DeviceOrder,
) -> (Vec<(usize, usize)>, Vec<(usize, RejectReason)>) {
    let mut order: Vec<SortKey> = inst
        .options
        .iter()
        .enumerate()
        .map(|(index, opts)| {
            let (nr, revenue) = best_ratio(opts).unwrap_or((f64::NEG_INFINITY, 0.0));
            SortKey {
                nr,
                revenue,
                key: keys[index],
                index,
            }
        })
        .collect();
    order.sort_by(|a, b| {
        b.nr
            .total_cmp(&a.nr)
            .then_with(|| b.revenue.total_cmp(&a.revenue))
            .then_with(|| a.key.cmp(&b.key))
    });

    let mut residual = inst.batteries.clone();
    let mut devices: Vec<usize> = (0..inst.num_devices()).collect();
    let by_residual = |residual: &[f64], a: &usize, b: &usize| -> Ordering {
        residual[*a].total_cmp(&residual[*b]).then(a.cmp(b))
    };
    devices.sort_by(|a, b| by_residual(&residual, a, b));

    let mut pairs = Vec::new();
    let mut rejected = Vec::new();
    for SortKey { index: d, .. } in order {
        if device_order == DeviceOrder::ResidualBattery {
            devices.sort_by(|a, b| by_residual(&residual, a, b));
        }
        let placed = devices.iter().copied().find(|&i| {
            inst.options[d][i].is_some_and(|(energy, _)| residual[i] >= energy)
        });
        match placed {
            Some(i) => {
                residual[i] -= inst.options[d][i].map_or(0.0, |(e, _)| e);
                pairs.push((i, d));
            }
            None => {
                let reason = if inst.quality_feasible(d) {
                    RejectReason::Battery
                } else {
                    RejectReason::Quality
                };
                rejected.push((d, reason));
            }
        }
    }
    (pairs, rejected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BuyerId, DataType, Demand, Device, Quality};
    use crate::solver::validate_plan;

    fn q(l: u32) -> Quality {
        Quality::new(l).unwrap()
    }

    fn demand(buyer: u32, t: u16, n: u32, quality: u32) -> Demand {
        Demand {
            buyer: BuyerId(buyer),
            data_type: DataType(t),
            duration: f64::from(n),
            sampling_interval: 1.0,
            quality: q(quality),
        }
    }

    #[test]
    fn empty_demands() {
        let s = Scenario::new(vec![Device::new("a", 42.0, 0.0)], vec![]);
        let r = solve_greedy(&s).unwrap();
        assert_eq!(r.plan.revenue, 0.0);
        assert!(r.plan.assignments.is_empty());
        assert_eq!(r.plan.residual_battery.values().copied().collect::<Vec<_>>(), vec![42.0]);
    }

    #[test]
    fn single_device_prefers_higher_ratio() {
        // A: 6 samples at price 2, energy 1 per sample -> revenue 12, energy 6, NR 2.
        // B: 5 samples at price 1, energy 1 per sample -> revenue 5, energy 5, NR 1.
        let dev = Device::new("d", 10.0, 0.0)
            .with_offer(DataType(0), q(100), 2.0, 1.0)
            .with_offer(DataType(1), q(100), 1.0, 1.0);
        let s = Scenario::new(vec![dev], vec![demand(1, 0, 6, 50), demand(2, 1, 5, 50)]);
        let r = solve_greedy(&s).unwrap();
        assert_eq!(r.plan.revenue, 12.0);
        assert_eq!(r.selected_count, 1);
        assert_eq!(r.plan.assignments[0].demand.buyer, BuyerId(1));
        assert_eq!(r.rejected.len(), 1);
        assert_eq!(r.rejected[0].reason, RejectReason::Battery);
        assert_eq!(r.plan.residual_battery[&crate::model::DeviceId::new("d")], 4.0);
    }

    #[test]
    fn equal_ratio_breaks_on_revenue_then_key() {
        // Same ratio for all; B earns more so goes first and fills the battery.
        let dev = Device::new("d", 10.0, 0.0).with_offer(DataType(0), q(100), 1.0, 1.0);
        let s = Scenario::new(
            vec![dev],
            vec![demand(1, 0, 4, 10), demand(2, 0, 10, 10), demand(3, 0, 4, 10)],
        );
        let r = solve_greedy(&s).unwrap();
        assert_eq!(r.plan.assignments.len(), 1);
        assert_eq!(r.plan.assignments[0].demand.buyer, BuyerId(2));

        let dev = Device::new("d", 4.0, 0.0).with_offer(DataType(0), q(100), 1.0, 1.0);
        let s = Scenario::new(vec![dev], vec![demand(3, 0, 4, 10), demand(1, 0, 4, 10)]);
        let r = solve_greedy(&s).unwrap();
        assert_eq!(r.plan.assignments[0].demand.buyer, BuyerId(1));
    }

    #[test]
    fn quality_rejection_reason() {
        let dev = Device::new("d", 100.0, 0.0).with_offer(DataType(0), q(40), 1.0, 1.0);
        let s = Scenario::new(vec![dev], vec![demand(1, 0, 2, 50), demand(2, 1, 2, 10)]);
        let r = solve_greedy(&s).unwrap();
        assert_eq!(r.selected_count, 0);
        assert!(r.rejected.iter().all(|x| x.reason == RejectReason::Quality));
    }

    #[test]
    fn scans_devices_smallest_battery_first() {
        let small = Device::new("small", 5.0, 0.0).with_offer(DataType(0), q(100), 1.0, 1.0);
        let big = Device::new("big", 50.0, 0.0).with_offer(DataType(0), q(100), 1.0, 1.0);
        let s = Scenario::new(vec![big, small], vec![demand(1, 0, 3, 10), demand(2, 0, 3, 10)]);
        let r = solve_greedy(&s).unwrap();
        assert_eq!(r.plan.assignments[0].device.as_str(), "small");
        // small has 2 left, so the second demand lands on big.
        assert_eq!(r.plan.assignments[1].device.as_str(), "big");
        validate_plan(&s, &r.plan).unwrap();
    }

    #[test]
    fn residual_ordering_flag_changes_scan() {
        // The first demand (11) only fits on b, leaving b with 1 while a keeps
        // 10. The literal scan still visits a first; re-sorting visits b.
        let a = Device::new("a", 10.0, 0.0).with_offer(DataType(0), q(100), 1.0, 1.0);
        let b = Device::new("b", 12.0, 0.0).with_offer(DataType(0), q(100), 1.0, 1.0);
        let s = Scenario::new(vec![a, b], vec![demand(1, 0, 11, 10), demand(2, 0, 1, 10)]);
        let literal = solve_greedy(&s).unwrap();
        let resort = solve_greedy_with(
            &s,
            &GreedyOptions {
                device_order: DeviceOrder::ResidualBattery,
            },
        )
        .unwrap();
        let second = crate::model::DemandKey {
            buyer: BuyerId(2),
            data_type: DataType(0),
        };
        assert_eq!(literal.plan.device_for(second).unwrap().as_str(), "a");
        assert_eq!(resort.plan.device_for(second).unwrap().as_str(), "b");
        assert_eq!(literal.plan.revenue, resort.plan.revenue);
        validate_plan(&s, &resort.plan).unwrap();
    }
}
