use std::time::{Duration, Instant};

use super::{greedy, Method, RejectReason, Rejection, SolveError, SolveReport};
use crate::model::DemandKey;
use crate::scenario::{Instance, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_demands: usize,
    pub max_devices: usize,
    pub timeout: Duration,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self {
            max_demands: 20,
            max_devices: 5,
            timeout: Duration::from_secs(10),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ExactStrategy {
    /// Enumerate small instances, branch-and-bound the rest.
    #[default]
    Auto,
    BranchAndBound,
    Enumerate,
}

/// Small instances are enumerated outright when they have fewer than this
/// many candidate demands...
const ENUMERATE_BELOW_DEMANDS: usize = 12;
/// ...and at most this many assignment vectors.
const ENUMERATION_BUDGET: f64 = (1u64 << 20) as f64;
/// Relative slack under which a bound is not considered an improvement.
const PRUNE_SLACK: f64 = 1e-12;
const CLOCK_CHECK_EVERY: u64 = 1024;

pub fn solve_exact(scenario: &Scenario, limits: &ExactLimits) -> Result<SolveReport, SolveError> {
    solve_exact_with(scenario, limits, ExactStrategy::Auto)
}

pub fn solve_exact_with(
    scenario: &Scenario,
    limits: &ExactLimits,
    strategy: ExactStrategy,
) -> Result<SolveReport, SolveError> {
    scenario.validate()?;
    if scenario.demands.len() > limits.max_demands {
        return Err(SolveError::LimitExceeded {
            what: "demands",
            actual: scenario.demands.len(),
            limit: limits.max_demands,
        });
    }
    if scenario.devices.len() > limits.max_devices {
        return Err(SolveError::LimitExceeded {
            what: "devices",
            actual: scenario.devices.len(),
            limit: limits.max_devices,
        });
    }

    let inst = Instance::new(scenario);
    let keys: Vec<DemandKey> = scenario.demands.iter().map(|d| d.key()).collect();
    let mut search = Search::new(&inst, &keys, Instant::now() + limits.timeout);

    let use_bound = match strategy {
        ExactStrategy::BranchAndBound => true,
        ExactStrategy::Enumerate => false,
        ExactStrategy::Auto => {
            let vectors: f64 = search.opts.iter().map(|o| (o.len() + 1) as f64).product();
            !(search.items.len() < ENUMERATE_BELOW_DEMANDS && vectors <= ENUMERATION_BUDGET)
        }
    };
    if use_bound {
        search.seed_with_greedy(&keys);
    }
    search.dfs(0, 0.0, use_bound);

    let pairs: Vec<(usize, usize)> = search
        .best_choice
        .iter()
        .enumerate()
        .filter_map(|(k, c)| c.map(|i| (i, search.items[k])))
        .collect();
    let plan = scenario.plan_from_pairs(&pairs);
    let mut selected = vec![false; keys.len()];
    for &(_, d) in &pairs {
        selected[d] = true;
    }
    let rejected = (0..keys.len())
        .filter(|&d| !selected[d])
        .map(|d| Rejection {
            demand: keys[d],
            reason: if !inst.quality_feasible(d) {
                RejectReason::Quality
            } else if !inst.battery_feasible(d) {
                RejectReason::Battery
            } else {
                RejectReason::Dominated
            },
        })
        .collect();
    Ok(SolveReport::new(Method::Exact, !search.timed_out, plan, rejected))
}

struct Search<'a> {
    inst: &'a Instance,
    /// Candidate demand indices, best static ratio first.
    items: Vec<usize>,
    /// Per item: `(device, energy, revenue)`, highest revenue first.
    opts: Vec<Vec<(usize, f64, f64)>>,
    residual: Vec<f64>,
    choice: Vec<Option<usize>>,
    best_revenue: f64,
    best_choice: Vec<Option<usize>>,
    deadline: Instant,
    nodes: u64,
    timed_out: bool,
    scratch: Vec<(f64, f64)>,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, keys: &[DemandKey], deadline: Instant) -> Self {
        let mut items: Vec<(usize, f64)> = (0..inst.options.len())
            .filter(|&d| inst.battery_feasible(d))
            .map(|d| {
                let ratio = inst.options[d]
                    .iter()
                    .flatten()
                    .map(|&(e, r)| r / e)
                    .fold(f64::NEG_INFINITY, f64::max);
                (d, ratio)
            })
            .collect();
        items.sort_by(|a, b| b.1.total_cmp(&a.1).then(keys[a.0].cmp(&keys[b.0])));
        let items: Vec<usize> = items.into_iter().map(|(d, _)| d).collect();
        let opts = items
            .iter()
            .map(|&d| {
                let mut o: Vec<(usize, f64, f64)> = inst.options[d]
                    .iter()
                    .enumerate()
                    .filter_map(|(i, o)| o.map(|(e, r)| (i, e, r)))
                    .filter(|&(i, e, _)| e <= inst.batteries[i])
                    .collect();
                o.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
                o
            })
            .collect();
        let n = items.len();
        Self {
            inst,
            items,
            opts,
            residual: inst.batteries.clone(),
            choice: vec![None; n],
            best_revenue: 0.0,
            best_choice: vec![None; n],
            deadline,
            nodes: 0,
            timed_out: false,
            scratch: Vec::with_capacity(n),
        }
    }

    /// Starts branch-and-bound from the greedy plan, which is always feasible.
    fn seed_with_greedy(&mut self, keys: &[DemandKey]) {
        let (pairs, _) = greedy::run(self.inst, keys, greedy::DeviceOrder::InitialBattery);
        let mut choice = vec![None; self.items.len()];
        let mut revenue = 0.0;
        for (i, d) in pairs {
            if let Some(k) = self.items.iter().position(|&x| x == d) {
                choice[k] = Some(i);
                revenue += self.inst.options[d][i].map_or(0.0, |(_, r)| r);
            }
        }
        if revenue > self.best_revenue {
            self.best_revenue = revenue;
            self.best_choice = choice;
        }
    }

    /// Fractional upper bound on the revenue obtainable from items `k..`:
    /// pool the residual batteries and fill by best per-item ratio, capping
    /// each item at its best single-device revenue.
    fn bound(&mut self, k: usize) -> f64 {
        let mut capacity: f64 = self.residual.iter().sum();
        self.scratch.clear();
        for opts in &self.opts[k..] {
            let mut ratio = f64::NEG_INFINITY;
            let mut value = 0.0f64;
            for &(i, e, r) in opts {
                if e <= self.residual[i] {
                    ratio = ratio.max(r / e);
                    value = value.max(r);
                }
            }
            if value > 0.0 {
                self.scratch.push((ratio, value));
            }
        }
        self.scratch.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut total = 0.0;
        for &(ratio, value) in &self.scratch {
            let weight = value / ratio;
            if weight <= capacity {
                total += value;
                capacity -= weight;
            } else {
                total += ratio * capacity;
                break;
            }
        }
        total
    }

    fn dfs(&mut self, k: usize, revenue: f64, use_bound: bool) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if self.nodes % CLOCK_CHECK_EVERY == 0 && Instant::now() >= self.deadline {
            self.timed_out = true;
            return;
        }
        if k == self.items.len() {
            if revenue > self.best_revenue {
                self.best_revenue = revenue;
                self.best_choice.clone_from(&self.choice);
            }
            return;
        }
        if use_bound {
            let bound = revenue + self.bound(k);
            if bound <= self.best_revenue + PRUNE_SLACK * self.best_revenue.max(1.0) {
                return;
            }
        }
        for j in 0..self.opts[k].len() {
            let (i, e, r) = self.opts[k][j];
            if e <= self.residual[i] {
                self.residual[i] -= e;
                self.choice[k] = Some(i);
                self.dfs(k + 1, revenue + r, use_bound);
                self.choice[k] = None;
                self.residual[i] += e;
            }
        }
        self.dfs(k + 1, revenue, use_bound);
    }
}
