use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{generate_from, iteration_rng};
use super::stats::{linear_fit, LinearFit};
use super::{SimConfig, SimError};
use crate::scenario::Scenario;
use crate::solver::solve_greedy;

pub const CSV_HEADER: &str = "sweep_value,mean_revenue,mean_residual_abs,mean_residual_pct,mean_selected,iterations";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub label: String,
    pub value: f64,
    pub mean_revenue: f64,
    pub mean_residual_abs: f64,
    pub mean_residual_pct: f64,
    pub mean_selected: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub variable: String,
    pub points: Vec<SweepPoint>,
    /// Revenue against the swept value, for the battery sweep.
    pub fit: Option<LinearFit>,
}

impl SweepResult {
    pub fn revenues(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mean_revenue).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        if self.fit.is_some() {
            out.push_str(",fit_slope,fit_r");
        }
        out.push('\n');
        for p in &self.points {
            let _ = write!(
                out,
                "{},{},{},{},{},{}",
                p.label, p.mean_revenue, p.mean_residual_abs, p.mean_residual_pct, p.mean_selected, p.iterations
            );
            if let Some(f) = self.fit {
                let _ = write!(out, ",{},{}", f.slope, f.r);
            }
            out.push('\n');
        }
        out
    }
}

/// `devices` devices of `battery` units each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatterySplit {
    pub devices: usize,
    pub battery: f64,
}

impl BatterySplit {
    pub fn total(&self) -> f64 {
        self.devices as f64 * self.battery
    }
}

impl fmt::Display for BatterySplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.devices, self.battery)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Sample {
    revenue: f64,
    residual: f64,
    residual_pct: f64,
    selected: f64,
}

fn measure(scenario: &Scenario) -> Result<Sample, SimError> {
    let report = solve_greedy(scenario)?;
    let capacity: f64 = scenario.devices.iter().map(|d| d.battery).sum();
    let residual: f64 = report.plan.residual_battery.values().sum();
    Ok(Sample {
        revenue: report.plan.revenue,
        residual,
        residual_pct: if capacity > 0.0 { 100.0 * residual / capacity } else { 0.0 },
        selected: report.selected_count as f64,
    })
}

/// Runs `per_iteration` for every seed in parallel and averages the samples
/// point by point, summing in seed order.
fn run<F>(config: &SimConfig, points: usize, per_iteration: F) -> Result<Vec<Sample>, SimError>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<Vec<Sample>, SimError> + Sync,
{
    let rows: Vec<Vec<Sample>> = (0..config.iterations as u64)
        .into_par_iter()
        .map(|k| per_iteration(&mut iteration_rng(config.seed, k)))
        .collect::<Result<_, _>>()?;
    let n = config.iterations as f64;
    let mut acc = vec![Sample::default(); points];
    for row in &rows {
        for (a, s) in acc.iter_mut().zip(row) {
            a.revenue += s.revenue;
            a.residual += s.residual;
            a.residual_pct += s.residual_pct;
            a.selected += s.selected;
        }
    }
    for a in &mut acc {
        a.revenue /= n;
        a.residual /= n;
        a.residual_pct /= n;
        a.selected /= n;
    }
    Ok(acc)
}

fn point(label: String, value: f64, s: Sample, iterations: usize) -> SweepPoint {
    SweepPoint {
        label,
        value,
        mean_revenue: s.revenue,
        mean_residual_abs: s.residual,
        mean_residual_pct: s.residual_pct,
        mean_selected: s.selected,
        iterations,
    }
}

/// Revenue against the number of demands. Each iteration draws one scenario
/// with the largest demand count and solves its prefixes.
pub fn sweep_demands(config: &SimConfig, grid: &[usize]) -> Result<SweepResult, SimError> {
    let max = *grid.iter().max().ok_or(SimError::EmptyGrid)?;
    let cfg = SimConfig {
        demands: max,
        ..config.clone()
    };
    cfg.validate()?;
    let samples = run(&cfg, grid.len(), |rng| {
        let full = generate_from(&cfg, rng)?;
        grid.iter()
            .map(|&n| {
                let mut s = full.clone();
                s.demands.truncate(n);
                measure(&s)
            })
            .collect()
    })?;
    Ok(SweepResult {
        variable: "demands".into(),
        points: grid
            .iter()
            .zip(samples)
            .map(|(&n, s)| point(n.to_string(), n as f64, s, cfg.iterations))
            .collect(),
        fit: None,
    })
}

/// Revenue against per-device battery; each iteration draws one scenario and
/// re-solves it at every capacity.
pub fn sweep_battery(config: &SimConfig, grid: &[f64]) -> Result<SweepResult, SimError> {
    if grid.is_empty() {
        return Err(SimError::EmptyGrid);
    }
    if config.devices != 1 {
        return Err(SimError::InvalidConfig(format!(
            "battery sweep needs a single device, config has {}",
            config.devices
        )));
    }
    if grid.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
        return Err(SimError::InvalidConfig("battery grid values must be finite and non-negative".into()));
    }
    config.validate()?;
    let samples = run(config, grid.len(), |rng| {
        let mut s = generate_from(config, rng)?;
        grid.iter()
            .map(|&b| {
                for d in &mut s.devices {
                    d.battery = b;
                }
                measure(&s)
            })
            .collect()
    })?;
    let revenues: Vec<f64> = samples.iter().map(|s| s.revenue).collect();
    Ok(SweepResult {
        variable: "battery".into(),
        fit: linear_fit(grid, &revenues),
        points: grid
            .iter()
            .zip(samples)
            .map(|(&b, s)| point(b.to_string(), b, s, config.iterations))
            .collect(),
    })
}

/// Revenue for a fixed total capacity split across more or fewer devices.
/// Points are ordered from most to fewest devices. Each iteration draws the
/// largest fleet once; a split with `k` devices uses its first `k`.
pub fn sweep_device_split(config: &SimConfig, splits: &[BatterySplit]) -> Result<SweepResult, SimError> {
    let first = splits.first().ok_or(SimError::EmptyGrid)?;
    let total = first.total();
    for s in splits {
        if s.devices == 0 || !(s.battery.is_finite() && s.battery >= 0.0) {
            return Err(SimError::InvalidConfig(format!("invalid split {s}")));
        }
        if (s.total() - total).abs() > 1e-9 * total.max(1.0) {
            return Err(SimError::UnequalSplits(format!("{s} totals {} but {first} totals {total}", s.total())));
        }
    }
    let mut ordered = splits.to_vec();
    ordered.sort_by(|a, b| b.devices.cmp(&a.devices));
    let cfg = SimConfig {
        devices: ordered[0].devices,
        ..config.clone()
    };
    cfg.validate()?;
    let samples = run(&cfg, ordered.len(), |rng| {
        let full = generate_from(&cfg, rng)?;
        ordered
            .iter()
            .map(|split| {
                let mut s = full.clone();
                s.devices.truncate(split.devices);
                for d in &mut s.devices {
                    d.battery = split.battery;
                }
                measure(&s)
            })
            .collect()
    })?;
    Ok(SweepResult {
        variable: "devices".into(),
        points: ordered
            .iter()
            .zip(samples)
            .map(|(split, s)| point(split.to_string(), split.devices as f64, s, cfg.iterations))
            .collect(),
        fit: None,
    })
}
