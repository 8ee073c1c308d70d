//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use edsa_core::ledger::{
    KeyRing, Ledger, LedgerConfig, LedgerTx, SubscriptionStatus, SubscriptionTerms, TxPayload,
};
use edsa_core::model::{ActorId, DataType, Quality};
use edsa_core::pricing::{PriceLedger, PriceRecord, PricingError, Window};
use edsa_core::reputation::{RatingEvent, ReputationConfig, ReputationStore};
use edsa_core::scenario::Scenario;
use edsa_core::sim::{
    generate_scenario, run_end_to_end, sweep_battery, sweep_demands, sweep_device_split, BatterySplit, E2eOptions,
    SimConfig,
};
use edsa_core::solver::{
    solve_exact, solve_greedy, solve_greedy_with, validate_plan, DeviceOrder, ExactLimits, GreedyOptions,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

// ---------------------------------------------------------------------------
// Independent reference computations.

fn samples(duration: f64, interval: f64) -> u64 {
    ((duration / interval).ceil() as u64).max(1)
}

/// `(revenue, energy)` of serving demand `k` on device `i`, or `None` when
/// the device cannot serve it.
fn option(s: &Scenario, i: usize, k: usize) -> Option<(f64, f64)> {
    let dev = &s.devices[i];
    let dem = &s.demands[k];
    let offer = dev.offers.get(&dem.data_type)?;
    if dem.quality.level() > offer.quality_cap.level() {
        return None;
    }
    let n = samples(dem.duration, dem.sampling_interval) as f64;
    let factor = s.quality_price_factors.get(&dem.quality).copied().unwrap_or(1.0);
    Some((n * (offer.unit_price * factor), n * (offer.sense_energy + dev.overhead_energy)))
}

/// Best revenue over every feasible assignment. A candidate's total is the
/// sum of its per-demand revenues taken in ascending order.
fn enumerate_best(s: &Scenario) -> f64 {
    let opts: Vec<Vec<Option<(f64, f64)>>> = (0..s.demands.len())
        .map(|k| (0..s.devices.len()).map(|i| option(s, i, k)).collect())
        .collect();
    let mut used = vec![0.0; s.devices.len()];
    let caps: Vec<f64> = s.devices.iter().map(|d| d.battery).collect();

    fn go(pos: usize, picked: &mut Vec<f64>, opts: &[Vec<Option<(f64, f64)>>], used: &mut [f64], caps: &[f64], best: &mut f64) {
        if pos == opts.len() {
            let mut v = picked.clone();
            v.sort_by(f64::total_cmp);
            let total: f64 = v.iter().sum();
            if total > *best {
                *best = total;
            }
            return;
        }
        go(pos + 1, picked, opts, used, caps, best);
        for (i, o) in opts[pos].iter().enumerate() {
            if let Some((r, e)) = *o {
                if used[i] + e <= caps[i] {
                    used[i] += e;
                    picked.push(r);
                    go(pos + 1, picked, opts, used, caps, best);
                    picked.pop();
                    used[i] -= e;
                }
            }
        }
    }
    let mut best = 0.0;
    go(0, &mut Vec::new(), &opts, &mut used, &caps, &mut best);
    best
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

// ---------------------------------------------------------------------------
// 1. Exact solver against exhaustive enumeration.

fn small_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SimConfig {
        devices: rng.random_range(1..=3),
        demands: rng.random_range(1..=10),
        ..SimConfig::table3()
    };
    let mut s = generate_scenario(&cfg, seed).expect("scenario");
    for d in &mut s.devices {
        d.battery = rng.random_range(500.0..6000.0);
    }
    s
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let limits = ExactLimits {
        timeout: Duration::from_secs(60),
        ..ExactLimits::default()
    };
    let failures: Vec<String> = (0..1000u64)
        .into_par_iter()
        .filter_map(|seed| {
            let s = small_scenario(seed);
            let exact = solve_exact(&s, &limits).expect("exact");
            let greedy = solve_greedy(&s).expect("greedy");
            let best = enumerate_best(&s);
            if !exact.optimal {
                return Some(format!("seed {seed}: exact search did not finish"));
            }
            if exact.plan.revenue != best {
                return Some(format!("seed {seed}: exact {} vs enumeration {best}", exact.plan.revenue));
            }
            if exact.plan.revenue < greedy.plan.revenue {
                return Some(format!("seed {seed}: exact {} < greedy {}", exact.plan.revenue, greedy.plan.revenue));
            }
            if validate_plan(&s, &exact.plan).is_err() {
                return Some(format!("seed {seed}: exact plan infeasible"));
            }
            None
        })
        .collect();
    let t = start.elapsed();
    verdict(
        failures.is_empty() && within(t, 60),
        format!(
            "1000 scenarios, {} mismatches{}, {:.1}s",
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default(),
            t.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------------------
// 2. Greedy plans respect every constraint.

fn fuzz_scenario(seed: u64) -> (Scenario, DeviceOrder) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f00d);
    let data_types = rng.random_range(1..=6);
    let buyers = rng.random_range(1..=20);
    let cfg = SimConfig {
        devices: rng.random_range(1..=8),
        data_types,
        buyers,
        demands: rng.random_range(0..=data_types * buyers),
        battery: rng.random_range(0.0..10_000.0),
        price_mean: rng.random_range(1.0..20.0),
        duration_mean: rng.random_range(0.5..10.0),
        interval_mean: rng.random_range(1.0..60.0),
        sense_energy: (0..rng.random_range(1..=4)).map(|_| rng.random_range(0.1..60.0)).collect(),
        overhead_energy: rng.random_range(0.0..50.0),
        ..SimConfig::default()
    };
    let mut s = generate_scenario(&cfg, seed).expect("scenario");
    for d in &mut s.devices {
        if rng.random_bool(0.5) {
            d.battery = rng.random_range(0.0..cfg.battery.max(1.0) * 2.0);
        }
    }
    if rng.random_bool(0.3) {
        for q in Quality::ladder() {
            s.quality_price_factors.insert(q, rng.random_range(0.5..2.0));
        }
    }
    let order = if rng.random_bool(0.5) {
        DeviceOrder::InitialBattery
    } else {
        DeviceOrder::ResidualBattery
    };
    (s, order)
}

/// Constraint check written from the model definition: each demand at most
/// once, quality within the offer's cap, energy within each battery.
fn independent_violations(s: &Scenario, plan: &edsa_core::model::AllocationPlan) -> usize {
    let mut bad = 0;
    let mut seen = std::collections::BTreeSet::new();
    let mut used = vec![0.0; s.devices.len()];
    for a in &plan.assignments {
        if !seen.insert(a.demand) {
            bad += 1;
        }
        let k = s.demands.iter().position(|d| d.key() == a.demand).expect("demand");
        let i = s.devices.iter().position(|d| d.id == a.device).expect("device");
        match option(s, i, k) {
            Some((_, e)) => used[i] += e,
            None => bad += 1,
        }
    }
    for (i, d) in s.devices.iter().enumerate() {
        if used[i] > d.battery * (1.0 + 1e-9) {
            bad += 1;
        }
    }
    bad
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let (violations, independent, selected): (usize, usize, usize) = (0..10_000u64)
        .into_par_iter()
        .map(|seed| {
            let (s, order) = fuzz_scenario(seed);
            let r = solve_greedy_with(&s, &GreedyOptions { device_order: order }).expect("greedy");
            let v = validate_plan(&s, &r.plan).err().map_or(0, |v| v.len());
            (v, independent_violations(&s, &r.plan), r.selected_count)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let t = start.elapsed();
    verdict(
        violations == 0 && independent == 0 && within(t, 60),
        format!(
            "10000 solves, {selected} assignments, {violations} validator violations, {independent} reference-check violations, {:.1}s",
            t.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------------------
// 3-5. Monte-Carlo trends.

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let grid: Vec<usize> = (10..=250).step_by(20).collect();
    let r = sweep_demands(&SimConfig::demand_sweep(), &grid).expect("sweep");
    let rev = r.revenues();
    let drops: Vec<usize> = rev.windows(2).enumerate().filter(|(_, w)| w[1] < w[0]).map(|(i, _)| grid[i + 1]).collect();
    let at = |n: usize| rev[grid.iter().position(|&g| g == n).expect("grid point")];
    let growth = (at(250) - at(230)).abs() / at(230);
    let t = start.elapsed();
    verdict(
        drops.is_empty() && growth <= 0.02 && within(t, 300),
        format!(
            "revenue {:.1} at 10 -> {:.1} at 230 -> {:.1} at 250, decreases at {drops:?}, 230->250 change {:.2}%, {:.1}s",
            rev[0],
            at(230),
            at(250),
            growth * 100.0,
            t.as_secs_f64()
        ),
    )
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let grid: Vec<f64> = (500..=3000).step_by(250).map(f64::from).collect();
    let r = sweep_battery(&SimConfig::single_device(), &grid).expect("sweep");
    let corr = pearson(&grid, &r.revenues());
    let pct: Vec<f64> = r.points.iter().map(|p| p.mean_residual_pct).collect();
    let strictly_down = pct.windows(2).all(|w| w[1] < w[0]);
    let lib_r = r.fit.map_or(f64::NAN, |f| f.r);
    let t = start.elapsed();
    verdict(
        corr >= 0.99 && strictly_down && (corr - lib_r).abs() < 1e-12 && within(t, 300),
        format!(
            "r = {corr:.5}, residual % {} -> {}, strictly decreasing: {strictly_down}, {:.1}s",
            fmt2(pct[0]),
            fmt2(pct[pct.len() - 1]),
            t.as_secs_f64()
        ),
    )
}

fn fmt2(x: f64) -> String {
    format!("{x:.2}")
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let splits = [(10, 300.0), (5, 600.0), (2, 1500.0), (1, 3000.0)].map(|(devices, battery)| BatterySplit { devices, battery });
    let r = sweep_device_split(&SimConfig::table3(), &splits).expect("sweep");
    let labels: Vec<&str> = r.points.iter().map(|p| p.label.as_str()).collect();
    let rev = r.revenues();
    let inversions: Vec<f64> = rev.windows(2).filter(|w| w[1] < w[0]).map(|w| (w[0] - w[1]) / w[0]).collect();
    let ok_order = labels == ["10x300", "5x600", "2x1500", "1x3000"];
    let ok = ok_order && rev[3] >= rev[0] && inversions.len() <= 1 && inversions.iter().all(|&d| d <= 0.01);
    let t = start.elapsed();
    verdict(
        ok && within(t, 300),
        format!(
            "{}, {} inversions, {:.1}s",
            labels.iter().zip(&rev).map(|(l, r)| format!("{l}: {r:.1}")).collect::<Vec<_>>().join(", "),
            inversions.len(),
            t.as_secs_f64()
        ),
    )
}

// ---------------------------------------------------------------------------
// 6. Pricing formulas.

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut book = PriceLedger::new();
    let mut records = Vec::with_capacity(10_000);
    let mut index_err: f64 = 0.0;
    for _ in 0..10_000 {
        let rec = PriceRecord {
            timestamp: rng.random_range(0..100_000),
            data_type: DataType(rng.random_range(0..8)),
            price: rng.random_range(0.01..500.0),
            quality_score: rng.random_range(0.0..=1.0),
            risk_score: rng.random_range(0.0..=1.0),
        };
        book.record_price(rec).expect("record");
        let oracle = rec.price / (rec.quality_score + rec.risk_score + 1.0);
        index_err = index_err.max(rel_err(edsa_core::pricing::price_index(&rec), oracle));
        records.push(rec);
    }

    let mut quote_err: f64 = 0.0;
    let mut empty_ok = 0;
    let mut empties = 0;
    let mut quotes = 0;
    for _ in 0..10_000 {
        let ty = DataType(rng.random_range(0..9));
        let a = rng.random_range(-1000..101_000);
        let b = a + rng.random_range(0..20_000);
        let (qs, rs, beta) = (rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>());
        let fee = rng.random_range(0.0..50.0);
        let inside: Vec<&PriceRecord> = records
            .iter()
            .filter(|r| r.data_type == ty && r.timestamp >= a && r.timestamp < b)
            .collect();
        let window = Window::new(a, b).expect("window");
        let got = book.quote(ty, window, qs, rs, beta, fee);
        if inside.is_empty() {
            empties += 1;
            if book.base_price(ty, window).is_none() && matches!(got, Err(PricingError::NoRecords { .. })) {
                empty_ok += 1;
            }
            continue;
        }
        quotes += 1;
        let base = inside
            .iter()
            .map(|r| r.price / (1.0 + r.quality_score + r.risk_score))
            .sum::<f64>()
            / inside.len() as f64;
        let fin = (1.0 + qs + rs) * base + beta * fee;
        match got {
            Ok(q) => {
                quote_err = quote_err.max(rel_err(q.base_price, base)).max(rel_err(q.final_price, fin));
                if q.sample_size != inside.len() {
                    quote_err = f64::INFINITY;
                }
            }
            Err(_) => quote_err = f64::INFINITY,
        }
    }
    verdict(
        index_err <= 1e-12 && quote_err <= 1e-12 && empty_ok == empties && empties > 0,
        format!(
            "10000 records (max index error {index_err:.1e}), {quotes} quotes (max error {quote_err:.1e}), {empty_ok}/{empties} empty windows absent"
        ),
    )
}

// ---------------------------------------------------------------------------
// 7. Reputation attacks.

fn actor(s: &str) -> ActorId {
    ActorId::new(s)
}

fn rating(i: &str, j: &str, value: f64, fi: f64, fj: f64, t: i64) -> RatingEvent {
    RatingEvent {
        actor_i: actor(i),
        actor_j: actor(j),
        t_value: value,
        feedback_i: fi,
        feedback_j: fj,
        event_time: t,
    }
}

fn criterion_7() -> Verdict {
    let mut notes = Vec::new();

    // (a) repeated mutual ratings inside one burst
    let mut store = ReputationStore::new(ReputationConfig::default());
    store.register(&actor("a"));
    store.register(&actor("b"));
    let mut late_max: f64 = 0.0;
    for k in 0..60i64 {
        let (fi, fj) = if k % 2 == 0 { (0.99, 0.01) } else { (0.01, 0.99) };
        let out = store.apply_rating(&rating("a", "b", 10.0, fi, fj, 1000 + k)).expect("rating");
        if k >= 50 {
            late_max = late_max.max(out.delta_i.abs()).max(out.delta_j.abs());
        }
    }
    let a_ok = late_max < 1e-3;
    notes.push(format!("(a) max change after 50 events {late_max:.1e}"));

    // (b) strike and recharge
    let mut base = ReputationStore::new(ReputationConfig::default());
    for who in ["x", "y", "z"] {
        base.register(&actor(who));
    }
    base.apply_rating(&rating("z", "x", 100.0, 0.5, 0.2, 0)).expect("rating");
    let before = base.score(&actor("x")).expect("score");
    let moved = |value: f64| {
        let mut s = base.clone();
        s.apply_rating(&rating("y", "x", value, 0.5, 0.95, 1_000_000)).expect("rating");
        s.score(&actor("x")).expect("score") - before
    };
    let (big, small) = (moved(100.0), moved(10.0));
    let b_ok = big > 0.0 && small > 0.0 && big >= small;
    notes.push(format!("(b) max-value move {big:.4} vs 10% move {small:.4}"));

    // (c) violation on a first contract
    let mut store = ReputationStore::new(ReputationConfig::default());
    store.register(&actor("v"));
    let rec = store.apply_violation(&actor("v"), 5).expect("violation").clone();
    let c_ok = rec.score == 0.0 && rec.contracts_failed == 1 && rec.contracts_total == 1;
    notes.push(format!("(c) score after first violation {}", rec.score));

    // (d) bounded scores under random event streams
    let names = ["p", "q", "r", "s"];
    let out_of_range: usize = (0..100_000u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut store = ReputationStore::new(ReputationConfig {
                collusion_exponent: rng.random_range(1..=4),
                ..ReputationConfig::default()
            });
            for n in names {
                store.register_with_score(&actor(n), Some(rng.random::<f64>()));
            }
            let mut t = 0i64;
            let mut bad = 0;
            for _ in 0..rng.random_range(1..=20) {
                t += if rng.random_bool(0.7) { rng.random_range(0..600) } else { rng.random_range(3600..100_000) };
                let i = names[rng.random_range(0..4)];
                if rng.random_bool(0.15) {
                    store.apply_violation(&actor(i), t).expect("violation");
                } else {
                    let j = names[(names.iter().position(|n| *n == i).expect("name") + rng.random_range(1..4)) % 4];
                    let ev = rating(
                        i,
                        j,
                        rng.random_range(0.001..1000.0),
                        rng.random_range(0.001..0.999),
                        rng.random_range(0.001..0.999),
                        t,
                    );
                    store.apply_rating(&ev).expect("rating");
                }
                bad += store.records().filter(|r| !(0.0..=1.0).contains(&r.score)).count();
            }
            bad
        })
        .sum();
    let d_ok = out_of_range == 0;
    notes.push(format!("(d) {out_of_range} out-of-range scores over 100000 sequences"));

    verdict(a_ok && b_ok && c_ok && d_ok, notes.join("; "))
}

// ---------------------------------------------------------------------------
// 8. Ledger determinism and safety.

const SETTLE_WINDOW: i64 = 3600;
const T_START: i64 = 1000;
const T_END: i64 = T_START + 3600;

fn keys() -> KeyRing {
    let mut k = KeyRing::new();
    for who in ["seller", "buyer", "seller2", "buyer2", "mallory"] {
        k.insert(actor(who), format!("key-{who}").into_bytes());
    }
    k
}

fn sign(ledger: &Ledger, payload: TxPayload, signers: &[&str]) -> LedgerTx {
    signers
        .iter()
        .fold(LedgerTx::new(payload), |tx, s| tx.signed_by(ledger.keys(), &actor(s)))
}

fn terms(device: &str, data_type: u16, price: f64) -> SubscriptionTerms {
    SubscriptionTerms {
        device_hash: device.to_string(),
        data_type: DataType(data_type),
        start_time: T_START,
        periodicity: 600.0,
        duration: 3600.0,
        quality_score: 0.5,
        risk_score: 0.2,
        unit_price: price,
        payment_granularity: None,
        negotiation_info: String::new(),
    }
}

/// One registered device, one contract and one Pending subscription.
fn pending_ledger(config: LedgerConfig) -> Ledger {
    let mut l = Ledger::new(keys(), config);
    let steps = [
        (
            TxPayload::RegisterDevice {
                seller: actor("seller"),
                device_hash: "dev".into(),
                at: 0,
            },
            vec!["seller"],
        ),
        (
            TxPayload::Create {
                dsc_address: "dsc".into(),
                abis: vec![],
                seller: actor("seller"),
                buyer: actor("buyer"),
                at: 0,
            },
            vec!["seller", "buyer"],
        ),
        (
            TxPayload::Add {
                cid: "cid-000000".into(),
                buyer: actor("buyer"),
                terms: terms("dev", 1, 2.0),
                at: 10,
            },
            vec!["seller"],
        ),
    ];
    for (p, s) in steps {
        let tx = sign(&l, p, &s);
        l.submit(tx).expect("setup");
    }
    l
}

fn lifecycle_ops() -> Vec<(TxPayload, Vec<&'static str>)> {
    let sid = || "sid-000000".to_string();
    vec![
        (TxPayload::Start { sid: sid(), at: T_START }, vec!["seller"]),
        (TxPayload::Meter { sid: sid(), count: 6, at: T_END }, vec!["seller"]),
        (TxPayload::Meter { sid: sid(), count: 6, at: T_END }, vec!["buyer"]),
        (TxPayload::Meter { sid: sid(), count: 5, at: T_END }, vec!["buyer"]),
        (TxPayload::Settle { sid: sid(), count: None, feedback: 0.9, at: T_END }, vec!["seller"]),
        (TxPayload::Settle { sid: sid(), count: None, feedback: 0.8, at: T_END }, vec!["buyer"]),
        (TxPayload::Timeout { sid: sid(), at: T_END + SETTLE_WINDOW }, vec!["seller"]),
        (TxPayload::Timeout { sid: sid(), at: T_END + SETTLE_WINDOW }, vec!["buyer"]),
        (TxPayload::Delete { sid: sid(), at: T_END + 2 * SETTLE_WINDOW }, vec!["seller"]),
        (TxPayload::Remove { cid: "cid-000000".into(), at: T_END + 3 * SETTLE_WINDOW }, vec!["seller", "buyer"]),
    ]
}

fn status_of(l: &Ledger) -> Option<SubscriptionStatus> {
    let st = l.state();
    st.subscriptions
        .get("sid-000000")
        .or_else(|| st.history.get("sid-000000"))
        .map(|s| s.status)
}

const DECLARED: [(SubscriptionStatus, SubscriptionStatus); 5] = [
    (SubscriptionStatus::Pending, SubscriptionStatus::Active),
    (SubscriptionStatus::Active, SubscriptionStatus::Settled),
    (SubscriptionStatus::Active, SubscriptionStatus::Disputed),
    (SubscriptionStatus::Settled, SubscriptionStatus::Deleted),
    (SubscriptionStatus::Disputed, SubscriptionStatus::Deleted),
];

/// Edges the enumeration must exercise. Deletion requires a settled
/// subscription, so the declared Disputed -> Deleted edge is never taken.
const REACHABLE: [(SubscriptionStatus, SubscriptionStatus); 4] = [
    (SubscriptionStatus::Pending, SubscriptionStatus::Active),
    (SubscriptionStatus::Active, SubscriptionStatus::Settled),
    (SubscriptionStatus::Active, SubscriptionStatus::Disputed),
    (SubscriptionStatus::Settled, SubscriptionStatus::Deleted),
];

#[derive(Default)]
struct Walk {
    nodes: u64,
    accepted: u64,
    undeclared: Vec<String>,
    rejected_changed: u64,
    seen: std::collections::BTreeSet<(String, String)>,
}

/// Applies `ops[idx]` to `l`, checks the status edge it causes, then extends
/// the trace with every op until it is six long.
fn visit(l: &Ledger, ops: &[(TxPayload, Vec<&'static str>)], idx: usize, trace: &mut Vec<usize>, w: &mut Walk) {
    w.nodes += 1;
    trace.push(idx);
    let mut next = l.clone();
    let before = status_of(l);
    let tx = sign(&next, ops[idx].0.clone(), &ops[idx].1);
    match next.submit(tx) {
        Ok(_) => {
            w.accepted += 1;
            let after = status_of(&next);
            if before != after {
                match (before, after) {
                    (Some(b), Some(a)) => {
                        w.seen.insert((format!("{b:?}"), format!("{a:?}")));
                        if !DECLARED.contains(&(b, a)) {
                            w.undeclared.push(format!("{trace:?}: {b:?} -> {a:?}"));
                        }
                    }
                    _ => w.undeclared.push(format!("{trace:?}: {before:?} -> {after:?}")),
                }
            }
        }
        Err(_) => {
            if next.log().len() != l.log().len() || next.state() != l.state() {
                w.rejected_changed += 1;
            }
        }
    }
    if trace.len() < 6 {
        for j in 0..ops.len() {
            visit(&next, ops, j, trace, w);
        }
    }
    trace.pop();
}

fn exhaustive_lifecycle(initial: &[(&str, f64)]) -> Walk {
    let mut config = LedgerConfig::default();
    for (who, s) in initial {
        config.initial_scores.insert(actor(who), *s);
    }
    let root = pending_ledger(config);
    let ops = lifecycle_ops();
    let parts: Vec<Walk> = (0..ops.len())
        .into_par_iter()
        .map(|first| {
            let mut w = Walk::default();
            visit(&root, &ops, first, &mut Vec::new(), &mut w);
            w
        })
        .collect();
    parts.into_iter().fold(Walk::default(), |mut acc, w| {
        acc.nodes += w.nodes;
        acc.accepted += w.accepted;
        acc.undeclared.extend(w.undeclared);
        acc.rejected_changed += w.rejected_changed;
        acc.seen.extend(w.seen);
        acc
    })
}

/// Random mixed workload over two sellers, two buyers and an outsider.
fn random_log(seed: u64) -> Ledger {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut l = Ledger::new(keys(), LedgerConfig::default());
    let people = ["seller", "buyer", "seller2", "buyer2", "mallory"];
    let mut t = 0i64;
    for _ in 0..rng.random_range(20..120) {
        t += rng.random_range(0..900);
        let sid = format!("sid-{:06}", rng.random_range(0..6));
        let cid = format!("cid-{:06}", rng.random_range(0..4));
        let s = *people[..3].choose(&mut rng).expect("actor");
        let b = *people.choose(&mut rng).expect("actor");
        let (payload, signers): (TxPayload, Vec<&str>) = match rng.random_range(0..11) {
            0 => (
                TxPayload::RegisterDevice {
                    seller: actor(s),
                    device_hash: format!("dev-{}", rng.random_range(0..3)),
                    at: t,
                },
                vec![s],
            ),
            1 => (
                TxPayload::Create {
                    dsc_address: format!("dsc-{s}-{b}"),
                    abis: vec![],
                    seller: actor(s),
                    buyer: actor(b),
                    at: t,
                },
                vec![s, b],
            ),
            2 => (
                TxPayload::Add {
                    cid,
                    buyer: actor(b),
                    terms: SubscriptionTerms {
                        start_time: t + rng.random_range(0..600),
                        ..terms(&format!("dev-{}", rng.random_range(0..3)), rng.random_range(0..3), rng.random_range(0.5..5.0))
                    },
                    at: t,
                },
                vec![s],
            ),
            3 => (TxPayload::Start { sid, at: t + rng.random_range(0..600) }, vec![s]),
            4 => (TxPayload::Meter { sid, count: rng.random_range(4..8), at: t }, vec![b]),
            5 => (TxPayload::Meter { sid, count: rng.random_range(4..8), at: t }, vec![s]),
            6 => (
                TxPayload::Settle {
                    sid,
                    count: if rng.random_bool(0.5) { None } else { Some(rng.random_range(4..8)) },
                    feedback: rng.random_range(0.05..0.95),
                    at: t,
                },
                vec![if rng.random_bool(0.5) { s } else { b }],
            ),
            7 => (TxPayload::Timeout { sid, at: t + rng.random_range(0..2 * SETTLE_WINDOW) }, vec![b]),
            8 => (TxPayload::Delete { sid, at: t }, vec![s]),
            9 => (TxPayload::Remove { cid, at: t }, vec![s, b]),
            _ => (TxPayload::Info { sid }, vec![b]),
        };
        let tx = sign(&l, payload, &signers);
        if tx.payload.is_read() {
            let _ = l.query(&tx);
        } else {
            let _ = l.submit(tx);
        }
    }
    l
}

enum Corruption {
    FlipSignature,
    WrongKey,
    ImpersonateSigner,
    TamperPayload,
    BadPayloadHash,
    DropCosigner,
    DuplicateSigner,
    Unsigned,
}

fn corrupt(l: &Ledger, rng: &mut ChaCha8Rng, payload: TxPayload, signers: &[&str]) -> LedgerTx {
    let mut tx = sign(l, payload, signers);
    let multisig = signers.len() == 2;
    let choices: &[Corruption] = if multisig {
        &[
            Corruption::FlipSignature,
            Corruption::WrongKey,
            Corruption::ImpersonateSigner,
            Corruption::TamperPayload,
            Corruption::BadPayloadHash,
            Corruption::DropCosigner,
            Corruption::DuplicateSigner,
            Corruption::Unsigned,
        ]
    } else {
        &[
            Corruption::FlipSignature,
            Corruption::WrongKey,
            Corruption::ImpersonateSigner,
            Corruption::TamperPayload,
            Corruption::BadPayloadHash,
            Corruption::Unsigned,
        ]
    };
    let pick = rng.random_range(0..tx.signatures.len());
    match choices.choose(rng).expect("choice") {
        Corruption::FlipSignature => {
            let sig = &mut tx.signatures[pick].signature;
            let pos = rng.random_range(0..sig.len());
            let c = sig.as_bytes()[pos];
            let flipped = if c == b'0' { '1' } else { '0' };
            sig.replace_range(pos..=pos, &flipped.to_string());
        }
        Corruption::WrongKey => {
            let who = tx.signatures[pick].signer.clone();
            let mut forged = KeyRing::new();
            forged.insert(who.clone(), b"not-the-key".to_vec());
            let fake = LedgerTx::new(tx.payload.clone()).signed_by(&forged, &who);
            tx.signatures[pick] = fake.signatures[0].clone();
        }
        Corruption::ImpersonateSigner => {
            let real = tx.signatures[pick].signer.clone();
            let by_mallory = LedgerTx::new(tx.payload.clone()).signed_by(l.keys(), &actor("mallory"));
            let mut att = by_mallory.signatures[0].clone();
            att.signer = real;
            tx.signatures[pick] = att;
        }
        Corruption::TamperPayload => {
            let signatures = tx.signatures.clone();
            let tampered = match tx.payload.clone() {
                TxPayload::Start { sid, at } => TxPayload::Start { sid, at: at + 1 },
                TxPayload::Create { dsc_address, abis, seller, buyer, at } => TxPayload::Create {
                    dsc_address: format!("{dsc_address}x"),
                    abis,
                    seller,
                    buyer,
                    at,
                },
                TxPayload::Add { cid, buyer, mut terms, at } => {
                    terms.unit_price *= 2.0;
                    TxPayload::Add { cid, buyer, terms, at }
                }
                TxPayload::RegisterDevice { seller, device_hash, at } => TxPayload::RegisterDevice {
                    seller,
                    device_hash: format!("{device_hash}x"),
                    at,
                },
                other => unreachable!("no tampering rule for {:?}", other.kind()),
            };
            tx = LedgerTx::new(tampered);
            tx.signatures = signatures;
        }
        Corruption::BadPayloadHash => {
            let mut h = tx.payload_hash.clone().into_bytes();
            h[0] = if h[0] == b'a' { b'b' } else { b'a' };
            tx.payload_hash = String::from_utf8(h).expect("hex");
        }
        Corruption::DropCosigner => {
            tx.signatures.remove(pick);
        }
        Corruption::DuplicateSigner => {
            let keep = tx.signatures[pick].clone();
            tx.signatures = vec![keep.clone(), keep];
        }
        Corruption::Unsigned => tx.signatures.clear(),
    }
    tx
}

fn corrupted_signatures() -> (usize, usize, usize) {
    let base = pending_ledger(LedgerConfig::default());
    let valid: Vec<(TxPayload, Vec<&str>)> = vec![
        (TxPayload::Start { sid: "sid-000000".into(), at: T_START }, vec!["seller"]),
        (
            TxPayload::Add {
                cid: "cid-000000".into(),
                buyer: actor("buyer"),
                terms: terms("dev", 2, 3.0),
                at: 20,
            },
            vec!["seller"],
        ),
        (
            TxPayload::Create {
                dsc_address: "dsc-2".into(),
                abis: vec![],
                seller: actor("seller"),
                buyer: actor("buyer2"),
                at: 20,
            },
            vec!["seller", "buyer2"],
        ),
        (
            TxPayload::RegisterDevice {
                seller: actor("seller2"),
                device_hash: "dev-9".into(),
                at: 20,
            },
            vec!["seller2"],
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut accepted, mut changed, mut valid_rejected) = (0, 0, 0);
    for _ in 0..1000 {
        let (p, s) = valid.choose(&mut rng).expect("tx").clone();
        let honest = sign(&base, p.clone(), &s);
        if base.clone().submit(honest).is_err() {
            valid_rejected += 1;
        }
        let mut l = base.clone();
        let tx = corrupt(&l, &mut rng, p, &s);
        if l.submit(tx).is_ok() {
            accepted += 1;
        }
        if l.log().len() != base.log().len() || l.digest() != base.digest() {
            changed += 1;
        }
    }
    (accepted, changed, valid_rejected)
}

fn criterion_8() -> Verdict {
    let mut notes = Vec::new();

    let replay_bad: usize = (0..200u64)
        .into_par_iter()
        .filter(|&seed| {
            let l = random_log(seed);
            let direct = Ledger::replay(l.keys().clone(), l.state().config.clone(), l.log());
            let mut buf = Vec::new();
            l.chain().write_ndjson(&mut buf).expect("encode");
            let entries = edsa_core::ledger::Chain::read_ndjson(&buf[..]).expect("decode");
            let from_disk = Ledger::replay(l.keys().clone(), l.state().config.clone(), &entries);
            !matches!((direct, from_disk), (Ok(a), Ok(b)) if a.digest() == l.digest() && b.digest() == l.digest())
        })
        .count();
    let log_sizes: usize = (0..200u64).map(|s| random_log(s).log().len()).sum();
    notes.push(format!("replay: {replay_bad}/200 random logs diverged ({log_sizes} entries total)"));

    let tie = exhaustive_lifecycle(&[]);
    let ranked = exhaustive_lifecycle(&[("seller", 0.9), ("buyer", 0.4)]);
    let undeclared = tie.undeclared.len() + ranked.undeclared.len();
    let leaked = tie.rejected_changed + ranked.rejected_changed;
    let mut seen = tie.seen.clone();
    seen.extend(ranked.seen.clone());
    notes.push(format!(
        "lifecycle: {} sequences, {} accepted txs, {undeclared} undeclared transitions, {leaked} rejections with side effects, edges exercised {}",
        tie.nodes + ranked.nodes,
        tie.accepted + ranked.accepted,
        seen.iter().map(|(a, b)| format!("{a}->{b}")).collect::<Vec<_>>().join(" ")
    ));
    if let Some(first) = tie.undeclared.first().or(ranked.undeclared.first()) {
        notes.push(format!("first undeclared: {first}"));
    }

    let (accepted, changed, valid_rejected) = corrupted_signatures();
    notes.push(format!(
        "signatures: {accepted}/1000 corrupted txs accepted, {changed} state changes, {valid_rejected} honest controls rejected"
    ));

    verdict(
        replay_bad == 0 && undeclared == 0 && leaked == 0 && accepted == 0 && changed == 0 && valid_rejected == 0
            && REACHABLE.iter().all(|(a, b)| seen.contains(&(format!("{a:?}"), format!("{b:?}")))),
        notes.join("; "),
    )
}

// ---------------------------------------------------------------------------
// 9. End-to-end conservation.

fn criterion_9() -> Verdict {
    let cfg = SimConfig::table3();
    let results: Vec<(u64, f64, f64, bool, usize)> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let (t, l) = run_end_to_end(&cfg, seed, &E2eOptions::default()).expect("e2e");
            let balanced = (l.state().total_payments() - l.state().total_invoices()).abs() <= 1e-9;
            (seed, t.revenue, t.plan_revenue, balanced, t.trades.len())
        })
        .collect();
    let worst = results.iter().map(|r| (r.1 - r.2).abs()).fold(0.0, f64::max);
    let unbalanced = results.iter().filter(|r| !r.3).count();
    let trades: usize = results.iter().map(|r| r.4).sum();
    verdict(
        worst <= 1e-9 && unbalanced == 0,
        format!("100 seeds, {trades} trades, max |revenue - plan| {worst:.1e}, {unbalanced} unbalanced ledgers"),
    )
}

fn main() {
    let criteria: [(u8, &str, fn() -> Verdict); 9] = [
        (1, "exact solver equals enumeration, dominates greedy", criterion_1),
        (2, "greedy plans satisfy all constraints", criterion_2),
        (3, "revenue grows with demand then saturates", criterion_3),
        (4, "revenue linear in battery, residual share falls", criterion_4),
        (5, "fewer larger devices earn more", criterion_5),
        (6, "pricing formulas match reference", criterion_6),
        (7, "reputation resists attacks", criterion_7),
        (8, "ledger determinism and safety", criterion_8),
        (9, "end-to-end revenue conservation", criterion_9),
    ];
    let mut failed = 0;
    let mut lines = BTreeMap::new();
    for (n, name, f) in criteria {
        let v = f();
        if !v.pass {
            failed += 1;
        }
        let line = format!(
            "criterion {n} {}: {name} | {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        println!("{line}");
        lines.insert(n, line);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        lines.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
