use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{generate_scenario, SimConfig, SimError};
use crate::ledger::{
    KeyRing, Ledger, LedgerConfig, LedgerTx, SettlementOutcome, SubscriptionTerms, TxPayload, TxReceipt,
    ViolationRecord,
};
use crate::model::{sample_count, ActorId, DemandKey, DeviceId};
use crate::pricing::quality_score;
use crate::solver::solve_greedy;

const EPOCH: i64 = 1_700_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E2eOptions {
    /// Samples the buyer under-reports on every trade (never below 1).
    pub buyer_shortfall: u64,
    /// The seller never submits its settlement; the buyer claims a timeout.
    pub seller_no_show: bool,
    pub seller_score: Option<f64>,
    pub buyer_score: Option<f64>,
    /// Feedback the seller gives each buyer.
    pub seller_feedback: f64,
    /// Feedback each buyer gives the seller.
    pub buyer_feedback: f64,
}

impl Default for E2eOptions {
    fn default() -> Self {
        Self {
            buyer_shortfall: 0,
            seller_no_show: false,
            seller_score: None,
            buyer_score: None,
            seller_feedback: 0.9,
            buyer_feedback: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub demand: DemandKey,
    pub device: DeviceId,
    pub sid: String,
    pub samples: u64,
    pub unit_price: f64,
    pub outcome: Option<SettlementOutcome>,
    pub violation: Option<ViolationRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreChange {
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeTranscript {
    pub seed: u64,
    pub plan_revenue: f64,
    /// Sum of released invoices, in demand order.
    pub revenue: f64,
    pub trades: Vec<TradeRecord>,
    pub reputation: BTreeMap<ActorId, ScoreChange>,
    pub log_length: usize,
    pub log_head: String,
    pub state_digest: String,
}

fn buyer_actor(k: u32) -> ActorId {
    ActorId::new(format!("buyer-{k}"))
}

fn device_hash(id: &DeviceId) -> String {
    hex::encode(Sha256::digest(format!("device:{id}").as_bytes()))
}

struct Driver {
    ledger: Ledger,
}

impl Driver {
    fn submit(&mut self, payload: TxPayload, signers: &[&ActorId]) -> Result<TxReceipt, SimError> {
        let tx = signers
            .iter()
            .fold(LedgerTx::new(payload), |tx, s| tx.signed_by(self.ledger.keys(), s));
        Ok(self.ledger.submit(tx)?)
    }
}

/// Solves a generated scenario with the greedy heuristic, then trades every
/// allocated demand through the ledger: register, create, add, start, meter,
/// settle (and timeout when the seller stays away).
pub fn run_end_to_end(
    config: &SimConfig,
    seed: u64,
    options: &E2eOptions,
) -> Result<(TradeTranscript, Ledger), SimError> {
    let scenario = generate_scenario(config, seed)?;
    let report = solve_greedy(&scenario)?;
    let seller = ActorId::new("seller");

    let mut keys = KeyRing::new();
    keys.insert(seller.clone(), b"secret:seller".to_vec());
    let mut ledger_config = LedgerConfig::default();
    if let Some(s) = options.seller_score {
        ledger_config.initial_scores.insert(seller.clone(), s);
    }
    let buyers: Vec<u32> = {
        let mut v: Vec<u32> = report.plan.assignments.iter().map(|a| a.demand.buyer.0).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    for &k in &buyers {
        let b = buyer_actor(k);
        keys.insert(b.clone(), format!("secret:{b}").into_bytes());
        if let Some(s) = options.buyer_score {
            ledger_config.initial_scores.insert(b, s);
        }
    }
    let window = ledger_config.settle_window_secs;
    let mut d = Driver {
        ledger: Ledger::new(keys, ledger_config),
    };

    for dev in &scenario.devices {
        d.submit(
            TxPayload::RegisterDevice {
                seller: seller.clone(),
                device_hash: device_hash(&dev.id),
                at: EPOCH,
            },
            &[&seller],
        )?;
    }
    let mut contracts = BTreeMap::new();
    for &k in &buyers {
        let b = buyer_actor(k);
        let r = d.submit(
            TxPayload::Create {
                dsc_address: format!("dsc:seller:{b}"),
                abis: ["add", "info", "start", "settle", "delete"].map(String::from).to_vec(),
                seller: seller.clone(),
                buyer: b.clone(),
                at: EPOCH,
            },
            &[&seller, &b],
        )?;
        if let TxReceipt::ContractCreated { contract } = r {
            contracts.insert(k, contract.cid);
        }
    }

    let mut reputation = BTreeMap::new();
    for actor in std::iter::once(seller.clone()).chain(buyers.iter().map(|&k| buyer_actor(k))) {
        let s = d.ledger.state().reputation.score(&actor).unwrap_or_default();
        reputation.insert(actor, ScoreChange { before: s, after: s });
    }

    let mut trades = Vec::with_capacity(report.plan.assignments.len());
    let mut revenue = 0.0;
    for (idx, a) in report.plan.assignments.iter().enumerate() {
        let demand = &scenario.demands[scenario.demand_index(a.demand).expect("planned demand exists")];
        let device = &scenario.devices[scenario.device_index(a.device.as_str()).expect("planned device exists")];
        let offer = device.offer(demand.data_type)?;
        let samples = sample_count(demand)?;
        let unit_price = offer.unit_price * scenario.quality_factor(demand.quality);
        let buyer = buyer_actor(a.demand.buyer.0);
        let start = EPOCH + 60 + idx as i64;
        let duration_secs = demand.duration * 3600.0;
        let end = start + duration_secs.ceil() as i64;

        let r = d.submit(
            TxPayload::Add {
                cid: contracts[&a.demand.buyer.0].clone(),
                buyer: buyer.clone(),
                terms: SubscriptionTerms {
                    device_hash: device_hash(&device.id),
                    data_type: demand.data_type,
                    start_time: start,
                    periodicity: demand.sampling_interval * 3600.0,
                    duration: duration_secs,
                    quality_score: quality_score(demand.quality),
                    risk_score: 0.0,
                    unit_price,
                    payment_granularity: Some(samples),
                    negotiation_info: String::new(),
                },
                at: EPOCH + 1,
            },
            &[&seller],
        )?;
        let TxReceipt::SubscriptionAdded { subscription, .. } = r else {
            unreachable!("add returns the subscription")
        };
        let sid = subscription.sid;
        d.submit(TxPayload::Start { sid: sid.clone(), at: start }, &[&seller])?;

        let buyer_count = samples.saturating_sub(options.buyer_shortfall).max(1);
        d.submit(TxPayload::Meter { sid: sid.clone(), count: samples, at: end }, &[&seller])?;
        d.submit(TxPayload::Meter { sid: sid.clone(), count: buyer_count, at: end }, &[&buyer])?;

        let settle = |feedback| TxPayload::Settle {
            sid: sid.clone(),
            count: None,
            feedback,
            at: end,
        };
        let mut record = TradeRecord {
            demand: a.demand,
            device: device.id.clone(),
            sid: sid.clone(),
            samples,
            unit_price,
            outcome: None,
            violation: None,
        };
        if options.seller_no_show {
            d.submit(settle(options.buyer_feedback), &[&buyer])?;
            let r = d.submit(TxPayload::Timeout { sid: sid.clone(), at: end + window }, &[&buyer])?;
            if let TxReceipt::TimedOut { violation } = r {
                record.violation = Some(violation);
            }
        } else {
            d.submit(settle(options.seller_feedback), &[&seller])?;
            let r = d.submit(settle(options.buyer_feedback), &[&buyer])?;
            if let TxReceipt::Settled { outcome } = r {
                if let Some(inv) = outcome.invoice {
                    revenue += inv;
                }
                record.outcome = Some(outcome);
            }
        }
        trades.push(record);
    }

    for (actor, change) in &mut reputation {
        change.after = d.ledger.state().reputation.score(actor).unwrap_or_default();
    }
    let ledger = d.ledger;
    Ok((
        TradeTranscript {
            seed,
            plan_revenue: report.plan.revenue,
            revenue,
            trades,
            reputation,
            log_length: ledger.log().len(),
            log_head: ledger.chain().head(),
            state_digest: ledger.digest(),
        },
        ledger,
    ))
}
