use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::LedgerConfig;
use crate::model::{ActorId, DataType};
use crate::pricing::PriceLedger;
use crate::reputation::{RatingOutcome, ReputationStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubscriptionStatus {
    Pending,
    Active,
    Settled,
    Deleted,
    Disputed,
}

impl SubscriptionStatus {
    pub const ALL: [SubscriptionStatus; 5] = [
        SubscriptionStatus::Pending,
        SubscriptionStatus::Active,
        SubscriptionStatus::Settled,
        SubscriptionStatus::Deleted,
        SubscriptionStatus::Disputed,
    ];

    /// The lifecycle edges a subscription may take.
    pub fn can_become(self, next: SubscriptionStatus) -> bool {
        use SubscriptionStatus::*;
        matches!(
            (self, next),
            (Pending, Active) | (Active, Settled) | (Active, Disputed) | (Settled, Deleted) | (Disputed, Deleted)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractEntry {
    pub cid: String,
    pub creator: ActorId,
    pub seller: ActorId,
    pub buyer: ActorId,
    pub seller_key: String,
    pub buyer_key: String,
    pub dsc_address: String,
    pub abis: Vec<String>,
}

impl ContractEntry {
    pub fn is_party(&self, actor: &ActorId) -> bool {
        &self.seller == actor || &self.buyer == actor
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettleClaim {
    pub count: u64,
    /// Feedback this party gives its counterparty.
    pub feedback: f64,
    pub at: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subscription {
    pub sid: String,
    pub cid: String,
    pub seller: ActorId,
    pub buyer: ActorId,
    pub device_hash: String,
    pub data_type: DataType,
    pub start_time: i64,
    pub periodicity: f64,
    pub duration: f64,
    pub quality_score: f64,
    pub risk_score: f64,
    pub unit_price: f64,
    pub total_cost: f64,
    pub payment_granularity: u64,
    pub status: SubscriptionStatus,
    pub negotiation_info: String,
    pub session_token: Option<String>,
    pub seller_meter: Option<u64>,
    pub buyer_meter: Option<u64>,
    pub seller_claim: Option<SettleClaim>,
    pub buyer_claim: Option<SettleClaim>,
}

impl Subscription {
    pub fn is_party(&self, actor: &ActorId) -> bool {
        &self.seller == actor || &self.buyer == actor
    }

    pub(crate) fn set_status(&mut self, next: SubscriptionStatus) {
        assert!(
            self.status.can_become(next),
            "illegal subscription transition {:?} -> {:?}",
            self.status,
            next
        );
        self.status = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    Agreed,
    ResolvedForSeller,
    ResolvedForBuyer,
    Escrowed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettlementOutcome {
    pub sid: String,
    pub seller_count: u64,
    pub buyer_count: u64,
    pub resolution: Resolution,
    pub invoice: Option<f64>,
    pub payment_released: bool,
    /// Score movement from the post-settlement rating, when one happened.
    pub rating: Option<RatingOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Payment {
    pub sid: String,
    pub from: ActorId,
    pub to: ActorId,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub sid: String,
    pub actor: ActorId,
    pub at: i64,
    pub score_before: f64,
    pub score_after: f64,
}

/// Everything the ledger materializes from its log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerState {
    pub config: LedgerConfig,
    /// Device hash to owning seller.
    pub devices: BTreeMap<String, ActorId>,
    pub contracts: BTreeMap<String, ContractEntry>,
    pub retired_contracts: BTreeSet<String>,
    /// Live subscriptions.
    pub subscriptions: BTreeMap<String, Subscription>,
    /// Deleted subscriptions.
    pub history: BTreeMap<String, Subscription>,
    pub settlements: BTreeMap<String, SettlementOutcome>,
    pub payments: Vec<Payment>,
    pub violations: Vec<ViolationRecord>,
    pub prices: PriceLedger,
    pub reputation: ReputationStore,
    pub next_contract: u64,
    pub next_subscription: u64,
}

impl LedgerState {
    pub fn new(config: LedgerConfig) -> Self {
        Self {
            reputation: ReputationStore::new(config.reputation),
            config,
            devices: BTreeMap::new(),
            contracts: BTreeMap::new(),
            retired_contracts: BTreeSet::new(),
            subscriptions: BTreeMap::new(),
            history: BTreeMap::new(),
            settlements: BTreeMap::new(),
            payments: Vec::new(),
            violations: Vec::new(),
            prices: PriceLedger::new(),
            next_contract: 0,
            next_subscription: 0,
        }
    }

    pub fn subscription(&self, sid: &str) -> Option<&Subscription> {
        self.subscriptions.get(sid)
    }

    pub fn total_payments(&self) -> f64 {
        self.payments.iter().map(|p| p.amount).sum()
    }

    pub fn total_invoices(&self) -> f64 {
        self.settlements.values().filter_map(|s| s.invoice).sum()
    }

    /// Hex SHA-256 over the canonical JSON encoding of the state.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = serde_json::to_vec(self).expect("state serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
