//! In-process subscription ledger.
//!
//! A single sequential writer applies signed transactions to a materialized
//! state and appends every accepted write to a hash-chained log. Each
//! transaction is applied to a copy of the state, so a rejected transaction
//! leaves no trace. Reads go through [`Ledger::query`] or a [`Snapshot`] and
//! are never logged.
//!
//! Lifecycle of a subscription:
//!
//! ```text
//! Pending --start--> Active --settle--> Settled --delete--> Deleted
//!                       \--settle (tie) / timeout--> Disputed
//! ```

mod auth;
mod chain;
mod script;
mod state;
mod tx;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{samples_for, ActorId};
use crate::pricing::{PriceRecord, PricingError};
use crate::reputation::{RatingEvent, ReputationConfig, ReputationError};

pub use auth::{fingerprint, Attestation, KeyRing};
pub use chain::{entry_hash, Chain, ChainError, LogEntry, GENESIS};
pub use script::{run_script, Script, ScriptStep, StepResult, Transcript};
pub use state::{
    ContractEntry, LedgerState, Payment, Resolution, SettleClaim, SettlementOutcome, Subscription,
    SubscriptionStatus, ViolationRecord,
};
pub use tx::{payload_hash, LedgerTx, SubscriptionTerms, TxKind, TxPayload};

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("payload hash does not match payload")]
    HashMismatch,
    #[error("invalid signature from {0}")]
    BadSignature(ActorId),
    #[error("{0:?} needs exactly one signature")]
    Unisig(TxKind),
    #[error("multisig required: {0:?} must be signed by both seller and buyer")]
    MultisigRequired(TxKind),
    #[error("{op:?} can only be issued by the {role}")]
    WrongSigner { op: TxKind, role: &'static str },
    #[error("{0} is not a party to this entry")]
    NotAParty(ActorId),
    #[error("unknown DSC {0}")]
    UnknownContract(String),
    #[error("duplicate DSC between {seller} and {buyer}")]
    DuplicateContract { seller: ActorId, buyer: ActorId },
    #[error("seller and buyer must differ")]
    SameParties,
    #[error("subscription {0} not found")]
    UnknownSubscription(String),
    #[error("device {0} is already registered")]
    DuplicateDevice(String),
    #[error("device {0} is not registered to the seller")]
    UnregisteredDevice(String),
    #[error("invalid subscription terms: {0}")]
    InvalidTerms(String),
    #[error("subscription {sid} is {status:?}, {op:?} is not allowed")]
    WrongState {
        sid: String,
        status: SubscriptionStatus,
        op: TxKind,
    },
    #[error("subscription {sid} starts at {start_time}, start requested at {at}")]
    TooEarly { sid: String, start_time: i64, at: i64 },
    #[error("contract {0} still has live subscriptions")]
    LiveSubscriptions(String),
    #[error("feedback must lie strictly inside (0, 1), got {0}")]
    FeedbackOutOfRange(f64),
    #[error("no sample count given and no meter reading on record")]
    MissingCount,
    #[error("sample count must be at least 1")]
    ZeroCount,
    #[error("{0} has already settled")]
    AlreadySettled(ActorId),
    #[error("settlement window is open until {deadline}")]
    WindowOpen { deadline: i64 },
    #[error("timeout needs the caller to have settled and the counterparty not to have")]
    NothingToTimeOut,
    #[error("{0:?} is a read; use query")]
    ReadNotWrite(TxKind),
    #[error("{0:?} is a write; use submit")]
    WriteNotRead(TxKind),
    #[error("log entry {seq} was rejected on replay: {source}")]
    Replay {
        seq: u64,
        #[source]
        source: Box<LedgerError>,
    },
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Pricing(#[from] PricingError),
    #[error(transparent)]
    Reputation(#[from] ReputationError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LedgerConfig {
    /// How long a settled party waits for its counterparty before a timeout
    /// can be claimed, in seconds.
    pub settle_window_secs: i64,
    pub reputation: ReputationConfig,
    /// Starting scores for actors first seen by the ledger. Others start at
    /// the reputation default.
    pub initial_scores: BTreeMap<ActorId, f64>,
}

impl Default for LedgerConfig {
    fn default() -> Self {
        Self {
            settle_window_secs: 3600,
            reputation: ReputationConfig::default(),
            initial_scores: BTreeMap::new(),
        }
    }
}

/// Result of an accepted write.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TxReceipt {
    DeviceRegistered { device_hash: String },
    ContractCreated { contract: ContractEntry },
    ContractRemoved { cid: String },
    SubscriptionAdded { subscription: Subscription, price_record: usize },
    SessionStarted { sid: String, session_token: String },
    Metered { sid: String, actor: ActorId, count: u64 },
    SettleRecorded { sid: String, waiting_for: ActorId },
    Settled { outcome: SettlementOutcome },
    TimedOut { violation: ViolationRecord },
    Deleted { sid: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QueryResult {
    Contract { contract: ContractEntry },
    Subscription { subscription: Subscription },
}

/// Read-only view of the ledger at one point in the log.
#[derive(Debug, Clone)]
pub struct Snapshot {
    keys: Arc<KeyRing>,
    state: Arc<LedgerState>,
}

impl Snapshot {
    pub fn state(&self) -> &LedgerState {
        &self.state
    }

    pub fn query(&self, tx: &LedgerTx) -> Result<QueryResult, LedgerError> {
        if !tx.payload.is_read() {
            return Err(LedgerError::WriteNotRead(tx.kind()));
        }
        let signer = single_signer(&self.keys, tx)?;
        match &tx.payload {
            TxPayload::Get { cid } => {
                let c = self
                    .state
                    .contracts
                    .get(cid)
                    .ok_or_else(|| LedgerError::UnknownContract(cid.clone()))?;
                if !c.is_party(&signer) {
                    return Err(LedgerError::NotAParty(signer));
                }
                Ok(QueryResult::Contract { contract: c.clone() })
            }
            TxPayload::Info { sid } => {
                let s = self
                    .state
                    .subscriptions
                    .get(sid)
                    .ok_or_else(|| LedgerError::UnknownSubscription(sid.clone()))?;
                if !s.is_party(&signer) {
                    return Err(LedgerError::NotAParty(signer));
                }
                Ok(QueryResult::Subscription {
                    subscription: s.clone(),
                })
            }
            _ => unreachable!(),
        }
    }
}

/// Checks the payload hash and every attestation, returning the signers.
fn verified_signers(keys: &KeyRing, tx: &LedgerTx) -> Result<Vec<ActorId>, LedgerError> {
    if !tx.hash_matches() {
        return Err(LedgerError::HashMismatch);
    }
    let bytes = tx.payload.to_bytes();
    let mut out = Vec::with_capacity(tx.signatures.len());
    for att in &tx.signatures {
        if !keys.verify(att, &bytes) {
            return Err(LedgerError::BadSignature(att.signer.clone()));
        }
        if !out.contains(&att.signer) {
            out.push(att.signer.clone());
        }
    }
    Ok(out)
}

fn single_signer(keys: &KeyRing, tx: &LedgerTx) -> Result<ActorId, LedgerError> {
    let signers = verified_signers(keys, tx)?;
    match (signers.len(), tx.signatures.len()) {
        (1, 1) => Ok(signers.into_iter().next().unwrap()),
        _ => Err(LedgerError::Unisig(tx.kind())),
    }
}

fn dual_signed(keys: &KeyRing, tx: &LedgerTx, seller: &ActorId, buyer: &ActorId) -> Result<(), LedgerError> {
    let signers = verified_signers(keys, tx)?;
    if tx.signatures.len() == 2 && signers.contains(seller) && signers.contains(buyer) {
        Ok(())
    } else {
        Err(LedgerError::MultisigRequired(tx.kind()))
    }
}

fn session_token(sid: &str, payload_hash: &str) -> String {
    let mut h = Sha256::new();
    h.update(b"session\0");
    h.update(sid.as_bytes());
    h.update(b"\0");
    h.update(payload_hash.as_bytes());
    hex::encode(h.finalize())
}

fn validate_terms(t: &SubscriptionTerms) -> Result<u64, LedgerError> {
    let bad = |m: String| Err(LedgerError::InvalidTerms(m));
    if !(t.periodicity.is_finite() && t.periodicity > 0.0) {
        return bad(format!("periodicity must be positive, got {}", t.periodicity));
    }
    if !(t.duration.is_finite() && t.duration > 0.0) {
        return bad(format!("duration must be positive, got {}", t.duration));
    }
    for (name, v) in [("quality_score", t.quality_score), ("risk_score", t.risk_score)] {
        if !(0.0..=1.0).contains(&v) {
            return bad(format!("{name} must lie in [0, 1], got {v}"));
        }
    }
    if !(t.unit_price.is_finite() && t.unit_price > 0.0) {
        return bad(format!("unit price must be positive, got {}", t.unit_price));
    }
    match t.payment_granularity {
        Some(0) => bad("payment granularity must be at least 1".into()),
        Some(n) => Ok(n),
        None => samples_for(t.duration, t.periodicity).map_err(|e| LedgerError::InvalidTerms(e.to_string())),
    }
}

fn register_actor(state: &mut LedgerState, actor: &ActorId) {
    let seed = state.config.initial_scores.get(actor).copied();
    state.reputation.register_with_score(actor, seed);
}

fn live_subscription<'a>(
    state: &'a mut LedgerState,
    sid: &str,
) -> Result<&'a mut Subscription, LedgerError> {
    state
        .subscriptions
        .get_mut(sid)
        .ok_or_else(|| LedgerError::UnknownSubscription(sid.to_string()))
}

fn require_status(sub: &Subscription, status: SubscriptionStatus, op: TxKind) -> Result<(), LedgerError> {
    if sub.status == status {
        Ok(())
    } else {
        Err(LedgerError::WrongState {
            sid: sub.sid.clone(),
            status: sub.status,
            op,
        })
    }
}

fn apply(keys: &KeyRing, state: &mut LedgerState, tx: &LedgerTx) -> Result<TxReceipt, LedgerError> {
    let kind = tx.kind();
    match &tx.payload {
        TxPayload::Get { .. } | TxPayload::Info { .. } => Err(LedgerError::ReadNotWrite(kind)),

        TxPayload::RegisterDevice { seller, device_hash, .. } => {
            if &single_signer(keys, tx)? != seller {
                return Err(LedgerError::WrongSigner { op: kind, role: "seller" });
            }
            if state.devices.contains_key(device_hash) {
                return Err(LedgerError::DuplicateDevice(device_hash.clone()));
            }
            state.devices.insert(device_hash.clone(), seller.clone());
            register_actor(state, seller);
            Ok(TxReceipt::DeviceRegistered {
                device_hash: device_hash.clone(),
            })
        }

        TxPayload::Create {
            dsc_address,
            abis,
            seller,
            buyer,
            ..
        } => {
            if seller == buyer {
                return Err(LedgerError::SameParties);
            }
            dual_signed(keys, tx, seller, buyer)?;
            let dup = state
                .contracts
                .values()
                .any(|c| (&c.seller == seller && &c.buyer == buyer) || &c.dsc_address == dsc_address);
            if dup {
                return Err(LedgerError::DuplicateContract {
                    seller: seller.clone(),
                    buyer: buyer.clone(),
                });
            }
            let cid = format!("cid-{:06}", state.next_contract);
            state.next_contract += 1;
            let key = |a: &ActorId| keys.public_key(a).unwrap_or_default();
            let entry = ContractEntry {
                cid: cid.clone(),
                creator: tx.signatures[0].signer.clone(),
                seller: seller.clone(),
                buyer: buyer.clone(),
                seller_key: key(seller),
                buyer_key: key(buyer),
                dsc_address: dsc_address.clone(),
                abis: abis.clone(),
            };
            state.contracts.insert(cid, entry.clone());
            register_actor(state, seller);
            register_actor(state, buyer);
            Ok(TxReceipt::ContractCreated { contract: entry })
        }

        TxPayload::Remove { cid, .. } => {
            let c = state
                .contracts
                .get(cid)
                .ok_or_else(|| LedgerError::UnknownContract(cid.clone()))?;
            dual_signed(keys, tx, &c.seller, &c.buyer)?;
            if state.subscriptions.values().any(|s| &s.cid == cid) {
                return Err(LedgerError::LiveSubscriptions(cid.clone()));
            }
            state.contracts.remove(cid);
            state.retired_contracts.insert(cid.clone());
            Ok(TxReceipt::ContractRemoved { cid: cid.clone() })
        }

        TxPayload::Add { cid, buyer, terms, at } => {
            let signer = single_signer(keys, tx)?;
            let c = state
                .contracts
                .get(cid)
                .ok_or_else(|| LedgerError::UnknownContract(cid.clone()))?;
            if signer != c.seller {
                return Err(LedgerError::WrongSigner { op: kind, role: "seller" });
            }
            if buyer != &c.buyer {
                return Err(LedgerError::NotAParty(buyer.clone()));
            }
            if state.devices.get(&terms.device_hash) != Some(&c.seller) {
                return Err(LedgerError::UnregisteredDevice(terms.device_hash.clone()));
            }
            let granularity = validate_terms(terms)?;
            let (seller, buyer) = (c.seller.clone(), c.buyer.clone());
            let price_record = state.prices.record_price(PriceRecord {
                timestamp: *at,
                data_type: terms.data_type,
                price: terms.unit_price,
                quality_score: terms.quality_score,
                risk_score: terms.risk_score,
            })?;
            let sid = format!("sid-{:06}", state.next_subscription);
            state.next_subscription += 1;
            let sub = Subscription {
                sid: sid.clone(),
                cid: cid.clone(),
                seller,
                buyer,
                device_hash: terms.device_hash.clone(),
                data_type: terms.data_type,
                start_time: terms.start_time,
                periodicity: terms.periodicity,
                duration: terms.duration,
                quality_score: terms.quality_score,
                risk_score: terms.risk_score,
                unit_price: terms.unit_price,
                total_cost: granularity as f64 * terms.unit_price,
                payment_granularity: granularity,
                status: SubscriptionStatus::Pending,
                negotiation_info: terms.negotiation_info.clone(),
                session_token: None,
                seller_meter: None,
                buyer_meter: None,
                seller_claim: None,
                buyer_claim: None,
            };
            state.subscriptions.insert(sid, sub.clone());
            Ok(TxReceipt::SubscriptionAdded {
                subscription: sub,
                price_record,
            })
        }

        TxPayload::Start { sid, at } => {
            let signer = single_signer(keys, tx)?;
            let sub = live_subscription(state, sid)?;
            if signer != sub.seller {
                return Err(LedgerError::WrongSigner { op: kind, role: "seller" });
            }
            require_status(sub, SubscriptionStatus::Pending, kind)?;
            if *at < sub.start_time {
                return Err(LedgerError::TooEarly {
                    sid: sid.clone(),
                    start_time: sub.start_time,
                    at: *at,
                });
            }
            let token = session_token(sid, &tx.payload_hash);
            sub.session_token = Some(token.clone());
            sub.set_status(SubscriptionStatus::Active);
            Ok(TxReceipt::SessionStarted {
                sid: sid.clone(),
                session_token: token,
            })
        }

        TxPayload::Meter { sid, count, .. } => {
            let signer = single_signer(keys, tx)?;
            let sub = live_subscription(state, sid)?;
            if !sub.is_party(&signer) {
                return Err(LedgerError::NotAParty(signer));
            }
            require_status(sub, SubscriptionStatus::Active, kind)?;
            let (meter, claim) = if signer == sub.seller {
                (&mut sub.seller_meter, &sub.seller_claim)
            } else {
                (&mut sub.buyer_meter, &sub.buyer_claim)
            };
            if claim.is_some() {
                return Err(LedgerError::AlreadySettled(signer));
            }
            *meter = Some(*count);
            Ok(TxReceipt::Metered {
                sid: sid.clone(),
                actor: signer,
                count: *count,
            })
        }

        TxPayload::Settle { sid, count, feedback, at } => {
            let signer = single_signer(keys, tx)?;
            let sub = live_subscription(state, sid)?;
            if !sub.is_party(&signer) {
                return Err(LedgerError::NotAParty(signer));
            }
            require_status(sub, SubscriptionStatus::Active, kind)?;
            if !(*feedback > 0.0 && *feedback < 1.0) {
                return Err(LedgerError::FeedbackOutOfRange(*feedback));
            }
            let is_seller = signer == sub.seller;
            let (meter, claim) = if is_seller {
                (sub.seller_meter, &mut sub.seller_claim)
            } else {
                (sub.buyer_meter, &mut sub.buyer_claim)
            };
            if claim.is_some() {
                return Err(LedgerError::AlreadySettled(signer));
            }
            let count = count.or(meter).ok_or(LedgerError::MissingCount)?;
            if count == 0 {
                return Err(LedgerError::ZeroCount);
            }
            *claim = Some(SettleClaim {
                count,
                feedback: *feedback,
                at: *at,
            });
            let (Some(s), Some(b)) = (sub.seller_claim.clone(), sub.buyer_claim.clone()) else {
                let waiting_for = if is_seller { sub.buyer.clone() } else { sub.seller.clone() };
                return Ok(TxReceipt::SettleRecorded {
                    sid: sid.clone(),
                    waiting_for,
                });
            };
            settle(state, sid, s, b, *at)
        }

        TxPayload::Timeout { sid, at } => {
            let signer = single_signer(keys, tx)?;
            let window = state.config.settle_window_secs;
            let sub = live_subscription(state, sid)?;
            if !sub.is_party(&signer) {
                return Err(LedgerError::NotAParty(signer));
            }
            require_status(sub, SubscriptionStatus::Active, kind)?;
            let (own, other, absent) = if signer == sub.seller {
                (&sub.seller_claim, &sub.buyer_claim, sub.buyer.clone())
            } else {
                (&sub.buyer_claim, &sub.seller_claim, sub.seller.clone())
            };
            let (Some(own), None) = (own, other) else {
                return Err(LedgerError::NothingToTimeOut);
            };
            let deadline = own.at.saturating_add(window);
            if *at < deadline {
                return Err(LedgerError::WindowOpen { deadline });
            }
            sub.set_status(SubscriptionStatus::Disputed);
            let score_before = state.reputation.score(&absent).unwrap_or(state.config.reputation.initial_score);
            let score_after = state.reputation.apply_violation(&absent, *at)?.score;
            let violation = ViolationRecord {
                sid: sid.clone(),
                actor: absent,
                at: *at,
                score_before,
                score_after,
            };
            state.violations.push(violation.clone());
            Ok(TxReceipt::TimedOut { violation })
        }

        TxPayload::Delete { sid, .. } => {
            let signer = single_signer(keys, tx)?;
            let sub = live_subscription(state, sid)?;
            if signer != sub.seller {
                return Err(LedgerError::WrongSigner { op: kind, role: "seller" });
            }
            require_status(sub, SubscriptionStatus::Settled, kind)?;
            let mut sub = state.subscriptions.remove(sid).expect("checked above");
            sub.set_status(SubscriptionStatus::Deleted);
            state.history.insert(sid.clone(), sub);
            Ok(TxReceipt::Deleted { sid: sid.clone() })
        }
    }
}

fn settle(
    state: &mut LedgerState,
    sid: &str,
    seller_claim: SettleClaim,
    buyer_claim: SettleClaim,
    at: i64,
) -> Result<TxReceipt, LedgerError> {
    let sub = state.subscriptions.get(sid).expect("live subscription");
    let (seller, buyer, unit_price) = (sub.seller.clone(), sub.buyer.clone(), sub.unit_price);
    let resolved = if seller_claim.count == buyer_claim.count {
        Some((Resolution::Agreed, seller_claim.count))
    } else {
        let rs = state.reputation.score(&seller).unwrap_or(state.config.reputation.initial_score);
        let rb = state.reputation.score(&buyer).unwrap_or(state.config.reputation.initial_score);
        if rs > rb {
            Some((Resolution::ResolvedForSeller, seller_claim.count))
        } else if rb > rs {
            Some((Resolution::ResolvedForBuyer, buyer_claim.count))
        } else {
            None
        }
    };
    let outcome = match resolved {
        Some((resolution, count)) => {
            let invoice = count as f64 * unit_price;
            let rating = state.reputation.apply_rating(&RatingEvent {
                actor_i: seller.clone(),
                actor_j: buyer.clone(),
                t_value: invoice,
                feedback_i: buyer_claim.feedback,
                feedback_j: seller_claim.feedback,
                event_time: at,
            })?;
            state.payments.push(Payment {
                sid: sid.to_string(),
                from: buyer,
                to: seller,
                amount: invoice,
            });
            SettlementOutcome {
                sid: sid.to_string(),
                seller_count: seller_claim.count,
                buyer_count: buyer_claim.count,
                resolution,
                invoice: Some(invoice),
                payment_released: true,
                rating: Some(rating),
            }
        }
        None => SettlementOutcome {
            sid: sid.to_string(),
            seller_count: seller_claim.count,
            buyer_count: buyer_claim.count,
            resolution: Resolution::Escrowed,
            invoice: None,
            payment_released: false,
            rating: None,
        },
    };
    let next = if outcome.payment_released {
        SubscriptionStatus::Settled
    } else {
        SubscriptionStatus::Disputed
    };
    state
        .subscriptions
        .get_mut(sid)
        .expect("live subscription")
        .set_status(next);
    state.settlements.insert(sid.to_string(), outcome.clone());
    Ok(TxReceipt::Settled { outcome })
}

/// Sequential ledger: materialized state plus its hash-chained log.
#[derive(Debug, Clone)]
pub struct Ledger {
    keys: Arc<KeyRing>,
    state: Arc<LedgerState>,
    chain: Chain,
}

impl Ledger {
    pub fn new(keys: KeyRing, config: LedgerConfig) -> Self {
        Self {
            keys: Arc::new(keys),
            state: Arc::new(LedgerState::new(config)),
            chain: Chain::new(),
        }
    }

    pub fn keys(&self) -> &KeyRing {
        &self.keys
    }

    pub fn state(&self) -> &LedgerState {
        &self.state
    }

    pub fn log(&self) -> &[LogEntry] {
        self.chain.entries()
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn digest(&self) -> String {
        self.state.digest()
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            keys: Arc::clone(&self.keys),
            state: Arc::clone(&self.state),
        }
    }

    /// Applies a write. On error the ledger is unchanged.
    pub fn submit(&mut self, tx: LedgerTx) -> Result<TxReceipt, LedgerError> {
        let mut next = LedgerState::clone(&self.state);
        let receipt = apply(&self.keys, &mut next, &tx)?;
        self.state = Arc::new(next);
        self.chain.append(tx);
        Ok(receipt)
    }

    pub fn query(&self, tx: &LedgerTx) -> Result<QueryResult, LedgerError> {
        self.snapshot().query(tx)
    }

    /// Deleted subscriptions, which reads through `Info` no longer see.
    pub fn history(&self, sid: &str) -> Option<&Subscription> {
        self.state.history.get(sid)
    }

    /// Rebuilds a ledger from a log, checking the chain first and requiring
    /// every logged transaction to be accepted again.
    pub fn replay(keys: KeyRing, config: LedgerConfig, entries: &[LogEntry]) -> Result<Self, LedgerError> {
        Chain::verify(entries)?;
        let mut ledger = Self::new(keys, config);
        for e in entries {
            ledger.submit(e.tx.clone()).map_err(|source| LedgerError::Replay {
                seq: e.seq,
                source: Box::new(source),
            })?;
        }
        Ok(ledger)
    }
}

/// A ledger shared between threads. Writers are serialized by a lock; readers
/// take a snapshot and never block writers for longer than an `Arc` clone.
#[derive(Debug, Clone)]
pub struct SharedLedger {
    inner: Arc<Mutex<Ledger>>,
}

impl SharedLedger {
    pub fn new(ledger: Ledger) -> Self {
        Self {
            inner: Arc::new(Mutex::new(ledger)),
        }
    }

    pub fn submit(&self, tx: LedgerTx) -> Result<TxReceipt, LedgerError> {
        self.inner.lock().unwrap_or_else(|p| p.into_inner()).submit(tx)
    }

    pub fn snapshot(&self) -> Snapshot {
        self.inner.lock().unwrap_or_else(|p| p.into_inner()).snapshot()
    }

    pub fn into_inner(self) -> Ledger {
        match Arc::try_unwrap(self.inner) {
            Ok(m) => m.into_inner().unwrap_or_else(|p| p.into_inner()),
            Err(shared) => shared.lock().unwrap_or_else(|p| p.into_inner()).clone(),
        }
    }
}
