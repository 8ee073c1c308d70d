use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::auth::{Attestation, KeyRing};
use crate::model::{ActorId, DataType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TxKind {
    RegisterDevice,
    Create,
    Remove,
    Get,
    Add,
    Info,
    Start,
    Meter,
    Settle,
    Timeout,
    Delete,
}

/// Terms of a new subscription as proposed by the seller. Times are epoch
/// seconds, `periodicity` and `duration` are seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubscriptionTerms {
    pub device_hash: String,
    pub data_type: DataType,
    pub start_time: i64,
    pub periodicity: f64,
    pub duration: f64,
    pub quality_score: f64,
    pub risk_score: f64,
    pub unit_price: f64,
    /// Samples per settlement; defaults to the whole subscription.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payment_granularity: Option<u64>,
    #[serde(default)]
    pub negotiation_info: String,
}

/// Transaction bodies. Every write carries the submission time `at`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TxPayload {
    /// Seller publishes the hash of a device identifier it owns.
    RegisterDevice {
        seller: ActorId,
        device_hash: String,
        at: i64,
    },
    /// Multisig: registers a seller-buyer subscription contract.
    Create {
        dsc_address: String,
        abis: Vec<String>,
        seller: ActorId,
        buyer: ActorId,
        at: i64,
    },
    /// Multisig: retires a contract once all its subscriptions are deleted.
    Remove { cid: String, at: i64 },
    Get { cid: String },
    Add {
        cid: String,
        buyer: ActorId,
        terms: SubscriptionTerms,
        at: i64,
    },
    Info { sid: String },
    Start { sid: String, at: i64 },
    /// Off-chain meter reading from one party.
    Meter { sid: String, count: u64, at: i64 },
    /// One party's settlement claim. Without a count, the party's last meter
    /// reading is used.
    Settle {
        sid: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        count: Option<u64>,
        feedback: f64,
        at: i64,
    },
    /// Claims that the counterparty never settled within the window.
    Timeout { sid: String, at: i64 },
    Delete { sid: String, at: i64 },
}

impl TxPayload {
    pub fn kind(&self) -> TxKind {
        match self {
            TxPayload::RegisterDevice { .. } => TxKind::RegisterDevice,
            TxPayload::Create { .. } => TxKind::Create,
            TxPayload::Remove { .. } => TxKind::Remove,
            TxPayload::Get { .. } => TxKind::Get,
            TxPayload::Add { .. } => TxKind::Add,
            TxPayload::Info { .. } => TxKind::Info,
            TxPayload::Start { .. } => TxKind::Start,
            TxPayload::Meter { .. } => TxKind::Meter,
            TxPayload::Settle { .. } => TxKind::Settle,
            TxPayload::Timeout { .. } => TxKind::Timeout,
            TxPayload::Delete { .. } => TxKind::Delete,
        }
    }

    /// Canonical byte encoding that hashes and signatures cover.
    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("payload serializes")
    }

    pub fn is_read(&self) -> bool {
        matches!(self, TxPayload::Get { .. } | TxPayload::Info { .. })
    }
}

pub fn payload_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerTx {
    pub payload: TxPayload,
    /// Hex SHA-256 of the canonical payload bytes (`Hash_data`).
    pub payload_hash: String,
    pub signatures: Vec<Attestation>,
}

impl LedgerTx {
    pub fn new(payload: TxPayload) -> Self {
        let payload_hash = payload_hash(&payload.to_bytes());
        Self {
            payload,
            payload_hash,
            signatures: Vec::new(),
        }
    }

    pub fn kind(&self) -> TxKind {
        self.payload.kind()
    }

    /// Adds `actor`'s attestation. Unknown actors leave the tx unsigned.
    pub fn signed_by(mut self, keys: &KeyRing, actor: &ActorId) -> Self {
        if let Some(att) = keys.sign(actor, &self.payload.to_bytes()) {
            self.signatures.push(att);
        }
        self
    }

    pub fn hash_matches(&self) -> bool {
        payload_hash(&self.payload.to_bytes()) == self.payload_hash
    }
}
