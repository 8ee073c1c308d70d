//! Transaction scripts: a key table plus an ordered list of payloads, each
//! with the actors who sign it.
//!
//! ```json
//! {
//!   "keys": { "seller": "s-secret", "buyer": "b-secret" },
//!   "steps": [
//!     { "signers": ["seller"],
//!       "tx": { "kind": "register_device", "seller": "seller",
//!               "device_hash": "ab12", "at": 0 } }
//!   ]
//! }
//! ```
//!
//! Rejected steps are recorded in the transcript and do not stop the run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{KeyRing, Ledger, LedgerConfig, LedgerTx, QueryResult, TxKind, TxPayload, TxReceipt};
use crate::model::ActorId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptStep {
    pub signers: Vec<ActorId>,
    pub tx: TxPayload,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Script {
    #[serde(default)]
    pub config: LedgerConfig,
    pub keys: BTreeMap<ActorId, String>,
    pub steps: Vec<ScriptStep>,
}

impl Script {
    pub fn key_ring(&self) -> KeyRing {
        let mut ring = KeyRing::new();
        for (actor, secret) in &self.keys {
            ring.insert(actor.clone(), secret.as_bytes().to_vec());
        }
        ring
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub index: usize,
    pub kind: TxKind,
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub receipt: Option<TxReceipt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<QueryResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub steps: Vec<StepResult>,
    pub log_length: usize,
    pub log_head: String,
    pub state_digest: String,
}

pub fn run_script(script: &Script) -> (Ledger, Transcript) {
    let keys = script.key_ring();
    let mut ledger = Ledger::new(keys, script.config.clone());
    let mut steps = Vec::with_capacity(script.steps.len());
    for (index, step) in script.steps.iter().enumerate() {
        let mut tx = LedgerTx::new(step.tx.clone());
        for s in &step.signers {
            tx = tx.signed_by(ledger.keys(), s);
        }
        let kind = tx.kind();
        let mut result = StepResult {
            index,
            kind,
            accepted: false,
            receipt: None,
            query: None,
            error: None,
        };
        if tx.payload.is_read() {
            match ledger.query(&tx) {
                Ok(q) => {
                    result.accepted = true;
                    result.query = Some(q);
                }
                Err(e) => result.error = Some(e.to_string()),
            }
        } else {
            match ledger.submit(tx) {
                Ok(r) => {
                    result.accepted = true;
                    result.receipt = Some(r);
                }
                Err(e) => result.error = Some(e.to_string()),
            }
        }
        steps.push(result);
    }
    let transcript = Transcript {
        steps,
        log_length: ledger.log().len(),
        log_head: ledger.chain().head(),
        state_digest: ledger.digest(),
    };
    (ledger, transcript)
}
