//! Append-only, hash-chained transaction log.
//!
//! Entry `k` (counting from 0) stores
//!
//! ```text
//! hash_k = SHA-256( prev_k || be_u64(k) || tx_json_k )
//! ```
//!
//! where `prev_0` is 32 zero bytes, `prev_k = hash_{k-1}` for `k > 0`, and
//! `tx_json_k` is the compact JSON encoding of the accepted transaction. Both
//! digests are stored hex-encoded. On disk the log is one JSON entry per line.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::tx::LedgerTx;

pub const GENESIS: [u8; 32] = [0u8; 32];

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("entry {index}: sequence number {found}, expected {index}")]
    Sequence { index: usize, found: u64 },
    #[error("entry {seq}: previous-hash link broken")]
    BrokenLink { seq: u64 },
    #[error("entry {seq}: stored hash does not match contents")]
    BadHash { seq: u64 },
    #[error("log line {line}: {source}")]
    Decode {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub seq: u64,
    pub prev_hash: String,
    pub tx: LedgerTx,
    pub hash: String,
}

pub fn entry_hash(prev: &[u8], seq: u64, tx: &LedgerTx) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(prev);
    h.update(seq.to_be_bytes());
    h.update(serde_json::to_vec(tx).expect("tx serializes"));
    h.finalize().into()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Chain {
    entries: Vec<LogEntry>,
}

impl Chain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Hex digest of the last entry, or of the genesis block.
    pub fn head(&self) -> String {
        self.entries
            .last()
            .map(|e| e.hash.clone())
            .unwrap_or_else(|| hex::encode(GENESIS))
    }

    pub fn append(&mut self, tx: LedgerTx) -> &LogEntry {
        let prev = match self.entries.last() {
            Some(e) => hex::decode(&e.hash).expect("own hashes are hex"),
            None => GENESIS.to_vec(),
        };
        let seq = self.entries.len() as u64;
        let hash = entry_hash(&prev, seq, &tx);
        self.entries.push(LogEntry {
            seq,
            prev_hash: hex::encode(&prev),
            tx,
            hash: hex::encode(hash),
        });
        self.entries.last().unwrap()
    }

    /// Checks sequence numbers, links and digests of a foreign log.
    pub fn verify(entries: &[LogEntry]) -> Result<(), ChainError> {
        let mut prev = hex::encode(GENESIS);
        for (index, e) in entries.iter().enumerate() {
            if e.seq != index as u64 {
                return Err(ChainError::Sequence { index, found: e.seq });
            }
            if e.prev_hash != prev {
                return Err(ChainError::BrokenLink { seq: e.seq });
            }
            let raw = hex::decode(&e.prev_hash).map_err(|_| ChainError::BrokenLink { seq: e.seq })?;
            if hex::encode(entry_hash(&raw, e.seq, &e.tx)) != e.hash {
                return Err(ChainError::BadHash { seq: e.seq });
            }
            prev = e.hash.clone();
        }
        Ok(())
    }

    pub fn write_ndjson<W: Write>(&self, mut w: W) -> Result<(), ChainError> {
        for e in &self.entries {
            serde_json::to_writer(&mut w, e).map_err(std::io::Error::other)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_ndjson<R: BufRead>(r: R) -> Result<Vec<LogEntry>, ChainError> {
        let mut out = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let e = serde_json::from_str(&line).map_err(|source| ChainError::Decode { line: i + 1, source })?;
            out.push(e);
        }
        Ok(out)
    }
}
