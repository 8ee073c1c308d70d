//! Keyed-digest attestations standing in for real signatures.
//!
//! An actor's attestation over a payload is `HMAC-SHA256(secret, payload)`.
//! The public key is a fingerprint of the secret, so it identifies the key
//! without revealing it. Verification needs the ledger's key ring.

use std::collections::BTreeMap;

use hmac::{Hmac, KeyInit, Mac};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::ActorId;

type HmacSha256 = Hmac<Sha256>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attestation {
    pub signer: ActorId,
    /// Hex fingerprint of the signer's key (`PU`).
    pub public_key: String,
    /// Hex keyed digest over the payload bytes (`Sig`).
    pub signature: String,
}

/// Hex fingerprint of a secret key.
pub fn fingerprint(secret: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(b"edsa-pk\0");
    h.update(secret);
    hex::encode(h.finalize())
}

fn mac(secret: &[u8]) -> HmacSha256 {
    // HMAC accepts keys of any length.
    <HmacSha256 as KeyInit>::new_from_slice(secret).expect("hmac key of any length")
}

/// Per-actor secret keys known to the ledger.
#[derive(Debug, Clone, Default)]
pub struct KeyRing {
    secrets: BTreeMap<ActorId, Vec<u8>>,
}

impl KeyRing {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, actor: ActorId, secret: impl Into<Vec<u8>>) {
        self.secrets.insert(actor, secret.into());
    }

    pub fn with(mut self, actor: impl Into<String>, secret: impl Into<Vec<u8>>) -> Self {
        self.insert(ActorId::new(actor), secret);
        self
    }

    pub fn contains(&self, actor: &ActorId) -> bool {
        self.secrets.contains_key(actor)
    }

    pub fn public_key(&self, actor: &ActorId) -> Option<String> {
        self.secrets.get(actor).map(|s| fingerprint(s))
    }

    pub fn sign(&self, actor: &ActorId, payload: &[u8]) -> Option<Attestation> {
        let secret = self.secrets.get(actor)?;
        let mut m = mac(secret);
        m.update(payload);
        Some(Attestation {
            signer: actor.clone(),
            public_key: fingerprint(secret),
            signature: hex::encode(m.finalize().into_bytes()),
        })
    }

    pub fn verify(&self, att: &Attestation, payload: &[u8]) -> bool {
        let Some(secret) = self.secrets.get(&att.signer) else {
            return false;
        };
        if att.public_key != fingerprint(secret) {
            return false;
        }
        let Ok(sig) = hex::decode(&att.signature) else {
            return false;
        };
        let mut m = mac(secret);
        m.update(payload);
        m.verify_slice(&sig).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_and_verify() {
        let ring = KeyRing::new().with("s", "alpha").with("b", "beta");
        let s = ActorId::new("s");
        let att = ring.sign(&s, b"payload").unwrap();
        assert!(ring.verify(&att, b"payload"));
        assert!(!ring.verify(&att, b"payloae"));

        let mut forged = att.clone();
        forged.signer = ActorId::new("b");
        assert!(!ring.verify(&forged, b"payload"));

        let mut flipped = att.clone();
        let last = flipped.signature.pop().unwrap();
        flipped.signature.push(if last == '0' { '1' } else { '0' });
        assert!(!ring.verify(&flipped, b"payload"));

        let mut junk = att;
        junk.signature = "zz".into();
        assert!(!ring.verify(&junk, b"payload"));
        assert!(ring.sign(&ActorId::new("nobody"), b"x").is_none());
    }
}
