//! Key files. Secret keys hold the 32-byte seed in hex; public keys carry a
//! human label that the verifier reports as the signer identity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::crypto::{PublicKey, SecretKey};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicKeyFile {
    pub label: String,
    pub public_key: PublicKey,
}

#[derive(Clone, Serialize, Deserialize)]
pub struct SecretKeyFile {
    pub label: String,
    seed: String,
    pub public_key: PublicKey,
}

impl std::fmt::Debug for SecretKeyFile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SecretKeyFile").field("label", &self.label).finish_non_exhaustive()
    }
}

impl SecretKeyFile {
    pub fn new(label: impl Into<String>, sk: &SecretKey) -> Self {
        SecretKeyFile { label: label.into(), seed: hex::encode(sk.seed()), public_key: sk.public_key() }
    }

    /// Re-derives the key and checks it against the stored public key.
    pub fn secret_key(&self) -> Result<SecretKey, String> {
        let seed: [u8; 32] =
            hex::decode(&self.seed).ok().and_then(|b| b.try_into().ok()).ok_or("seed must be 64 hex characters")?;
        let sk = SecretKey::from_seed(seed);
        if sk.public_key() != self.public_key {
            return Err("stored public key does not match the seed".into());
        }
        Ok(sk)
    }

    pub fn public(&self) -> PublicKeyFile {
        PublicKeyFile { label: self.label.clone(), public_key: self.public_key }
    }
}

/// Signer allowlist: label → key.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrustedKeys(pub BTreeMap<String, PublicKey>);

impl TrustedKeys {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, label: impl Into<String>, pk: PublicKey) -> Self {
        self.0.insert(label.into(), pk);
        self
    }

    pub fn insert(&mut self, file: PublicKeyFile) {
        self.0.insert(file.label, file.public_key);
    }

    pub fn label_of(&self, pk: &PublicKey) -> Option<&str> {
        self.0.iter().find(|(_, k)| *k == pk).map(|(l, _)| l.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::keygen;

    #[test]
    fn secret_key_file_round_trip() {
        let (sk, pk) = keygen([3; 32]);
        let file = SecretKeyFile::new("tts", &sk);
        let json = serde_json::to_string(&file).unwrap();
        let back: SecretKeyFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.secret_key().unwrap().public_key(), pk);
        assert!(!format!("{file:?}").contains(&hex::encode([3u8; 32])));

        let mut forged = back.clone();
        forged.public_key = keygen([4; 32]).1;
        assert!(forged.secret_key().is_err());
    }

    #[test]
    fn trusted_lookup() {
        let (_, a) = keygen([1; 32]);
        let (_, b) = keygen([2; 32]);
        let t = TrustedKeys::new().with("irs", a);
        assert_eq!(t.label_of(&a), Some("irs"));
        assert_eq!(t.label_of(&b), None);
    }
}
