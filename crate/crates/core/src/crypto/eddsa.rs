//! EdDSA over Baby Jubjub with a MiMC-7 challenge hash.
//!
//! Signing is deterministic: the nonce is `keccak256(seed ‖ y) mod l`. The
//! challenge is `mimc7_multi([R.x, R.y, A.x, A.y, y], 0)`; the circuit
//! recomputes exactly that value, so it must not change independently.

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::babyjubjub::{Point, Scalar, BASE_POINT};
use super::field::{decimal, fr_to_be_bytes, fr_to_biguint, keccak256, Fr};
use super::mimc::mimc7_multi;

/// `y = H(x)` for a canonical document buffer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DocumentDigest(#[serde(with = "decimal")] pub Fr);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PublicKey(pub Point);

impl PublicKey {
    pub fn point(&self) -> &Point {
        &self.0
    }
}

#[derive(Clone)]
pub struct SecretKey {
    seed: [u8; 32],
    scalar: Scalar,
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(..)")
    }
}

impl SecretKey {
    pub fn from_seed(seed: [u8; 32]) -> Self {
        let mut counter = 0u32;
        loop {
            let digest = if counter == 0 {
                keccak256(&seed)
            } else {
                let mut buf = seed.to_vec();
                buf.extend_from_slice(&counter.to_be_bytes());
                keccak256(&buf)
            };
            let scalar = Scalar::from_be_bytes_mod_order(&digest);
            if !scalar.is_zero() {
                return SecretKey { seed, scalar };
            }
            counter += 1;
        }
    }

    pub fn seed(&self) -> &[u8; 32] {
        &self.seed
    }

    pub fn scalar(&self) -> &Scalar {
        &self.scalar
    }

    pub fn public_key(&self) -> PublicKey {
        PublicKey(BASE_POINT.mul(self.scalar.as_biguint()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    #[serde(rename = "R")]
    pub r: Point,
    pub s: Scalar,
}

pub fn keygen(seed: [u8; 32]) -> (SecretKey, PublicKey) {
    let sk = SecretKey::from_seed(seed);
    let pk = sk.public_key();
    (sk, pk)
}

/// Challenge as a full field element. Host verification reduces it mod `l`;
/// the circuit multiplies by its 254-bit representation, which is the same
/// point whenever `A` lies in the prime subgroup.
pub fn challenge(r: &Point, a: &Point, y: &DocumentDigest) -> Fr {
    mimc7_multi(&[r.x, r.y, a.x, a.y, y.0], Fr::from(0u64)).expect("nonempty input")
}

pub fn sign_digest(sk: &SecretKey, y: &DocumentDigest) -> Signature {
    let mut nonce_input = sk.seed.to_vec();
    nonce_input.extend_from_slice(&fr_to_be_bytes(&y.0));
    let r = Scalar::from_be_bytes_mod_order(&keccak256(&nonce_input));
    let big_r = BASE_POINT.mul(r.as_biguint());
    let a = sk.public_key();
    let c = Scalar::new(fr_to_biguint(&challenge(&big_r, &a.0, y)));
    let s = r.add(&c.mul(&sk.scalar));
    Signature { r: big_r, s }
}

/// Total: malformed keys or signatures give `false`.
pub fn verify_sig(pk: &PublicKey, y: &DocumentDigest, sig: &Signature) -> bool {
    if !sig.r.is_in_subgroup() || !pk.0.is_in_subgroup() {
        return false;
    }
    if Scalar::from_canonical(sig.s.as_biguint().clone()).is_none() {
        return false;
    }
    let c: BigUint = fr_to_biguint(&challenge(&sig.r, &pk.0, y));
    let lhs = BASE_POINT.mul(sig.s.as_biguint());
    let rhs = sig.r.add(&pk.0.mul(&c));
    lhs == rhs
}
