//! BN254 scalar-field helpers shared by the hash, curve and circuit code.

use ark_ff::{BigInteger, PrimeField};
use num_bigint::BigUint;
use tiny_keccak::{Hasher, Keccak};

/// Element of the BN254 scalar field, the native field of every circuit here.
pub type Fr = ark_bn254::Fr;

pub fn keccak256(data: &[u8]) -> [u8; 32] {
    let mut out = [0u8; 32];
    let mut hasher = Keccak::v256();
    hasher.update(data);
    hasher.finalize(&mut out);
    out
}

pub fn fr_to_biguint(x: &Fr) -> BigUint {
    x.into_bigint().into()
}

pub fn fr_from_biguint(x: &BigUint) -> Fr {
    Fr::from(x.clone())
}

/// Canonical 32-byte big-endian encoding.
pub fn fr_to_be_bytes(x: &Fr) -> [u8; 32] {
    let mut out = [0u8; 32];
    out.copy_from_slice(&x.into_bigint().to_bytes_be());
    out
}

/// Parses a decimal string that must already be a canonical field element.
pub fn fr_from_decimal(s: &str) -> Option<Fr> {
    if s.is_empty() || s.len() > 78 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if s.len() > 1 && s.starts_with('0') {
        return None;
    }
    let n = BigUint::parse_bytes(s.as_bytes(), 10)?;
    if n >= Fr::MODULUS.into() {
        return None;
    }
    Some(Fr::from(n))
}

/// Serde adapter: field elements as decimal strings.
pub mod decimal {
    use super::{fr_from_decimal, Fr};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Fr, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Fr, D::Error> {
        let s = String::deserialize(d)?;
        fr_from_decimal(&s).ok_or_else(|| D::Error::custom(format!("not a field element: {s:?}")))
    }
}

/// Serde adapter for `Vec<Fr>` as an array of decimal strings.
pub mod decimal_vec {
    use super::{fr_from_decimal, Fr};
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Fr], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Fr>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| fr_from_decimal(s).ok_or_else(|| D::Error::custom(format!("not a field element: {s:?}"))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_is_bn254_scalar_prime() {
        let p =
            BigUint::parse_bytes(b"21888242871839275222246405745257275088548364400416034343698204186575808495617", 10)
                .unwrap();
        assert_eq!(BigUint::from(Fr::MODULUS), p);
    }

    #[test]
    fn decimal_parsing_is_strict() {
        assert_eq!(fr_from_decimal("0"), Some(Fr::from(0u64)));
        assert_eq!(fr_from_decimal("393229"), Some(Fr::from(393229u64)));
        assert_eq!(fr_from_decimal("007"), None);
        assert_eq!(fr_from_decimal("-1"), None);
        assert_eq!(fr_from_decimal(""), None);
        assert_eq!(
            fr_from_decimal("21888242871839275222246405745257275088548364400416034343698204186575808495617"),
            None
        );
        let max = "21888242871839275222246405745257275088548364400416034343698204186575808495616";
        assert_eq!(fr_from_decimal(max), Some(-Fr::from(1u64)));
    }

    #[test]
    fn be_bytes_roundtrip() {
        let x = Fr::from(0x0102_0304u64);
        let b = fr_to_be_bytes(&x);
        assert_eq!(&b[28..], &[1, 2, 3, 4]);
        assert_eq!(Fr::from_be_bytes_mod_order(&b), x);
    }
}
