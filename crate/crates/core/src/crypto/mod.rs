//! Hashing and signing primitives, identical on the host and inside circuits.

pub mod babyjubjub;
pub mod eddsa;
pub mod field;
pub mod mimc;

use thiserror::Error;

use crate::form::AsciiBuffer;
pub use babyjubjub::{Point, Scalar};
pub use eddsa::{keygen, sign_digest, verify_sig, DocumentDigest, PublicKey, SecretKey, Signature};
pub use field::Fr;
pub use mimc::{derive_round_constants, mimc7_block, mimc7_multi};

/// Bytes per packed field element; 31 bytes always fit below the modulus.
pub const PACK_CHUNK: usize = 31;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CryptoError {
    #[error("hash input must contain at least one element")]
    EmptyHashInput,
    #[error("byte {value:#04x} at offset {offset} is not 7-bit ASCII")]
    NonAsciiByte { offset: usize, value: u8 },
}

/// Packs consecutive 31-byte chunks big-endian, zero-padding the last chunk
/// on the right.
pub fn pack_bytes(bytes: &[u8]) -> Result<Vec<Fr>, CryptoError> {
    if let Some((offset, &value)) = bytes.iter().enumerate().find(|(_, b)| **b >= 128) {
        return Err(CryptoError::NonAsciiByte { offset, value });
    }
    Ok(bytes
        .chunks(PACK_CHUNK)
        .map(|chunk| {
            let mut padded = [0u8; PACK_CHUNK];
            padded[..chunk.len()].copy_from_slice(chunk);
            <Fr as ark_ff::PrimeField>::from_be_bytes_mod_order(&padded)
        })
        .collect())
}

/// Number of packed elements for an `n`-byte buffer.
pub fn packed_len(n: usize) -> usize {
    n.div_ceil(PACK_CHUNK)
}

pub fn hash_document(buf: &AsciiBuffer) -> Result<DocumentDigest, CryptoError> {
    let packed = pack_bytes(buf.as_bytes())?;
    Ok(DocumentDigest(mimc7_multi(&packed, Fr::from(0u64))?))
}
