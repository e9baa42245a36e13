//! MiMC-7 block cipher and its Miyaguchi–Preneel multi-input hash.

use ark_ff::{Field, PrimeField};
use once_cell::sync::Lazy;

use super::field::{keccak256, Fr};
use super::CryptoError;

/// ceil(log_7(2^254)).
pub const MIMC_ROUNDS: usize = 91;
pub const MIMC_SEED: &str = "mimc";

static ROUND_CONSTANTS: Lazy<Vec<Fr>> = Lazy::new(|| derive_round_constants(MIMC_SEED, MIMC_ROUNDS));

/// `c_0 = 0`, `c_i = keccak256^i(seed)` read big-endian and reduced mod p.
/// The iteration feeds the raw 32-byte digest back in, not the reduced value.
pub fn derive_round_constants(seed: &str, n: usize) -> Vec<Fr> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(Fr::from(0u64));
    let mut state = keccak256(seed.as_bytes());
    for i in 1..n {
        if i > 1 {
            state = keccak256(&state);
        }
        out.push(Fr::from_be_bytes_mod_order(&state));
    }
    out
}

pub fn round_constants() -> &'static [Fr] {
    &ROUND_CONSTANTS
}

#[inline]
fn pow7(t: Fr) -> Fr {
    let t2 = t.square();
    let t4 = t2.square();
    t4 * t2 * t
}

pub fn mimc7_block(x: Fr, k: Fr) -> Fr {
    let mut t = x;
    for c in round_constants() {
        t = pow7(t + k + c);
    }
    t + k
}

/// `h_0 = key`, `h_{i+1} = E_{h_i}(x_i) + x_i + h_i`.
pub fn mimc7_multi(inputs: &[Fr], key: Fr) -> Result<Fr, CryptoError> {
    if inputs.is_empty() {
        return Err(CryptoError::EmptyHashInput);
    }
    Ok(inputs.iter().fold(key, |h, x| mimc7_block(*x, h) + x + h))
}
