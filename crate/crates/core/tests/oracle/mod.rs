//! Brute-force reference implementations for known-answer tests. Plain
//! big-integer arithmetic and an unrelated Keccak implementation; nothing
//! here touches the crate's field, curve or hash code.
#![allow(dead_code)]

use num_bigint::BigUint;
use num_traits::{One, Zero};
use sha3::{Digest, Keccak256};

pub fn p() -> BigUint {
    BigUint::parse_bytes(b"21888242871839275222246405745257275088548364400416034343698204186575808495617", 10).unwrap()
}

pub fn l() -> BigUint {
    BigUint::parse_bytes(b"2736030358979909402780800718157159386076813972158567259200215660948447373041", 10).unwrap()
}

pub fn base8() -> (BigUint, BigUint) {
    (
        BigUint::parse_bytes(b"5299619240641551281634865583518297030282874472190772894086521144482721001553", 10)
            .unwrap(),
        BigUint::parse_bytes(b"16950150798460657717958625567821834550301663161624707787222815936182638968203", 10)
            .unwrap(),
    )
}

pub fn keccak(data: &[u8]) -> [u8; 32] {
    Keccak256::digest(data).into()
}

pub fn round_constants(n: usize) -> Vec<BigUint> {
    let p = p();
    let mut out = vec![BigUint::zero()];
    let mut h = keccak(b"mimc");
    for i in 1..n {
        if i > 1 {
            h = keccak(&h);
        }
        out.push(BigUint::from_bytes_be(&h) % &p);
    }
    out
}

/// Round-by-round recurrence: t <- (t + k + c_i)^7, output t + k.
pub fn mimc_block(x: &BigUint, k: &BigUint) -> BigUint {
    let p = p();
    let mut t = x % &p;
    for c in round_constants(91) {
        t = (&t + k + c).modpow(&BigUint::from(7u32), &p);
    }
    (t + k) % &p
}

pub fn mimc_multi(xs: &[BigUint], key: &BigUint) -> BigUint {
    let p = p();
    let mut h = key.clone();
    for x in xs {
        h = (mimc_block(x, &h) + x + &h) % &p;
    }
    h
}

pub fn pack(bytes: &[u8]) -> Vec<BigUint> {
    bytes
        .chunks(31)
        .map(|c| {
            let mut padded = c.to_vec();
            padded.resize(31, 0);
            BigUint::from_bytes_be(&padded)
        })
        .collect()
}

pub fn hash_bytes(bytes: &[u8]) -> BigUint {
    mimc_multi(&pack(bytes), &BigUint::zero())
}

pub type Pt = (BigUint, BigUint);

fn inv(x: &BigUint) -> BigUint {
    let p = p();
    x.modpow(&(&p - 2u32), &p)
}

fn sub(a: &BigUint, b: &BigUint) -> BigUint {
    let p = p();
    ((a % &p) + &p - (b % &p)) % &p
}

/// Affine twisted Edwards addition, a = 168700, d = 168696.
pub fn add(p1: &Pt, p2: &Pt) -> Pt {
    let p = p();
    let a = BigUint::from(168700u32);
    let d = BigUint::from(168696u32);
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let t = (&d * x1 * x2 * y1 * y2) % &p;
    let x3 = ((x1 * y2 + y1 * x2) % &p) * inv(&((BigUint::one() + &t) % &p)) % &p;
    let y3 = sub(&(y1 * y2), &(&a * x1 * x2)) * inv(&sub(&BigUint::one(), &t)) % &p;
    (x3, y3)
}

/// Double-and-add from the least significant bit.
pub fn mul(pt: &Pt, k: &BigUint) -> Pt {
    let mut acc: Pt = (BigUint::zero(), BigUint::one());
    let mut d = pt.clone();
    for i in 0..k.bits() {
        if k.bit(i) {
            acc = add(&acc, &d);
        }
        d = add(&d, &d);
    }
    acc
}

pub fn secret_scalar(seed: &[u8; 32]) -> BigUint {
    let mut counter = 0u32;
    loop {
        let h = if counter == 0 {
            keccak(seed)
        } else {
            let mut b = seed.to_vec();
            b.extend_from_slice(&counter.to_be_bytes());
            keccak(&b)
        };
        let s = BigUint::from_bytes_be(&h) % l();
        if !s.is_zero() {
            return s;
        }
        counter += 1;
    }
}

pub fn public_key(seed: &[u8; 32]) -> Pt {
    mul(&base8(), &secret_scalar(seed))
}

/// Returns (R, s).
pub fn sign(seed: &[u8; 32], y: &BigUint) -> (Pt, BigUint) {
    let sk = secret_scalar(seed);
    let a = mul(&base8(), &sk);
    let mut nonce_input = seed.to_vec();
    let mut yb = y.to_bytes_be();
    while yb.len() < 32 {
        yb.insert(0, 0);
    }
    nonce_input.extend_from_slice(&yb);
    let r = BigUint::from_bytes_be(&keccak(&nonce_input)) % l();
    let big_r = mul(&base8(), &r);
    let c = mimc_multi(&[big_r.0.clone(), big_r.1.clone(), a.0.clone(), a.1.clone(), y.clone()], &BigUint::zero());
    let s = (r + (c % l()) * sk) % l();
    (big_r, s)
}

pub fn verify(a: &Pt, y: &BigUint, r: &Pt, s: &BigUint) -> bool {
    if s >= &l() {
        return false;
    }
    let c = mimc_multi(&[r.0.clone(), r.1.clone(), a.0.clone(), a.1.clone(), y.clone()], &BigUint::zero());
    mul(&base8(), s) == add(r, &mul(a, &c))
}

/// Digits and commas, trailing spaces ignored.
pub fn parse_amount(s: &str) -> Option<u64> {
    let digits: String = s.chars().filter(|c| *c != ',' && *c != ' ').collect();
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if digits.is_empty() {
        return Some(0);
    }
    digits.parse().ok()
}

pub fn redact(buf: &[u8], mask: &[u8]) -> Vec<u8> {
    buf.iter().zip(mask).map(|(b, m)| if *m == 1 { b' ' } else { *b }).collect()
}
