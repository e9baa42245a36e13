//! Host primitives against the brute-force oracle in `oracle/`.

mod oracle;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zktax::crypto::babyjubjub::{Point, Scalar, BASE_POINT};
use zktax::crypto::field::{fr_from_biguint, fr_to_biguint};
use zktax::crypto::mimc::round_constants;
use zktax::crypto::{
    hash_document, keygen, mimc7_block, mimc7_multi, sign_digest, verify_sig, DocumentDigest, Fr, PublicKey, Signature,
};
use zktax::form::AsciiBuffer;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x6b6174)
}

fn random_fr(rng: &mut impl Rng) -> BigUint {
    let bytes: [u8; 32] = rng.gen();
    BigUint::from_bytes_be(&bytes) % oracle::p()
}

fn point(p: &Point) -> oracle::Pt {
    (fr_to_biguint(&p.x), fr_to_biguint(&p.y))
}

#[test]
fn round_constants_match() {
    let ours: Vec<BigUint> = round_constants().iter().map(fr_to_biguint).collect();
    assert_eq!(ours, oracle::round_constants(91));
}

#[test]
fn mimc_matches_recurrence() {
    let mut rng = rng();
    for _ in 0..100 {
        let (x, k) = (random_fr(&mut rng), random_fr(&mut rng));
        assert_eq!(fr_to_biguint(&mimc7_block(fr_from_biguint(&x), fr_from_biguint(&k))), oracle::mimc_block(&x, &k));
    }
    for _ in 0..20 {
        let n = rng.gen_range(1..6);
        let xs: Vec<BigUint> = (0..n).map(|_| random_fr(&mut rng)).collect();
        let key = random_fr(&mut rng);
        let ours = mimc7_multi(&xs.iter().map(fr_from_biguint).collect::<Vec<_>>(), fr_from_biguint(&key)).unwrap();
        assert_eq!(fr_to_biguint(&ours), oracle::mimc_multi(&xs, &key));
    }
}

#[test]
fn mimc_order_sensitive() {
    let mut rng = rng();
    for _ in 0..20 {
        let a = fr_from_biguint(&random_fr(&mut rng));
        let b = fr_from_biguint(&random_fr(&mut rng));
        assert_ne!(mimc7_multi(&[a, b], Fr::from(0u64)), mimc7_multi(&[b, a], Fr::from(0u64)));
    }
}

#[test]
fn document_hash_matches() {
    let mut rng = rng();
    for _ in 0..30 {
        let n = rng.gen_range(1..200);
        let used = rng.gen_range(0..=n);
        let mut bytes: Vec<u8> = (0..used).map(|_| rng.gen_range(1..128u8)).collect();
        bytes.resize(n, 0);
        let buf = AsciiBuffer::from_padded(bytes.clone()).unwrap();
        assert_eq!(fr_to_biguint(&hash_document(&buf).unwrap().0), oracle::hash_bytes(&bytes));
    }
}

#[test]
fn hash_avalanche() {
    let mut rng = rng();
    let mut changed = 0;
    for _ in 0..100 {
        let mut bytes: Vec<u8> = (0..155).map(|_| rng.gen_range(1..128u8)).collect();
        let before = hash_document(&AsciiBuffer::from_padded(bytes.clone()).unwrap()).unwrap();
        let i = rng.gen_range(0..bytes.len());
        bytes[i] = if bytes[i] == 127 { 1 } else { bytes[i] + 1 };
        let after = hash_document(&AsciiBuffer::from_padded(bytes).unwrap()).unwrap();
        changed += (before != after) as usize;
    }
    assert!(changed >= 99, "{changed}/100");
}

#[test]
fn pad_byte_changes_digest() {
    let a = AsciiBuffer::from_padded(vec![b'{', b'}', 0, 0]).unwrap();
    let b = AsciiBuffer::from_padded(vec![b'{', b'}', b' ', 0]).unwrap();
    assert_ne!(hash_document(&a).unwrap(), hash_document(&b).unwrap());
}

#[test]
fn scalar_mul_matches_double_and_add() {
    let mut rng = rng();
    for _ in 0..100 {
        let k = random_fr(&mut rng);
        assert_eq!(point(&BASE_POINT.mul(&k)), oracle::mul(&oracle::base8(), &k));
    }
}

#[test]
fn eddsa_matches_oracle() {
    let mut rng = rng();
    for _ in 0..25 {
        let seed: [u8; 32] = rng.gen();
        let y = random_fr(&mut rng);
        let (sk, pk) = keygen(seed);
        assert_eq!(sk.scalar().as_biguint(), &oracle::secret_scalar(&seed));
        assert_eq!(point(&pk.0), oracle::public_key(&seed));
        let sig = sign_digest(&sk, &DocumentDigest(fr_from_biguint(&y)));
        let (r, s) = oracle::sign(&seed, &y);
        assert_eq!(point(&sig.r), r);
        assert_eq!(sig.s.as_biguint(), &s);
        assert!(oracle::verify(&point(&pk.0), &y, &r, &s));
    }
}

#[test]
fn unit_scalar_gives_base_point() {
    assert_eq!(BASE_POINT.mul(&BigUint::from(1u32)), *BASE_POINT);
}

#[test]
fn random_signatures_never_verify() {
    let mut rng = rng();
    let (_, pk) = keygen([9; 32]);
    // Subgroup points so the check reaches the full verification equation.
    let pool: Vec<Point> = (0..50).map(|_| BASE_POINT.mul(&random_fr(&mut rng))).collect();
    for i in 0..10_000 {
        let sig = Signature { r: pool[i % pool.len()], s: Scalar::new(random_fr(&mut rng)) };
        let y = DocumentDigest(fr_from_biguint(&random_fr(&mut rng)));
        assert!(!verify_sig(&pk, &y, &sig));
    }
}

#[test]
fn wrong_key_and_message_rejected() {
    let (sk, pk) = keygen([1; 32]);
    let (_, other) = keygen([2; 32]);
    let y = DocumentDigest(Fr::from(77u64));
    let sig = sign_digest(&sk, &y);
    assert!(verify_sig(&pk, &y, &sig));
    assert!(!verify_sig(&other, &y, &sig));
    assert!(!verify_sig(&pk, &DocumentDigest(Fr::from(78u64)), &sig));
    let mut no_r = sig.clone();
    no_r.r = Point::identity();
    assert!(!verify_sig(&pk, &y, &no_r));
    assert!(!verify_sig(&PublicKey(Point::identity()), &y, &sig));
}
