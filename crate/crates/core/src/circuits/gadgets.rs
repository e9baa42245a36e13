//! Constraint gadgets. Every gadget computes witness values alongside its
//! constraints and never branches on those values, so synthesizing with
//! placeholder inputs yields the same constraint system.

use ark_ff::{AdditiveGroup, Field, One, Zero};
use num_bigint::BigUint;

use super::r1cs::{CircuitBuilder, LinearCombination as Lc, Variable};
use crate::crypto::babyjubjub::{base_point_powers, Point, COEFF_A, COEFF_D, SUBGROUP_ORDER};
use crate::crypto::field::{fr_to_biguint, Fr};
use crate::crypto::mimc::round_constants;
use crate::crypto::PACK_CHUNK;

fn one() -> Fr {
    Fr::one()
}

fn bit_of(n: &BigUint, i: usize) -> Fr {
    if n.bit(i as u64) {
        one()
    } else {
        Fr::zero()
    }
}

/// Allocates `b` and enforces `b·(b − 1) = 0`.
pub fn alloc_boolean(b: &mut CircuitBuilder, value: Fr) -> Variable {
    let v = b.alloc(value);
    enforce_boolean(b, v);
    v
}

pub fn enforce_boolean(b: &mut CircuitBuilder, v: Variable) {
    b.enforce(v, Lc::from(v) - one(), Lc::zero());
}

/// Little-endian bit decomposition of `value` into `n` fresh boolean
/// variables, with `Σ 2^i·bit_i = value` enforced.
pub fn to_bits_le(b: &mut CircuitBuilder, value: impl Into<Lc>, n: usize) -> Vec<Variable> {
    let value = value.into();
    let v = fr_to_biguint(&b.eval(&value));
    let bits: Vec<Variable> = (0..n).map(|i| alloc_boolean(b, bit_of(&v, i))).collect();
    b.enforce_equal(pack_bits_le(&bits), value);
    bits
}

/// Allocates `n` boolean variables holding the low bits of `n_value`.
pub fn alloc_bits_le(b: &mut CircuitBuilder, n_value: &BigUint, n: usize) -> Vec<Variable> {
    (0..n).map(|i| alloc_boolean(b, bit_of(n_value, i))).collect()
}

pub fn pack_bits_le(bits: &[Variable]) -> Lc {
    let mut coeff = one();
    let mut lc = Lc::zero();
    for bit in bits {
        lc = lc + Lc::from(*bit).scale(coeff);
        coeff.double_in_place();
    }
    lc
}

/// Constrains `value` to `[0, 2^n)`.
pub fn range_check(b: &mut CircuitBuilder, value: impl Into<Lc>, n: usize) {
    to_bits_le(b, value, n);
}

/// `Π vars` materialized one multiplication at a time.
fn and_many(b: &mut CircuitBuilder, vars: &[Variable]) -> Variable {
    let mut acc = vars[0];
    for v in &vars[1..] {
        let value = b.value(acc) * b.value(*v);
        let next = b.alloc(value);
        b.enforce(acc, *v, next);
        acc = next;
    }
    acc
}

/// Enforces `Σ 2^i·bits[i] ≤ bound` for boolean `bits`. `bound` must have
/// exactly `bits.len()` significant bits.
///
/// Scans from the top: while every bit so far has matched a run of ones in
/// the bound, a bit at a zero position of the bound must itself be zero.
pub fn enforce_le_constant(b: &mut CircuitBuilder, bits: &[Variable], bound: &BigUint) {
    assert_eq!(bound.bits() as usize, bits.len(), "bound width must equal bit count");
    let mut current_run: Vec<Variable> = Vec::new();
    let mut last_run: Option<Variable> = None;
    for i in (0..bits.len()).rev() {
        if bound.bit(i as u64) {
            current_run.push(bits[i]);
        } else {
            if !current_run.is_empty() {
                if let Some(prev) = last_run {
                    current_run.push(prev);
                }
                last_run = Some(and_many(b, &current_run));
                current_run.clear();
            }
            let run = last_run.expect("bound has a leading one");
            b.enforce(bits[i], run, Lc::zero());
        }
    }
}

/// In-circuit MiMC-7 block; four multiplications per round.
pub fn mimc7_block(b: &mut CircuitBuilder, x: Lc, k: Lc) -> Lc {
    let mut t_in = x;
    for c in round_constants() {
        let t = t_in + k.clone() + *c;
        let tv = b.eval(&t);
        let t2v = tv.square();
        let t4v = t2v.square();
        let t6v = t4v * t2v;
        let t2 = b.alloc(t2v);
        b.enforce(t.clone(), t.clone(), t2);
        let t4 = b.alloc(t4v);
        b.enforce(t2, t2, t4);
        let t6 = b.alloc(t6v);
        b.enforce(t4, t2, t6);
        let t7 = b.alloc(t6v * tv);
        b.enforce(t6, t, t7);
        t_in = t7.into();
    }
    t_in + k
}

/// In-circuit `mimc7_multi(inputs, 0)`; each chaining value is materialized.
pub fn mimc7_multi(b: &mut CircuitBuilder, inputs: &[Lc]) -> Variable {
    assert!(!inputs.is_empty());
    let mut h = Lc::zero();
    let mut out = None;
    for x in inputs {
        let e = mimc7_block(b, x.clone(), h.clone());
        let next = e + x.clone() + h;
        let v = b.alloc(b.eval(&next));
        b.enforce_equal(v, next);
        h = v.into();
        out = Some(v);
    }
    out.unwrap()
}

/// Packs byte variables in 31-byte big-endian chunks, mirroring `pack_bytes`.
pub fn pack_byte_vars(bytes: &[Variable]) -> Vec<Lc> {
    let base = Fr::from(256u64);
    bytes
        .chunks(PACK_CHUNK)
        .map(|chunk| {
            let mut coeff = base.pow([(PACK_CHUNK - 1) as u64]);
            let inv = base.inverse().unwrap();
            let mut lc = Lc::zero();
            for byte in chunk {
                lc = lc + Lc::from(*byte).scale(coeff);
                coeff *= inv;
            }
            lc
        })
        .collect()
}

/// Curve point with coordinates as linear combinations.
#[derive(Clone, Debug)]
pub struct PointLc {
    pub x: Lc,
    pub y: Lc,
}

impl PointLc {
    pub fn from_vars(x: Variable, y: Variable) -> Self {
        PointLc { x: x.into(), y: y.into() }
    }

    pub fn constant(p: &Point) -> Self {
        PointLc { x: Lc::constant(p.x), y: Lc::constant(p.y) }
    }

    fn value(&self, b: &CircuitBuilder) -> Point {
        Point { x: b.eval(&self.x), y: b.eval(&self.y) }
    }
}

/// `a·x² + y² = 1 + d·x²·y²`.
pub fn enforce_on_curve(b: &mut CircuitBuilder, p: &PointLc) {
    let xv = b.eval(&p.x);
    let yv = b.eval(&p.y);
    let x2 = b.alloc(xv.square());
    b.enforce(p.x.clone(), p.x.clone(), x2);
    let y2 = b.alloc(yv.square());
    b.enforce(p.y.clone(), p.y.clone(), y2);
    let lhs = Lc::from(x2).scale(*COEFF_A) + y2 - one();
    b.enforce(Lc::from(x2).scale(*COEFF_D), y2, lhs);
}

/// Twisted Edwards addition with six constraints.
pub fn point_add(b: &mut CircuitBuilder, p: &PointLc, q: &PointLc) -> PointLc {
    let (a, d) = (*COEFF_A, *COEFF_D);
    let pv = p.value(b);
    let qv = q.value(b);

    let beta = b.alloc(pv.x * qv.y);
    b.enforce(p.x.clone(), q.y.clone(), beta);
    let gamma = b.alloc(pv.y * qv.x);
    b.enforce(p.y.clone(), q.x.clone(), gamma);
    let delta = b.alloc((pv.y - a * pv.x) * (qv.x + qv.y));
    b.enforce(p.y.clone() - p.x.clone().scale(a), q.x.clone() + q.y.clone(), delta);
    let tau_v = b.value(beta) * b.value(gamma);
    let tau = b.alloc(tau_v);
    b.enforce(beta, gamma, tau);

    let sum = pv.add(&qv);
    let x3 = b.alloc(sum.x);
    b.enforce(x3, Lc::constant(one()) + Lc::from(tau).scale(d), Lc::from(beta) + gamma);
    let y3 = b.alloc(sum.y);
    b.enforce(y3, Lc::constant(one()) - Lc::from(tau).scale(d), Lc::from(delta) + Lc::from(beta).scale(a) - gamma);
    PointLc::from_vars(x3, y3)
}

/// `Σ bits[i]·2^i·B` for the subgroup base point `B`. Selection against a
/// constant point is linear, so only the additions cost constraints.
pub fn fixed_base_mul(b: &mut CircuitBuilder, bits: &[Variable]) -> PointLc {
    let powers = base_point_powers(bits.len());
    let select = |bit: Variable, p: &Point| PointLc {
        x: Lc::from(bit).scale(p.x),
        y: Lc::constant(one()) + Lc::from(bit).scale(p.y - one()),
    };
    let mut acc = select(bits[0], &powers[0]);
    for (bit, p) in bits.iter().zip(&powers).skip(1) {
        let term = select(*bit, p);
        acc = point_add(b, &acc, &term);
    }
    acc
}

/// `bit ? p : identity`, two constraints.
fn select_or_identity(b: &mut CircuitBuilder, bit: Variable, p: &PointLc) -> PointLc {
    let bv = b.value(bit);
    let pv = p.value(b);
    let x = b.alloc(bv * pv.x);
    b.enforce(bit, p.x.clone(), x);
    let y = b.alloc(one() + bv * (pv.y - one()));
    b.enforce(bit, p.y.clone() - one(), Lc::from(y) - one());
    PointLc::from_vars(x, y)
}

/// `Σ bits[i]·2^i·P` for a variable point by double-and-add.
pub fn variable_base_mul(b: &mut CircuitBuilder, bits: &[Variable], p: &PointLc) -> PointLc {
    let mut doubled = p.clone();
    let mut acc = select_or_identity(b, bits[0], &doubled);
    for bit in &bits[1..] {
        doubled = point_add(b, &doubled, &doubled.clone());
        let term = select_or_identity(b, *bit, &doubled);
        acc = point_add(b, &acc, &term);
    }
    acc
}

/// Signature variables supplied by the prover.
pub struct SignatureVars {
    pub r: PointLc,
    pub s_bits: Vec<Variable>,
}

pub fn scalar_bits() -> usize {
    SUBGROUP_ORDER.bits() as usize
}

/// Allocates `R` and the bits of `s` and enforces that `R` is on the curve
/// and `s < l`.
pub fn alloc_signature(b: &mut CircuitBuilder, r: &Point, s: &BigUint) -> SignatureVars {
    let rx = b.alloc(r.x);
    let ry = b.alloc(r.y);
    let r = PointLc::from_vars(rx, ry);
    enforce_on_curve(b, &r);
    let s_bits = alloc_bits_le(b, s, scalar_bits());
    let l_minus_one = &*SUBGROUP_ORDER - 1u32;
    enforce_le_constant(b, &s_bits, &l_minus_one);
    SignatureVars { r, s_bits }
}

/// Enforces `s·B = R + c·A` where `c = mimc7_multi([R.x, R.y, A.x, A.y, y])`
/// is decomposed canonically (below the field modulus).
pub fn verify_signature(b: &mut CircuitBuilder, sig: &SignatureVars, pk: &PointLc, digest: Variable) {
    enforce_on_curve(b, pk);
    let c = mimc7_multi(b, &[sig.r.x.clone(), sig.r.y.clone(), pk.x.clone(), pk.y.clone(), digest.into()]);
    let c_bits = to_bits_le(b, c, 254);
    let p_minus_one = fr_to_biguint(&-one());
    enforce_le_constant(b, &c_bits, &p_minus_one);

    let lhs = fixed_base_mul(b, &sig.s_bits);
    let ca = variable_base_mul(b, &c_bits, pk);
    let rhs = point_add(b, &sig.r, &ca);
    b.enforce_equal(lhs.x, rhs.x);
    b.enforce_equal(lhs.y, rhs.y);
}

/// Bytes accepted by [`ascii_to_uint`]: comma, space, then digits 0-9.
const NUMERIC_CHARS: [u8; 12] = *b", 0123456789";

pub const MAX_NUMERIC_WIDTH: usize = 20;

/// Parses ASCII digits with comma separators and space padding into an
/// integer variable below 2^64. Any other byte makes the system unsatisfiable.
pub fn ascii_to_uint(b: &mut CircuitBuilder, bytes: &[Variable]) -> Variable {
    assert!(bytes.len() <= MAX_NUMERIC_WIDTH, "numeric field wider than {MAX_NUMERIC_WIDTH} bytes");
    let mut v: Lc = Lc::zero();
    for byte in bytes {
        let bv = b.value(*byte);
        let sel: Vec<Variable> = NUMERIC_CHARS
            .iter()
            .map(|c| alloc_boolean(b, if bv == Fr::from(*c as u64) { one() } else { Fr::zero() }))
            .collect();
        b.enforce_equal(Lc::from_terms(sel.iter().map(|s| (*s, one()))), Variable::One);
        b.enforce_equal(Lc::from_terms(sel.iter().zip(NUMERIC_CHARS).map(|(s, c)| (*s, Fr::from(c as u64)))), *byte);
        let is_digit = Lc::from_terms(sel[2..].iter().map(|s| (*s, one())));
        let digit = Lc::from_terms(sel[2..].iter().enumerate().map(|(k, s)| (*s, Fr::from(k as u64))));
        // p = is_digit·v; v' = v + 9p + digit, i.e. 10v + digit or v.
        let pv = b.eval(&is_digit) * b.eval(&v);
        let p = b.alloc(pv);
        b.enforce(is_digit, v.clone(), p);
        let next = v + Lc::from(p).scale(Fr::from(9u64)) + digit;
        let nv = b.alloc(b.eval(&next));
        b.enforce_equal(nv, next);
        v = nv.into();
    }
    let out = b.alloc(b.eval(&v));
    b.enforce_equal(out, v);
    range_check(b, out, 64);
    out
}
