//! Rank-1 constraint systems: a recording builder, the finalized system, its
//! satisfaction checker and the `ZKTXCS1` binary encoding.

use std::ops::{Add, Mul, Neg, Sub};

use ark_ff::{BigInteger, PrimeField, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CircuitError;
use crate::crypto::Fr;

const MAGIC: &[u8; 7] = b"ZKTXCS1";

/// Builder-level variable handle. Inputs and witnesses live in separate index
/// spaces until [`CircuitBuilder::finish`] flattens them as
/// `[one, inputs..., witnesses...]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variable {
    One,
    Input(usize),
    Aux(usize),
}

#[derive(Clone, Debug, Default)]
pub struct LinearCombination(pub Vec<(Variable, Fr)>);

impl LinearCombination {
    pub fn zero() -> Self {
        LinearCombination(Vec::new())
    }

    pub fn constant(c: Fr) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            LinearCombination(vec![(Variable::One, c)])
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Variable, Fr)>) -> Self {
        LinearCombination(terms.into_iter().collect())
    }

    pub fn terms(&self) -> &[(Variable, Fr)] {
        &self.0
    }

    pub fn scale(mut self, k: Fr) -> Self {
        for (_, c) in &mut self.0 {
            *c *= k;
        }
        self
    }
}

impl From<Variable> for LinearCombination {
    fn from(v: Variable) -> Self {
        LinearCombination(vec![(v, Fr::from(1u64))])
    }
}

impl From<&LinearCombination> for LinearCombination {
    fn from(lc: &LinearCombination) -> Self {
        lc.clone()
    }
}

impl Add for LinearCombination {
    type Output = LinearCombination;
    fn add(mut self, rhs: LinearCombination) -> Self {
        self.0.extend(rhs.0);
        self
    }
}

impl Add<Variable> for LinearCombination {
    type Output = LinearCombination;
    fn add(mut self, rhs: Variable) -> Self {
        self.0.push((rhs, Fr::from(1u64)));
        self
    }
}

impl Add<Fr> for LinearCombination {
    type Output = LinearCombination;
    fn add(mut self, rhs: Fr) -> Self {
        if !rhs.is_zero() {
            self.0.push((Variable::One, rhs));
        }
        self
    }
}

impl Sub for LinearCombination {
    type Output = LinearCombination;
    fn sub(self, rhs: LinearCombination) -> Self {
        self + (-rhs)
    }
}

impl Sub<Variable> for LinearCombination {
    type Output = LinearCombination;
    fn sub(mut self, rhs: Variable) -> Self {
        self.0.push((rhs, -Fr::from(1u64)));
        self
    }
}

impl Sub<Fr> for LinearCombination {
    type Output = LinearCombination;
    fn sub(self, rhs: Fr) -> Self {
        self + (-rhs)
    }
}

impl Neg for LinearCombination {
    type Output = LinearCombination;
    fn neg(self) -> Self {
        self.scale(-Fr::from(1u64))
    }
}

impl Mul<Fr> for LinearCombination {
    type Output = LinearCombination;
    fn mul(self, k: Fr) -> Self {
        self.scale(k)
    }
}

/// Records constraints and, alongside, the value of every variable.
///
/// Circuits are synthesized from concrete inputs; building the shape alone
/// uses placeholder inputs. Gadgets must never branch on values, so the
/// recorded structure is identical either way.
pub struct CircuitBuilder {
    label: String,
    buffer_len: usize,
    inputs: Vec<Fr>,
    aux: Vec<Fr>,
    constraints: Vec<[LinearCombination; 3]>,
}

impl CircuitBuilder {
    pub fn new(label: impl Into<String>, buffer_len: usize) -> Self {
        CircuitBuilder { label: label.into(), buffer_len, inputs: Vec::new(), aux: Vec::new(), constraints: Vec::new() }
    }

    pub fn alloc_input(&mut self, value: Fr) -> Variable {
        self.inputs.push(value);
        Variable::Input(self.inputs.len() - 1)
    }

    pub fn alloc(&mut self, value: Fr) -> Variable {
        self.aux.push(value);
        Variable::Aux(self.aux.len() - 1)
    }

    pub fn value(&self, v: Variable) -> Fr {
        match v {
            Variable::One => Fr::from(1u64),
            Variable::Input(i) => self.inputs[i],
            Variable::Aux(i) => self.aux[i],
        }
    }

    pub fn eval(&self, lc: &LinearCombination) -> Fr {
        lc.0.iter().map(|(v, c)| self.value(*v) * c).sum()
    }

    /// `a · b = c`.
    pub fn enforce(
        &mut self,
        a: impl Into<LinearCombination>,
        b: impl Into<LinearCombination>,
        c: impl Into<LinearCombination>,
    ) {
        self.constraints.push([a.into(), b.into(), c.into()]);
    }

    /// `lhs = rhs` as the linear constraint `(lhs − rhs) · 1 = 0`.
    pub fn enforce_equal(&mut self, lhs: impl Into<LinearCombination>, rhs: impl Into<LinearCombination>) {
        let diff = lhs.into() - rhs.into();
        self.enforce(diff, Variable::One, LinearCombination::zero());
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn finish(self) -> (ConstraintSystem, Vec<Fr>) {
        let num_inputs = self.inputs.len();
        let flatten = |v: Variable| match v {
            Variable::One => 0,
            Variable::Input(i) => 1 + i,
            Variable::Aux(i) => 1 + num_inputs + i,
        };
        let constraints = self
            .constraints
            .into_iter()
            .map(|[a, b, c]| {
                let f = |lc: LinearCombination| SparseRow::compress(lc.0.into_iter().map(|(v, c)| (flatten(v), c)));
                Constraint { a: f(a), b: f(b), c: f(c) }
            })
            .collect();
        let cs = ConstraintSystem {
            label: self.label,
            buffer_len: self.buffer_len,
            num_inputs,
            num_aux: self.aux.len(),
            constraints,
        };
        let mut assignment = Vec::with_capacity(cs.num_variables());
        assignment.push(Fr::from(1u64));
        assignment.extend(self.inputs);
        assignment.extend(self.aux);
        (cs, assignment)
    }
}

/// Sparse row of `(flat variable index, coefficient)`, sorted by index with
/// no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseRow(pub Vec<(usize, Fr)>);

impl SparseRow {
    fn compress(terms: impl Iterator<Item = (usize, Fr)>) -> Self {
        let mut terms: Vec<(usize, Fr)> = terms.collect();
        terms.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, Fr)> = Vec::with_capacity(terms.len());
        for (i, c) in terms {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        SparseRow(out)
    }

    pub fn eval(&self, assignment: &[Fr]) -> Fr {
        self.0.iter().map(|(i, c)| assignment[*i] * c).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub a: SparseRow,
    pub b: SparseRow,
    pub c: SparseRow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CircuitDigest(pub [u8; 32]);

impl CircuitDigest {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let bytes = hex::decode(s).ok()?;
        Some(CircuitDigest(bytes.try_into().ok()?))
    }
}

impl std::fmt::Display for CircuitDigest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for CircuitDigest {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for CircuitDigest {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CircuitDigest::from_hex(&s).ok_or_else(|| serde::de::Error::custom("circuit digest must be 64 hex chars"))
    }
}

/// Finalized constraint system. Variable 0 is the constant one, followed by
/// `num_inputs` public inputs and then the private witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub label: String,
    pub buffer_len: usize,
    pub num_inputs: usize,
    pub num_aux: usize,
    pub constraints: Vec<Constraint>,
}

impl ConstraintSystem {
    pub fn num_variables(&self) -> usize {
        1 + self.num_inputs + self.num_aux
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn public_input_indices(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.num_inputs
    }

    /// Index of the first violated constraint, if any.
    pub fn first_unsatisfied(&self, assignment: &[Fr]) -> Option<usize> {
        if assignment.len() != self.num_variables() || assignment[0] != Fr::from(1u64) {
            return Some(0);
        }
        self.constraints.iter().position(|c| c.a.eval(assignment) * c.b.eval(assignment) != c.c.eval(assignment))
    }

    pub fn is_satisfied(&self, assignment: &[Fr]) -> bool {
        self.first_unsatisfied(assignment).is_none()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.label.len() as u32).to_le_bytes());
        out.extend_from_slice(self.label.as_bytes());
        for n in [self.buffer_len, self.num_variables(), self.num_inputs] {
            out.extend_from_slice(&(n as u64).to_le_bytes());
        }
        for i in self.public_input_indices() {
            out.extend_from_slice(&(i as u64).to_le_bytes());
        }
        out.extend_from_slice(&(self.constraints.len() as u64).to_le_bytes());
        for c in &self.constraints {
            for row in [&c.a, &c.b, &c.c] {
                out.extend_from_slice(&(row.0.len() as u32).to_le_bytes());
                for (i, coeff) in &row.0 {
                    out.extend_from_slice(&(*i as u64).to_le_bytes());
                    out.extend_from_slice(&coeff.into_bigint().to_bytes_le());
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CircuitError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(MAGIC.len())? != MAGIC {
            return Err(CircuitError::Decode("bad magic".into()));
        }
        let label_len = r.u32()? as usize;
        let label = String::from_utf8(r.take(label_len)?.to_vec())
            .map_err(|_| CircuitError::Decode("label is not UTF-8".into()))?;
        let buffer_len = r.u64()? as usize;
        let num_variables = r.u64()? as usize;
        let num_inputs = r.u64()? as usize;
        if num_variables < 1 + num_inputs {
            return Err(CircuitError::Decode("variable count below input count".into()));
        }
        for expected in 1..=num_inputs {
            if r.u64()? as usize != expected {
                return Err(CircuitError::Decode("public inputs must be variables 1..=k".into()));
            }
        }
        let num_constraints = r.u64()? as usize;
        let mut constraints = Vec::with_capacity(num_constraints.min(1 << 24));
        for _ in 0..num_constraints {
            let mut rows = Vec::with_capacity(3);
            for _ in 0..3 {
                let n = r.u32()? as usize;
                let mut terms = Vec::with_capacity(n.min(1 << 16));
                for _ in 0..n {
                    let idx = r.u64()? as usize;
                    if idx >= num_variables {
                        return Err(CircuitError::Decode(format!("variable index {idx} out of range")));
                    }
                    let raw = r.take(32)?;
                    let coeff = Fr::from_bigint(ark_ff::BigInt::<4>(std::array::from_fn(|k| {
                        u64::from_le_bytes(raw[8 * k..8 * k + 8].try_into().unwrap())
                    })))
                    .ok_or_else(|| CircuitError::Decode("non-canonical coefficient".into()))?;
                    terms.push((idx, coeff));
                }
                rows.push(SparseRow(terms));
            }
            let c = rows.pop().unwrap();
            let b = rows.pop().unwrap();
            let a = rows.pop().unwrap();
            constraints.push(Constraint { a, b, c });
        }
        if r.pos != bytes.len() {
            return Err(CircuitError::Decode("trailing bytes".into()));
        }
        Ok(ConstraintSystem { label, buffer_len, num_inputs, num_aux: num_variables - 1 - num_inputs, constraints })
    }

    pub fn digest(&self) -> CircuitDigest {
        CircuitDigest(Sha256::digest(self.to_bytes()).into())
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CircuitError> {
        let end = self.pos.checked_add(n).filter(|e| *e <= self.bytes.len());
        let end = end.ok_or_else(|| CircuitError::Decode("unexpected end of data".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, CircuitError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, CircuitError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Full variable assignment (`values[0] == 1`) for one constraint system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessAssignment {
    pub values: Vec<Fr>,
    pub num_inputs: usize,
    pub circuit_digest: CircuitDigest,
}

impl WitnessAssignment {
    pub fn public_inputs(&self) -> &[Fr] {
        &self.values[1..=self.num_inputs]
    }

    pub fn private_values(&self) -> &[Fr] {
        &self.values[1 + self.num_inputs..]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_circuit(x: u64) -> (ConstraintSystem, Vec<Fr>) {
        // Public y, private x with x·x = y and x + 1 = z.
        let mut b = CircuitBuilder::new("square", 0);
        let y = b.alloc_input(Fr::from(x * x));
        let xv = b.alloc(Fr::from(x));
        let z = b.alloc(Fr::from(x + 1));
        b.enforce(xv, xv, y);
        b.enforce_equal(LinearCombination::from(xv) + Fr::from(1u64), z);
        b.finish()
    }

    #[test]
    fn flattening_and_satisfaction() {
        let (cs, w) = square_circuit(7);
        assert_eq!(cs.num_variables(), 4);
        assert_eq!(cs.public_input_indices(), 1..=1);
        assert_eq!(w, vec![Fr::from(1u64), Fr::from(49u64), Fr::from(7u64), Fr::from(8u64)]);
        assert!(cs.is_satisfied(&w));
        let mut bad = w.clone();
        bad[1] = Fr::from(50u64);
        assert_eq!(cs.first_unsatisfied(&bad), Some(0));
        let mut bad = w.clone();
        bad[3] = Fr::from(9u64);
        assert_eq!(cs.first_unsatisfied(&bad), Some(1));
        assert!(!cs.is_satisfied(&w[..3]));
    }

    #[test]
    fn shape_is_value_independent() {
        assert_eq!(square_circuit(3).0, square_circuit(11).0);
        assert_eq!(square_circuit(3).0.digest(), square_circuit(11).0.digest());
    }

    #[test]
    fn rows_are_compressed() {
        let row = SparseRow::compress(vec![(3, Fr::from(2u64)), (1, Fr::from(1u64)), (3, -Fr::from(2u64))].into_iter());
        assert_eq!(row.0, vec![(1, Fr::from(1u64))]);
    }

    #[test]
    fn binary_round_trip_and_corruption() {
        let (cs, _) = square_circuit(5);
        let bytes = cs.to_bytes();
        assert_eq!(&bytes[..7], b"ZKTXCS1");
        assert_eq!(ConstraintSystem::from_bytes(&bytes).unwrap(), cs);
        assert!(ConstraintSystem::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(ConstraintSystem::from_bytes(&bad).is_err());
        let mut extra = bytes;
        extra.push(0);
        assert!(ConstraintSystem::from_bytes(&extra).is_err());
    }

    #[test]
    fn digest_hex_round_trip() {
        let d = square_circuit(2).0.digest();
        assert_eq!(CircuitDigest::from_hex(&d.to_hex()), Some(d));
        assert_eq!(CircuitDigest::from_hex("abcd"), None);
    }
}
