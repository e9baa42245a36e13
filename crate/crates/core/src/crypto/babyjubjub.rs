//! Baby Jubjub: the twisted Edwards curve `a·x² + y² = 1 + d·x²·y²` over the
//! BN254 scalar field, with `a = 168700` and `d = 168696`.
//!
//! `a` is a square and `d` is not, so the addition law below is complete: it
//! needs no special cases for doubling or the identity. The same formulas are
//! replayed constraint-by-constraint in the circuit gadgets.

use std::fmt;
use std::str::FromStr;

use ark_ff::{AdditiveGroup, Field, Zero};
use num_bigint::BigUint;
use num_traits::One;
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use super::field::{decimal, Fr};

pub static COEFF_A: Lazy<Fr> = Lazy::new(|| Fr::from(168700u64));
pub static COEFF_D: Lazy<Fr> = Lazy::new(|| Fr::from(168696u64));

/// Order `l` of the prime subgroup; the full group has cofactor 8.
pub static SUBGROUP_ORDER: Lazy<BigUint> = Lazy::new(|| {
    BigUint::parse_bytes(b"2736030358979909402780800718157159386076813972158567259200215660948447373041", 10).unwrap()
});

/// Generator of the prime-order subgroup (circomlib's `Base8`).
pub static BASE_POINT: Lazy<Point> = Lazy::new(|| Point {
    x: Fr::from_str("5299619240641551281634865583518297030282874472190772894086521144482721001553").unwrap(),
    y: Fr::from_str("16950150798460657717958625567821834550301663161624707787222815936182638968203").unwrap(),
});

#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    #[serde(with = "decimal")]
    pub x: Fr,
    #[serde(with = "decimal")]
    pub y: Fr,
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point({}, {})", self.x, self.y)
    }
}

impl Point {
    pub fn identity() -> Self {
        Point { x: Fr::zero(), y: Fr::from(1u64) }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn is_on_curve(&self) -> bool {
        let x2 = self.x.square();
        let y2 = self.y.square();
        *COEFF_A * x2 + y2 == Fr::from(1u64) + *COEFF_D * x2 * y2
    }

    pub fn add(&self, other: &Point) -> Point {
        let (x1, y1, x2, y2) = (self.x, self.y, other.x, other.y);
        let tau = *COEFF_D * x1 * x2 * y1 * y2;
        let one = Fr::from(1u64);
        // Denominators are nonzero for on-curve inputs; garbage in gives identity-free garbage out.
        let inv_plus = (one + tau).inverse().unwrap_or_default();
        let inv_minus = (one - tau).inverse().unwrap_or_default();
        Point { x: (x1 * y2 + y1 * x2) * inv_plus, y: (y1 * y2 - *COEFF_A * x1 * x2) * inv_minus }
    }

    pub fn double(&self) -> Point {
        self.add(self)
    }

    pub fn neg(&self) -> Point {
        Point { x: -self.x, y: self.y }
    }

    /// Scalar multiplication by a non-negative integer (4-bit fixed window,
    /// projective coordinates, one inversion at the end).
    pub fn mul(&self, scalar: &BigUint) -> Point {
        if scalar.is_zero() {
            return Point::identity();
        }
        let base = Projective::from(*self);
        let mut table = [Projective::IDENTITY; 16];
        for i in 1..16 {
            table[i] = table[i - 1].add(&base);
        }
        let mut acc = Projective::IDENTITY;
        for d in scalar.to_radix_be(16) {
            for _ in 0..4 {
                acc = acc.add(&acc);
            }
            if d != 0 {
                acc = acc.add(&table[d as usize]);
            }
        }
        acc.to_affine()
    }

    pub fn is_in_subgroup(&self) -> bool {
        self.is_on_curve() && self.mul(&SUBGROUP_ORDER).is_identity()
    }
}

/// `(X : Y : Z)` with `x = X/Z`, `y = Y/Z`.
#[derive(Clone, Copy)]
struct Projective {
    x: Fr,
    y: Fr,
    z: Fr,
}

impl Projective {
    const IDENTITY: Projective = Projective { x: Fr::ZERO, y: Fr::ONE, z: Fr::ONE };

    fn add(&self, o: &Projective) -> Projective {
        let a = self.z * o.z;
        let b = a.square();
        let c = self.x * o.x;
        let d = self.y * o.y;
        let e = *COEFF_D * c * d;
        let f = b - e;
        let g = b + e;
        Projective { x: a * f * ((self.x + self.y) * (o.x + o.y) - c - d), y: a * g * (d - *COEFF_A * c), z: f * g }
    }

    fn to_affine(self) -> Point {
        let inv = self.z.inverse().unwrap_or_default();
        Point { x: self.x * inv, y: self.y * inv }
    }
}

impl From<Point> for Projective {
    fn from(p: Point) -> Self {
        Projective { x: p.x, y: p.y, z: Fr::ONE }
    }
}

/// Integer modulo the subgroup order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar(BigUint);

impl Scalar {
    pub fn new(n: BigUint) -> Self {
        Scalar(n % &*SUBGROUP_ORDER)
    }

    /// Accepts only canonical (already reduced) values.
    pub fn from_canonical(n: BigUint) -> Option<Self> {
        (n < *SUBGROUP_ORDER).then_some(Scalar(n))
    }

    pub fn from_be_bytes_mod_order(bytes: &[u8]) -> Self {
        Self::new(BigUint::from_bytes_be(bytes))
    }

    pub fn one() -> Self {
        Scalar(BigUint::one())
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        Scalar::new(&self.0 + &other.0)
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        Scalar::new(&self.0 * &other.0)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", self.0)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let s = String::deserialize(d)?;
        let n = (!s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
            .then(|| BigUint::parse_bytes(s.as_bytes(), 10))
            .flatten()
            .ok_or_else(|| D::Error::custom("scalar must be a decimal string"))?;
        Scalar::from_canonical(n).ok_or_else(|| D::Error::custom("scalar not reduced modulo the subgroup order"))
    }
}

/// `2^i · B` for `i < bits`, used by fixed-base multiplication gadgets.
pub fn base_point_powers(bits: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(bits);
    let mut cur = *BASE_POINT;
    for _ in 0..bits {
        out.push(cur);
        cur = cur.double();
    }
    out
}
