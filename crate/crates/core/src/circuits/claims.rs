//! Numeric claim circuits over a signed buffer: a value lies in a public
//! range, or two values satisfy a public relation. Values stay private.
//!
//! Both circuits read fields at constant byte offsets, so the fields involved
//! (and every field before them) must have a fixed width in the template.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::r1cs::{CircuitBuilder, LinearCombination as Lc, Variable};
use super::{
    alloc_bytes, alloc_public_key, enforce_signed, gadgets, placeholder_signature, CircuitError, ConstraintSystem,
    Synthesized, WitnessAssignment,
};
use crate::bundle::SignedDocumentBundle;
use crate::crypto::{Fr, Point, PublicKey, Signature};
use crate::form::{FieldKind, FormTemplate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::Eq, Relation::Ge, Relation::Gt];

    pub fn id(self) -> u64 {
        match self {
            Relation::Eq => 0,
            Relation::Ge => 1,
            Relation::Gt => 2,
        }
    }

    pub fn from_id(id: u64) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.id() == id)
    }

    pub fn holds(self, a: u64, b: u64) -> bool {
        match self {
            Relation::Eq => a == b,
            Relation::Ge => a >= b,
            Relation::Gt => a > b,
        }
    }
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClaimSpec {
    Range { key: String, lo: u64, hi: u64 },
    Compare { key_a: String, key_b: String, relation: Relation },
}

impl ClaimSpec {
    pub fn label(&self, template: &FormTemplate) -> String {
        match self {
            ClaimSpec::Range { key, .. } => format!("range/{}/{key}", template.id()),
            ClaimSpec::Compare { key_a, key_b, .. } => format!("compare/{}/{key_a}/{key_b}", template.id()),
        }
    }

    /// Public signals minus the trailing public key.
    pub fn public_prefix(&self) -> Vec<Fr> {
        match self {
            ClaimSpec::Range { lo, hi, .. } => vec![Fr::from(*lo), Fr::from(*hi)],
            ClaimSpec::Compare { relation, .. } => vec![Fr::from(relation.id())],
        }
    }

    pub fn holds(&self, values: &[u64]) -> bool {
        match self {
            ClaimSpec::Range { lo, hi, .. } => *lo <= values[0] && values[0] <= *hi,
            ClaimSpec::Compare { relation, .. } => relation.holds(values[0], values[1]),
        }
    }

    pub fn keys(&self) -> Vec<&str> {
        match self {
            ClaimSpec::Range { key, .. } => vec![key],
            ClaimSpec::Compare { key_a, key_b, .. } => vec![key_a, key_b],
        }
    }

    /// Byte range of each referenced field.
    pub fn field_ranges(&self, template: &FormTemplate) -> Result<Vec<Range<usize>>, CircuitError> {
        self.keys()
            .into_iter()
            .map(|key| {
                let field =
                    template.field(key).ok_or_else(|| CircuitError::InvalidClaim(format!("unknown field {key:?}")))?;
                if field.kind != FieldKind::Numeric {
                    return Err(CircuitError::InvalidClaim(format!("field {key:?} is not numeric")));
                }
                let range = template.fixed_value_range(key).ok_or_else(|| {
                    CircuitError::InvalidClaim(format!("field {key:?} has no fixed position in the template"))
                })?;
                if range.len() > gadgets::MAX_NUMERIC_WIDTH {
                    return Err(CircuitError::InvalidClaim(format!(
                        "field {key:?} is wider than {} bytes",
                        gadgets::MAX_NUMERIC_WIDTH
                    )));
                }
                if range.end > template.max_buffer_len {
                    return Err(CircuitError::InvalidClaim(format!("field {key:?} lies beyond the buffer")));
                }
                Ok(range)
            })
            .collect()
    }
}

/// Host-side reading of a numeric value: digits with commas, trailing spaces
/// ignored. Matches the in-circuit parser; `None` if it would be unsatisfiable.
pub fn parse_numeric(value: &str) -> Option<u64> {
    if value.len() > gadgets::MAX_NUMERIC_WIDTH {
        return None;
    }
    let mut v: u64 = 0;
    for c in value.bytes() {
        match c {
            b',' | b' ' => {}
            b'0'..=b'9' => v = v.checked_mul(10)?.checked_add((c - b'0') as u64)?,
            _ => return None,
        }
    }
    Some(v)
}

#[derive(Clone, Debug)]
pub struct ClaimInputs {
    pub bytes: Vec<u8>,
    pub signature: Signature,
    pub public_key: PublicKey,
}

pub fn synthesize_claim(
    template: &FormTemplate,
    spec: &ClaimSpec,
    inputs: Option<&ClaimInputs>,
) -> Result<Synthesized, CircuitError> {
    let n = template.max_buffer_len;
    if n == 0 {
        return Err(CircuitError::EmptyBuffer);
    }
    let ranges = spec.field_ranges(template)?;
    if let ClaimSpec::Range { lo, hi, .. } = spec {
        if lo > hi {
            return Err(CircuitError::InvalidClaim(format!("empty range [{lo}, {hi}]")));
        }
    }
    let placeholder;
    let inputs = match inputs {
        Some(i) => i,
        None => {
            placeholder = ClaimInputs {
                bytes: vec![0; n],
                signature: placeholder_signature(),
                public_key: PublicKey(Point::identity()),
            };
            &placeholder
        }
    };
    assert_eq!(inputs.bytes.len(), n, "buffer length must equal the template's");

    let mut b = CircuitBuilder::new(spec.label(template), n);
    let publics: Vec<Variable> = spec.public_prefix().into_iter().map(|v| b.alloc_input(v)).collect();
    let pk = alloc_public_key(&mut b, &inputs.public_key.0);
    let xs = alloc_bytes(&mut b, &inputs.bytes);
    let values: Vec<Variable> = ranges.iter().map(|r| gadgets::ascii_to_uint(&mut b, &xs[r.clone()])).collect();

    match spec {
        ClaimSpec::Range { .. } => {
            let (lo, hi, v) = (publics[0], publics[1], values[0]);
            gadgets::range_check(&mut b, lo, 64);
            gadgets::range_check(&mut b, hi, 64);
            gadgets::range_check(&mut b, Lc::from(v) - lo, 64);
            gadgets::range_check(&mut b, Lc::from(hi) - v, 64);
        }
        ClaimSpec::Compare { .. } => {
            let rel = publics[0];
            let rel_v = b.value(rel);
            let e: Vec<Variable> = (0..3u64)
                .map(|k| {
                    gadgets::alloc_boolean(&mut b, if rel_v == Fr::from(k) { Fr::from(1u64) } else { Fr::from(0u64) })
                })
                .collect();
            b.enforce_equal(Lc::from(e[0]) + e[1] + e[2], Variable::One);
            b.enforce_equal(Lc::from(e[1]) + Lc::from(e[2]).scale(Fr::from(2u64)), rel);
            // d = a − b − [rel is >]; d ∈ [0, 2^64) and d = 0 when rel is =.
            let d = Lc::from(values[0]) - values[1] - e[2];
            gadgets::range_check(&mut b, d.clone(), 64);
            b.enforce(e[0], d, Lc::zero());
        }
    }

    enforce_signed(&mut b, &xs, &inputs.signature, &pk);
    Ok(Synthesized::from_builder(b))
}

pub fn build_claim_circuit(template: &FormTemplate, spec: &ClaimSpec) -> Result<ConstraintSystem, CircuitError> {
    Ok(synthesize_claim(template, spec, None)?.cs)
}

pub fn build_range_circuit(template: &FormTemplate, key: &str) -> Result<ConstraintSystem, CircuitError> {
    build_claim_circuit(template, &ClaimSpec::Range { key: key.into(), lo: 0, hi: 0 })
}

pub fn build_comparison_circuit(
    template: &FormTemplate,
    key_a: &str,
    key_b: &str,
) -> Result<ConstraintSystem, CircuitError> {
    build_claim_circuit(
        template,
        &ClaimSpec::Compare { key_a: key_a.into(), key_b: key_b.into(), relation: Relation::Eq },
    )
}

/// Synthesizes and checks a claim witness; a false claim surfaces as
/// [`CircuitError::Unsatisfied`].
pub fn assign_claim_witness(
    bundle: &SignedDocumentBundle,
    spec: &ClaimSpec,
    template: &FormTemplate,
) -> Result<WitnessAssignment, CircuitError> {
    if bundle.template_id != template.id() {
        return Err(CircuitError::TemplateMismatch { expected: template.id(), found: bundle.template_id.clone() });
    }
    let buf = bundle.buffer(template)?;
    if !bundle.is_valid(template) {
        return Err(CircuitError::SignatureMismatch);
    }
    let inputs =
        ClaimInputs { bytes: buf.into_bytes(), signature: bundle.signature.clone(), public_key: bundle.public_key };
    synthesize_claim(template, spec, Some(&inputs))?.into_witness()
}
