//! Rank-1 constraint systems for the redaction proof and the numeric claim
//! proofs, together with witness assignment.
//!
//! | circuit | public inputs |
//! |---|---|
//! | redaction | `out[0..N)`, `pk.x`, `pk.y` |
//! | range | `lo`, `hi`, `pk.x`, `pk.y` |
//! | comparison | relation id, `pk.x`, `pk.y` |
//!
//! All three re-derive the document hash from the private buffer bytes and
//! check the EdDSA signature on it against the public key.

pub mod claims;
pub mod gadgets;
pub mod r1cs;
pub mod redaction;

use thiserror::Error;

use crate::crypto::babyjubjub::Point;
use crate::crypto::Signature;
use crate::form::FormError;
use gadgets::PointLc;
use r1cs::{CircuitBuilder, Variable};

pub use claims::{
    assign_claim_witness, build_claim_circuit, build_comparison_circuit, build_range_circuit, parse_numeric,
    synthesize_claim, ClaimSpec, Relation,
};
pub use r1cs::{CircuitDigest, ConstraintSystem, LinearCombination, WitnessAssignment};
pub use redaction::{assign_redaction_witness, build_redaction_circuit, synthesize_redaction, RedactionInputs};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("buffer length must be positive")]
    EmptyBuffer,
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("tax information and signature did not match")]
    SignatureMismatch,
    #[error("invalid redaction mask: {0}")]
    MaskInvalid(FormError),
    #[error("invalid claim: {0}")]
    InvalidClaim(String),
    #[error("witness violates constraint {0}")]
    Unsatisfied(usize),
    #[error("bundle is for template {found:?}, expected {expected:?}")]
    TemplateMismatch { expected: String, found: String },
    #[error("circuit decoding failed: {0}")]
    Decode(String),
}

/// Builder output: the constraint system and the full assignment that was
/// recorded while building it.
pub struct Synthesized {
    pub cs: ConstraintSystem,
    pub assignment: Vec<crate::crypto::Fr>,
}

impl Synthesized {
    fn from_builder(b: CircuitBuilder) -> Self {
        let (cs, assignment) = b.finish();
        Synthesized { cs, assignment }
    }

    /// Checks satisfaction and packages the assignment.
    pub fn into_witness(self) -> Result<WitnessAssignment, CircuitError> {
        if let Some(i) = self.cs.first_unsatisfied(&self.assignment) {
            return Err(CircuitError::Unsatisfied(i));
        }
        Ok(WitnessAssignment {
            num_inputs: self.cs.num_inputs,
            circuit_digest: self.cs.digest(),
            values: self.assignment,
        })
    }
}

/// Allocates the private buffer bytes, each constrained to 7 bits.
fn alloc_bytes(b: &mut CircuitBuilder, bytes: &[u8]) -> Vec<Variable> {
    bytes
        .iter()
        .map(|byte| {
            let x = b.alloc(crate::crypto::Fr::from(*byte as u64));
            gadgets::range_check(b, x, 7);
            x
        })
        .collect()
}

/// Hashes the byte variables and verifies the signature against `pk`.
fn enforce_signed(b: &mut CircuitBuilder, xs: &[Variable], sig: &Signature, pk: &PointLc) {
    let packed = gadgets::pack_byte_vars(xs);
    let digest = gadgets::mimc7_multi(b, &packed);
    let sig_vars = gadgets::alloc_signature(b, &sig.r, sig.s.as_biguint());
    gadgets::verify_signature(b, &sig_vars, pk, digest);
}

fn alloc_public_key(b: &mut CircuitBuilder, pk: &Point) -> PointLc {
    let x = b.alloc_input(pk.x);
    let y = b.alloc_input(pk.y);
    PointLc::from_vars(x, y)
}

/// Stand-in signature for shape-only synthesis.
fn placeholder_signature() -> Signature {
    Signature { r: Point::identity(), s: crate::crypto::Scalar::new(0u32.into()) }
}
