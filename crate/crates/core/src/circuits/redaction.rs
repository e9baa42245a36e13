//! The redaction circuit: `out[i] = mask[i] ? 0x20 : x[i]` over a signed
//! buffer `x`.

use super::r1cs::{CircuitBuilder, LinearCombination as Lc};
use super::{
    alloc_bytes, alloc_public_key, enforce_signed, gadgets, placeholder_signature, CircuitError, ConstraintSystem,
    Synthesized, WitnessAssignment,
};
use crate::bundle::SignedDocumentBundle;
use crate::crypto::{Fr, Point, PublicKey, Signature};
use crate::form::{FormTemplate, RedactionMask, REDACTION_BYTE};

/// Raw private inputs. Nothing here is checked; an inconsistent set simply
/// yields an unsatisfied assignment.
#[derive(Clone, Debug)]
pub struct RedactionInputs {
    pub bytes: Vec<u8>,
    pub mask: Vec<u8>,
    pub signature: Signature,
    pub public_key: PublicKey,
}

impl RedactionInputs {
    fn placeholder(n: usize) -> Self {
        RedactionInputs {
            bytes: vec![0; n],
            mask: vec![0; n],
            signature: placeholder_signature(),
            public_key: PublicKey(Point::identity()),
        }
    }
}

pub fn circuit_label(template: &FormTemplate) -> String {
    format!("redaction/{}", template.id())
}

pub fn synthesize_redaction(
    template: &FormTemplate,
    inputs: Option<&RedactionInputs>,
) -> Result<Synthesized, CircuitError> {
    let n = template.max_buffer_len;
    if n == 0 {
        return Err(CircuitError::EmptyBuffer);
    }
    let placeholder;
    let inputs = match inputs {
        Some(i) => i,
        None => {
            placeholder = RedactionInputs::placeholder(n);
            &placeholder
        }
    };
    assert_eq!(inputs.bytes.len(), n, "buffer length must equal the template's");
    assert_eq!(inputs.mask.len(), n, "mask length must equal the template's");

    let mut b = CircuitBuilder::new(circuit_label(template), n);
    let xs = alloc_bytes(&mut b, &inputs.bytes);
    let space = Fr::from(REDACTION_BYTE as u64);
    for (i, x) in xs.iter().enumerate() {
        let m = gadgets::alloc_boolean(&mut b, Fr::from(inputs.mask[i] as u64));
        let xv = b.value(*x);
        let mv = b.value(m);
        let out = b.alloc_input(xv + mv * (space - xv));
        // (x − 32)·m = x − out
        b.enforce(Lc::from(*x) - space, m, Lc::from(*x) - out);
    }
    let pk = alloc_public_key(&mut b, &inputs.public_key.0);
    enforce_signed(&mut b, &xs, &inputs.signature, &pk);
    Ok(Synthesized::from_builder(b))
}

pub fn build_redaction_circuit(template: &FormTemplate) -> Result<ConstraintSystem, CircuitError> {
    Ok(synthesize_redaction(template, None)?.cs)
}

/// Checks the bundle's signature and the mask, then synthesizes a satisfying
/// assignment.
pub fn assign_redaction_witness(
    bundle: &SignedDocumentBundle,
    mask: &RedactionMask,
    template: &FormTemplate,
) -> Result<WitnessAssignment, CircuitError> {
    if bundle.template_id != template.id() {
        return Err(CircuitError::TemplateMismatch { expected: template.id(), found: bundle.template_id.clone() });
    }
    let buf = bundle.buffer(template)?;
    if !bundle.is_valid(template) {
        return Err(CircuitError::SignatureMismatch);
    }
    mask.validate().map_err(CircuitError::MaskInvalid)?;
    if mask.len() != buf.len() {
        return Err(CircuitError::MaskInvalid(crate::form::FormError::LengthMismatch {
            buffer: buf.len(),
            mask: mask.len(),
        }));
    }
    let inputs = RedactionInputs {
        bytes: buf.into_bytes(),
        mask: mask.bits().to_vec(),
        signature: bundle.signature.clone(),
        public_key: bundle.public_key,
    };
    synthesize_redaction(template, Some(&inputs))?.into_witness()
}
