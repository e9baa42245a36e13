use std::collections::BTreeSet;

use super::{layout, AsciiBuffer, FormError, FormTemplate, TaxDocument, REDACTION_BYTE};

/// One bit per buffer byte; 1 replaces the byte with a space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RedactionMask {
    bits: Vec<u8>,
}

impl RedactionMask {
    pub fn zeros(len: usize) -> Self {
        RedactionMask { bits: vec![0; len] }
    }

    /// Unchecked: bits are validated where the mask is applied.
    pub fn from_bits(bits: Vec<u8>) -> Self {
        RedactionMask { bits }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|b| **b == 1).count()
    }

    pub fn validate(&self) -> Result<(), FormError> {
        match self.bits.iter().enumerate().find(|(_, b)| **b > 1) {
            Some((index, &value)) => Err(FormError::NonBooleanBit { index, value }),
            None => Ok(()),
        }
    }
}

/// Sets exactly the value bytes (between the quotes) of every key in
/// `redact_keys`. Metadata keys may be redacted too.
pub fn fields_to_mask(
    doc: &TaxDocument,
    redact_keys: &BTreeSet<String>,
    template: &FormTemplate,
) -> Result<RedactionMask, FormError> {
    if let Some(unknown) = redact_keys.iter().find(|k| !template.is_known_key(k)) {
        return Err(FormError::UnknownKey(unknown.clone()));
    }
    let (_, spans) = layout(doc, template)?;
    let mut mask = RedactionMask::zeros(template.max_buffer_len);
    for span in spans.iter().filter(|s| redact_keys.contains(&s.key)) {
        for bit in &mut mask.bits[span.range.clone()] {
            *bit = 1;
        }
    }
    Ok(mask)
}

/// Host reference for the circuit's output bytes.
pub fn apply_mask_plain(buf: &AsciiBuffer, mask: &RedactionMask) -> Result<AsciiBuffer, FormError> {
    if buf.len() != mask.len() {
        return Err(FormError::LengthMismatch { buffer: buf.len(), mask: mask.len() });
    }
    mask.validate()?;
    let bytes =
        buf.as_bytes().iter().zip(mask.bits()).map(|(&b, &m)| if m == 1 { REDACTION_BYTE } else { b }).collect();
    Ok(AsciiBuffer::from_parts(bytes, buf.used_len()))
}
