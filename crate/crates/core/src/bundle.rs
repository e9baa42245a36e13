//! The signed document the tax service hands back to the taxpayer.

use serde::{Deserialize, Serialize};

use crate::crypto::{hash_document, verify_sig, DocumentDigest, PublicKey, Signature};
use crate::form::{canonicalize, AsciiBuffer, FormError, FormTemplate, TaxDocument};

/// Document, signature and signer key. Private to the taxpayer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedDocumentBundle {
    pub template_id: String,
    pub document: TaxDocument,
    pub signature: Signature,
    pub public_key: PublicKey,
}

impl SignedDocumentBundle {
    pub fn buffer(&self, template: &FormTemplate) -> Result<AsciiBuffer, FormError> {
        canonicalize(&self.document, template)
    }

    pub fn digest(&self, template: &FormTemplate) -> Result<DocumentDigest, FormError> {
        let buf = self.buffer(template)?;
        Ok(hash_document(&buf).expect("canonical buffers are ASCII and nonempty"))
    }

    /// True when the signature covers the canonical form of the document.
    pub fn is_valid(&self, template: &FormTemplate) -> bool {
        self.template_id == template.id()
            && self.digest(template).map(|y| verify_sig(&self.public_key, &y, &self.signature)).unwrap_or(false)
    }
}
