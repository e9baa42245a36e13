//! Hash-then-sign by the tax service. The service is stateless: it signs
//! and forgets.

use std::collections::BTreeMap;

use super::ServiceError;
use crate::bundle::SignedDocumentBundle;
use crate::crypto::{hash_document, sign_digest, PublicKey, SecretKey};
use crate::form::{canonicalize, FormTemplate, TaxDocument};

/// Stamps the template's metadata onto `doc`, validates it and signs the
/// hash of its canonical buffer.
pub fn tts_sign_document(
    doc: &TaxDocument,
    template: &FormTemplate,
    key: &SecretKey,
) -> Result<SignedDocumentBundle, ServiceError> {
    let doc = doc.clone().with_metadata(template);
    let buf = canonicalize(&doc, template)?;
    let digest = hash_document(&buf).expect("canonical buffers are ASCII");
    Ok(SignedDocumentBundle {
        template_id: template.id(),
        document: doc,
        signature: sign_digest(key, &digest),
        public_key: key.public_key(),
    })
}

/// Signing key plus the templates the service accepts.
pub struct TtsService {
    pub label: String,
    key: SecretKey,
    templates: BTreeMap<String, FormTemplate>,
}

impl TtsService {
    pub fn new(label: impl Into<String>, key: SecretKey, templates: impl IntoIterator<Item = FormTemplate>) -> Self {
        TtsService { label: label.into(), key, templates: templates.into_iter().map(|t| (t.id(), t)).collect() }
    }

    pub fn public_key(&self) -> PublicKey {
        self.key.public_key()
    }

    pub fn template(&self, id: &str) -> Option<&FormTemplate> {
        self.templates.get(id)
    }

    pub fn sign(&self, doc: &TaxDocument, template_id: &str) -> Result<SignedDocumentBundle, ServiceError> {
        let template = self.template(template_id).ok_or_else(|| ServiceError::UnknownTemplate(template_id.into()))?;
        tts_sign_document(doc, template, &self.key)
    }
}
