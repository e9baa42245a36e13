//! Local redact-and-prove: field selection, mask, witness, proof.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ServiceError;
use crate::bundle::SignedDocumentBundle;
use crate::circuits::{assign_claim_witness, assign_redaction_witness, ClaimSpec};
use crate::crypto::Signature;
use crate::form::{apply_mask_plain, fields_to_mask, parse_buffer, FormTemplate, TaxDocument};
use crate::prover::{prove, ProofJson, ProvingKey};

/// The shareable output: proof, public signals and enough metadata to pick
/// the right verifying key.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisclosureBundle {
    pub proof: ProofJson,
    /// Decimal field elements, kept as text so malformed input can be
    /// reported instead of failing to deserialize.
    pub signals: Vec<String>,
    pub template_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit_digest: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rendering: Option<String>,
    /// Only present when explicitly requested; a published signature lets
    /// anyone test guesses of redacted values against the signed hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<Signature>,
}

/// `manifest.json`: everything in a disclosure besides proof and signals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub template_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit_digest: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rendering: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<Signature>,
}

impl DisclosureBundle {
    pub const FILES: [&'static str; 3] = ["proof.json", "signals.json", "manifest.json"];

    /// Contents of `proof.json`, `signals.json` and `manifest.json`.
    pub fn to_files(&self) -> [(&'static str, String); 3] {
        let mut proof = serde_json::to_string_pretty(&self.proof).expect("proof serializes");
        proof.push('\n');
        let mut signals = serde_json::to_string(&self.signals).expect("signals serialize");
        signals.push('\n');
        let manifest = Manifest {
            template_id: self.template_id.clone(),
            circuit_digest: self.circuit_digest.clone(),
            rendering: self.rendering.clone(),
            signature: self.signature.clone(),
        };
        let mut manifest = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        manifest.push('\n');
        [(Self::FILES[0], proof), (Self::FILES[1], signals), (Self::FILES[2], manifest)]
    }

    pub fn from_files(proof: &str, signals: &str, manifest: &str) -> Result<Self, String> {
        let proof: ProofJson = serde_json::from_str(proof).map_err(|e| format!("proof.json: {e}"))?;
        let signals: Vec<String> = serde_json::from_str(signals).map_err(|e| format!("signals.json: {e}"))?;
        let m: Manifest = serde_json::from_str(manifest).map_err(|e| format!("manifest.json: {e}"))?;
        Ok(DisclosureBundle {
            proof,
            signals,
            template_id: m.template_id,
            circuit_digest: m.circuit_digest,
            rendering: m.rendering,
            signature: m.signature,
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DisclosureOptions {
    pub include_signature: bool,
    pub include_rendering: bool,
}

/// Template fields not in `keep`. Metadata keys are never included.
pub fn redact_all_except(template: &FormTemplate, keep: &BTreeSet<String>) -> Result<BTreeSet<String>, ServiceError> {
    if let Some(k) = keep.iter().find(|k| !template.is_known_key(k)) {
        return Err(crate::form::FormError::UnknownKey(k.clone()).into());
    }
    Ok(template.field_keys().filter(|k| !keep.contains(*k)).map(String::from).collect())
}

/// One line per key: label, then the value (blank when redacted).
pub fn render_document(doc: &TaxDocument, template: &FormTemplate) -> String {
    let mut out = String::new();
    for f in &template.fields {
        let v = doc.get(&f.key).unwrap_or("").trim_end();
        let line = format!("{:<13} {:<58} {}", f.key, f.label, v);
        out.push_str(line.trim_end());
        out.push('\n');
    }
    for key in crate::form::METADATA_KEYS {
        if let Some(v) = doc.get(key) {
            out.push_str(&format!("{key:<13} {v}\n"));
        }
    }
    out
}

pub fn redact_and_prove(
    bundle: &SignedDocumentBundle,
    redact_keys: &BTreeSet<String>,
    template: &FormTemplate,
    proving_key: &ProvingKey,
    options: DisclosureOptions,
) -> Result<DisclosureBundle, ServiceError> {
    let mask = fields_to_mask(&bundle.document, redact_keys, template)?;
    let witness = assign_redaction_witness(bundle, &mask, template)?;
    let (proof, signals) = prove(proving_key, &witness)?;
    let rendering = if options.include_rendering {
        let redacted = apply_mask_plain(&bundle.buffer(template)?, &mask)?;
        Some(render_document(&parse_buffer(&redacted, template)?, template))
    } else {
        None
    };
    Ok(DisclosureBundle {
        proof: ProofJson::from(&proof),
        signals: signals.0.iter().map(|s| s.to_string()).collect(),
        template_id: template.id(),
        circuit_digest: Some(proving_key.circuit_digest().to_hex()),
        rendering,
        signature: options.include_signature.then(|| bundle.signature.clone()),
    })
}

/// Proves a numeric claim about the signed document. A false claim is
/// reported as an unsatisfied witness before any proving work.
pub fn prove_claim(
    bundle: &SignedDocumentBundle,
    spec: &ClaimSpec,
    template: &FormTemplate,
    proving_key: &ProvingKey,
) -> Result<DisclosureBundle, ServiceError> {
    let witness = assign_claim_witness(bundle, spec, template)?;
    let (proof, signals) = prove(proving_key, &witness)?;
    Ok(DisclosureBundle {
        proof: ProofJson::from(&proof),
        signals: signals.0.iter().map(|s| s.to_string()).collect(),
        template_id: template.id(),
        circuit_digest: Some(proving_key.circuit_digest().to_hex()),
        rendering: None,
        signature: None,
    })
}
