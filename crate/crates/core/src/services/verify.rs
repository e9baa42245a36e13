//! Verification of disclosure bundles against a verifying key and a signer
//! allowlist. Every failure is a rejection with a reason, never an error.

use serde::{Deserialize, Serialize};

use super::keys::TrustedKeys;
use super::redact::DisclosureBundle;
use crate::circuits::{ClaimSpec, Relation};
use crate::crypto::field::{fr_from_decimal, fr_to_biguint};
use crate::crypto::{Fr, Point, PublicKey};
use crate::form::{parse_buffer, AsciiBuffer, FormTemplate, TaxDocument};
use crate::prover::{verify_proof, Proof, PublicSignals, VerifyingKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accepted,
    Rejected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RejectReason {
    BadProof,
    UntrustedSigner,
    CircuitMismatch,
    Malformed,
}

/// What an accepted claim proof establishes.
pub type ClaimStatement = ClaimSpec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub reason: Option<RejectReason>,
    pub message: String,
    pub circuit_label: String,
    /// Label of the matching trusted key.
    pub signer: Option<String>,
    pub insecure_setup: bool,
    /// Recovered redacted document, for redaction proofs.
    pub document: Option<TaxDocument>,
    pub claim: Option<ClaimStatement>,
}

impl VerdictReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accepted
    }

    fn reject(vk: &VerifyingKey, reason: RejectReason, message: impl Into<String>) -> Self {
        VerdictReport {
            verdict: Verdict::Rejected,
            reason: Some(reason),
            message: message.into(),
            circuit_label: vk.circuit_label().to_string(),
            signer: None,
            insecure_setup: vk.dev_insecure(),
            document: None,
            claim: None,
        }
    }
}

enum Statement {
    Document(TaxDocument),
    Claim(ClaimSpec),
}

fn to_u64(x: &Fr) -> Option<u64> {
    u64::try_from(fr_to_biguint(x)).ok()
}

/// Decodes the public inputs that precede the signer key.
fn decode_statement(vk: &VerifyingKey, template: &FormTemplate, head: &[Fr]) -> Result<Statement, String> {
    let label = vk.circuit_label();
    let prefix = |kind: &str| format!("{kind}/{}/", template.id());
    if label == format!("redaction/{}", template.id()) {
        let bytes = head
            .iter()
            .map(|x| to_u64(x).filter(|b| *b < 128).map(|b| b as u8))
            .collect::<Option<Vec<u8>>>()
            .ok_or("signal byte out of range")?;
        let buf = AsciiBuffer::from_padded(bytes).map_err(|e| e.to_string())?;
        return parse_buffer(&buf, template).map(Statement::Document).map_err(|e| e.to_string());
    }
    if let Some(key) = label.strip_prefix(&prefix("range")) {
        let lo = to_u64(&head[0]).ok_or("lower bound exceeds 64 bits")?;
        let hi = to_u64(&head[1]).ok_or("upper bound exceeds 64 bits")?;
        return Ok(Statement::Claim(ClaimSpec::Range { key: key.into(), lo, hi }));
    }
    if let Some(rest) = label.strip_prefix(&prefix("compare")) {
        let (key_a, key_b) = template
            .field_keys()
            .find_map(|a| rest.strip_prefix(a).and_then(|r| r.strip_prefix('/')).map(|b| (a, b)))
            .filter(|(_, b)| template.field(b).is_some())
            .ok_or("comparison circuit names unknown fields")?;
        let relation = to_u64(&head[0]).and_then(Relation::from_id).ok_or("unknown relation id")?;
        return Ok(Statement::Claim(ClaimSpec::Compare { key_a: key_a.into(), key_b: key_b.into(), relation }));
    }
    Err(format!("unrecognized circuit {label:?}"))
}

pub fn verify_bundle(d: &DisclosureBundle, vk: &VerifyingKey, trusted: &TrustedKeys) -> VerdictReport {
    use RejectReason::*;
    let template = vk.template();

    if let Some(digest) = &d.circuit_digest {
        if *digest != vk.circuit_digest().to_hex() {
            return VerdictReport::reject(vk, CircuitMismatch, "disclosure was produced for a different circuit");
        }
    }
    if d.template_id != template.id() {
        return VerdictReport::reject(
            vk,
            CircuitMismatch,
            format!("disclosure is for template {:?}, key is for {:?}", d.template_id, template.id()),
        );
    }
    let signals = match d.signals.iter().map(|s| fr_from_decimal(s)).collect::<Option<Vec<Fr>>>() {
        Some(s) => PublicSignals(s),
        None => return VerdictReport::reject(vk, Malformed, "signals must be decimal field elements"),
    };
    if signals.len() != vk.num_inputs() || signals.len() < 2 {
        return VerdictReport::reject(
            vk,
            Malformed,
            format!("expected {} signals, found {}", vk.num_inputs(), signals.len()),
        );
    }
    let proof = match Proof::try_from(&d.proof) {
        Ok(p) => p,
        Err(e) => return VerdictReport::reject(vk, Malformed, e.to_string()),
    };
    if !verify_proof(vk, &proof, &signals) {
        return VerdictReport::reject(vk, BadProof, "proof does not verify against the public signals");
    }

    let (head, pk) = signals.0.split_at(signals.len() - 2);
    let pk = PublicKey(Point { x: pk[0], y: pk[1] });
    let Some(signer) = trusted.label_of(&pk) else {
        return VerdictReport::reject(vk, UntrustedSigner, "signer key is not in the trusted set");
    };
    let statement = match decode_statement(vk, template, head) {
        Ok(s) => s,
        Err(e) => return VerdictReport::reject(vk, Malformed, e),
    };
    let (document, claim) = match statement {
        Statement::Document(doc) => (Some(doc), None),
        Statement::Claim(c) => (None, Some(c)),
    };
    VerdictReport {
        verdict: Verdict::Accepted,
        reason: None,
        message: format!("signed by {signer}"),
        circuit_label: vk.circuit_label().to_string(),
        signer: Some(signer.to_string()),
        insecure_setup: vk.dev_insecure(),
        document,
        claim,
    }
}

/// Picks the verifying key a disclosure names (by digest, or else by
/// template and signal count) and verifies against it.
pub fn verify_with_keys(d: &DisclosureBundle, keys: &[VerifyingKey], trusted: &TrustedKeys) -> VerdictReport {
    let chosen = match &d.circuit_digest {
        Some(digest) => keys.iter().find(|k| k.circuit_digest().to_hex() == *digest),
        None => keys
            .iter()
            .find(|k| k.template().id() == d.template_id && k.num_inputs() == d.signals.len())
            .or_else(|| keys.iter().find(|k| k.template().id() == d.template_id)),
    };
    match chosen {
        Some(vk) => verify_bundle(d, vk, trusted),
        None => VerdictReport {
            verdict: Verdict::Rejected,
            reason: Some(RejectReason::CircuitMismatch),
            message: "no verifying key for this disclosure".into(),
            circuit_label: String::new(),
            signer: None,
            insecure_setup: false,
            document: None,
            claim: None,
        },
    }
}
