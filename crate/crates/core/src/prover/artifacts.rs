//! `proof.json` and `signals.json`.

use serde::{Deserialize, Serialize};

use super::keys::{g1_from_json, g1_to_json, g2_from_json, g2_to_json};
use super::{Proof, ProverError, PublicSignals};
use crate::crypto::field::fr_from_decimal;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofJson {
    pub protocol: String,
    pub curve: String,
    pub pi_a: [String; 2],
    pub pi_b: [[String; 2]; 2],
    pub pi_c: [String; 2],
}

impl From<&Proof> for ProofJson {
    fn from(p: &Proof) -> Self {
        ProofJson {
            protocol: "groth16".into(),
            curve: "bn254".into(),
            pi_a: g1_to_json(&p.0.a),
            pi_b: g2_to_json(&p.0.b),
            pi_c: g1_to_json(&p.0.c),
        }
    }
}

impl TryFrom<&ProofJson> for Proof {
    type Error = ProverError;

    fn try_from(j: &ProofJson) -> Result<Self, ProverError> {
        if j.protocol != "groth16" || j.curve != "bn254" {
            return Err(ProverError::Malformed(format!("unsupported proof type {}/{}", j.protocol, j.curve)));
        }
        Ok(Proof(ark_groth16::Proof {
            a: g1_from_json(&j.pi_a)?,
            b: g2_from_json(&j.pi_b)?,
            c: g1_from_json(&j.pi_c)?,
        }))
    }
}

pub fn proof_to_json(proof: &Proof) -> String {
    let mut s = serde_json::to_string_pretty(&ProofJson::from(proof)).expect("proof serializes");
    s.push('\n');
    s
}

pub fn proof_from_json(text: &str) -> Result<Proof, ProverError> {
    let j: ProofJson = serde_json::from_str(text).map_err(|e| ProverError::Malformed(format!("proof.json: {e}")))?;
    Proof::try_from(&j)
}

pub fn signals_to_json(signals: &PublicSignals) -> String {
    let mut s =
        serde_json::to_string(&signals.0.iter().map(|x| x.to_string()).collect::<Vec<_>>()).expect("signals serialize");
    s.push('\n');
    s
}

pub fn signals_from_json(text: &str) -> Result<PublicSignals, ProverError> {
    let raw: Vec<String> =
        serde_json::from_str(text).map_err(|e| ProverError::Malformed(format!("signals.json: {e}")))?;
    raw.iter()
        .map(|s| {
            fr_from_decimal(s).ok_or_else(|| ProverError::Malformed(format!("signal {s:?} is not a field element")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(PublicSignals)
}

/// `(proof.json, signals.json)` contents.
pub fn export_artifacts(proof: &Proof, signals: &PublicSignals) -> (String, String) {
    (proof_to_json(proof), signals_to_json(signals))
}

pub fn import_artifacts(proof_json: &str, signals_json: &str) -> Result<(Proof, PublicSignals), ProverError> {
    Ok((proof_from_json(proof_json)?, signals_from_json(signals_json)?))
}
