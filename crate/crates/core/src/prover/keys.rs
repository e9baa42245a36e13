//! Proving and verifying keys bound to one circuit by its digest.
//!
//! Binary proving key layout (`ZKTXPK1`): magic, insecure flag byte, 32-byte
//! circuit digest, then length-prefixed (u64 LE) template JSON, circuit bytes
//! and the uncompressed arkworks key.

use ark_bn254::{Bn254, Fq, Fq2, G1Affine, G2Affine};
use ark_ec::AffineRepr;
use ark_groth16::PreparedVerifyingKey;
use ark_relations::r1cs::ConstraintMatrices;
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ProverError;
use crate::circuits::{CircuitDigest, ConstraintSystem};
use crate::crypto::Fr;
use crate::form::FormTemplate;

const PK_MAGIC: &[u8; 7] = b"ZKTXPK1";

pub struct ProvingKey {
    cs: ConstraintSystem,
    digest: CircuitDigest,
    template: FormTemplate,
    dev_insecure: bool,
    ark: ark_groth16::ProvingKey<Bn254>,
    matrices: ConstraintMatrices<Fr>,
}

impl std::fmt::Debug for ProvingKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProvingKey").field("circuit", &self.cs.label).field("digest", &self.digest).finish()
    }
}

fn matrices(cs: &ConstraintSystem) -> ConstraintMatrices<Fr> {
    let rows =
        |pick: fn(&crate::circuits::r1cs::Constraint) -> &crate::circuits::r1cs::SparseRow| -> Vec<Vec<(Fr, usize)>> {
            cs.constraints.iter().map(|c| pick(c).0.iter().map(|(i, v)| (*v, *i)).collect()).collect()
        };
    let a = rows(|c| &c.a);
    let b = rows(|c| &c.b);
    let c = rows(|c| &c.c);
    let nnz = |m: &Vec<Vec<(Fr, usize)>>| m.iter().map(Vec::len).sum();
    ConstraintMatrices {
        num_instance_variables: 1 + cs.num_inputs,
        num_witness_variables: cs.num_aux,
        num_constraints: cs.num_constraints(),
        a_num_non_zero: nnz(&a),
        b_num_non_zero: nnz(&b),
        c_num_non_zero: nnz(&c),
        a,
        b,
        c,
    }
}

impl ProvingKey {
    pub(crate) fn new(
        cs: ConstraintSystem,
        template: FormTemplate,
        dev_insecure: bool,
        ark: ark_groth16::ProvingKey<Bn254>,
    ) -> Self {
        let digest = cs.digest();
        let matrices = matrices(&cs);
        ProvingKey { cs, digest, template, dev_insecure, ark, matrices }
    }

    pub fn circuit(&self) -> &ConstraintSystem {
        &self.cs
    }

    pub fn circuit_digest(&self) -> CircuitDigest {
        self.digest
    }

    pub fn template(&self) -> &FormTemplate {
        &self.template
    }

    pub fn dev_insecure(&self) -> bool {
        self.dev_insecure
    }

    pub(crate) fn ark(&self) -> &ark_groth16::ProvingKey<Bn254> {
        &self.ark
    }

    pub(crate) fn matrices(&self) -> &ConstraintMatrices<Fr> {
        &self.matrices
    }

    pub fn verifying_key(&self) -> VerifyingKey {
        VerifyingKey::new(
            self.ark.vk.clone(),
            self.digest,
            self.cs.label.clone(),
            self.template.clone(),
            self.dev_insecure,
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(PK_MAGIC);
        out.push(self.dev_insecure as u8);
        out.extend_from_slice(&self.digest.0);
        let mut push = |bytes: &[u8]| {
            out.extend_from_slice(&(bytes.len() as u64).to_le_bytes());
            out.extend_from_slice(bytes);
        };
        push(serde_json::to_string(&self.template).expect("template serializes").as_bytes());
        push(&self.cs.to_bytes());
        let mut ark = Vec::new();
        self.ark.serialize_uncompressed(&mut ark).expect("in-memory write");
        push(&ark);
        out
    }

    /// Parses a key and checks the embedded circuit against the stored
    /// digest. Group elements are trusted, not re-validated.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ProverError> {
        let bad = |m: &str| ProverError::Malformed(format!("proving key: {m}"));
        if bytes.len() < 40 || &bytes[..7] != PK_MAGIC {
            return Err(bad("bad magic"));
        }
        let dev_insecure = match bytes[7] {
            0 => false,
            1 => true,
            _ => return Err(bad("bad flag byte")),
        };
        let digest = CircuitDigest(bytes[8..40].try_into().unwrap());
        let mut pos = 40;
        let mut next = || -> Result<&[u8], ProverError> {
            let len_end = pos + 8;
            let len = u64::from_le_bytes(bytes.get(pos..len_end).ok_or_else(|| bad("truncated"))?.try_into().unwrap());
            let end = len_end.checked_add(len as usize).ok_or_else(|| bad("truncated"))?;
            let s = bytes.get(len_end..end).ok_or_else(|| bad("truncated"))?;
            pos = end;
            Ok(s)
        };
        let template: FormTemplate = serde_json::from_slice(next()?).map_err(|e| bad(&format!("template: {e}")))?;
        let cs = ConstraintSystem::from_bytes(next()?).map_err(|e| bad(&e.to_string()))?;
        let mut ark_bytes = next()?;
        let ark = ark_groth16::ProvingKey::<Bn254>::deserialize_uncompressed_unchecked(&mut ark_bytes)
            .map_err(|e| bad(&e.to_string()))?;
        if !ark_bytes.is_empty() {
            return Err(bad("trailing bytes"));
        }
        if cs.digest() != digest {
            return Err(bad("circuit does not match its digest"));
        }
        if ark.vk.gamma_abc_g1.len() != 1 + cs.num_inputs {
            return Err(bad("key does not match the circuit's public inputs"));
        }
        Ok(ProvingKey::new(cs, template, dev_insecure, ark))
    }
}

#[derive(Clone)]
pub struct VerifyingKey {
    ark: ark_groth16::VerifyingKey<Bn254>,
    prepared: PreparedVerifyingKey<Bn254>,
    digest: CircuitDigest,
    label: String,
    template: FormTemplate,
    dev_insecure: bool,
}

impl std::fmt::Debug for VerifyingKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VerifyingKey").field("circuit", &self.label).field("digest", &self.digest).finish()
    }
}

impl PartialEq for VerifyingKey {
    fn eq(&self, other: &Self) -> bool {
        self.ark == other.ark
            && self.digest == other.digest
            && self.label == other.label
            && self.template == other.template
            && self.dev_insecure == other.dev_insecure
    }
}

pub(crate) fn g1_to_json(p: &G1Affine) -> [String; 2] {
    match p.xy() {
        Some((x, y)) => [x.to_string(), y.to_string()],
        None => ["0".into(), "0".into()],
    }
}

pub(crate) fn g2_to_json(p: &G2Affine) -> [[String; 2]; 2] {
    match p.xy() {
        Some((x, y)) => [[x.c0.to_string(), x.c1.to_string()], [y.c0.to_string(), y.c1.to_string()]],
        None => [["0".into(), "0".into()], ["0".into(), "0".into()]],
    }
}

fn fq(s: &str) -> Result<Fq, ProverError> {
    let canonical = !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
    match s.parse::<Fq>() {
        Ok(v) if canonical && v.to_string() == s => Ok(v),
        _ => Err(ProverError::Malformed(format!("{s:?} is not a canonical base field element"))),
    }
}

/// `[0, 0]` is the identity; anything else must be a subgroup point.
pub(crate) fn g1_from_json(v: &[String; 2]) -> Result<G1Affine, ProverError> {
    let (x, y) = (fq(&v[0])?, fq(&v[1])?);
    if x == Fq::from(0u64) && y == Fq::from(0u64) {
        return Ok(G1Affine::identity());
    }
    let p = G1Affine::new_unchecked(x, y);
    if !p.is_on_curve() || !p.is_in_correct_subgroup_assuming_on_curve() {
        return Err(ProverError::Malformed("G1 point is not on the curve".into()));
    }
    Ok(p)
}

pub(crate) fn g2_from_json(v: &[[String; 2]; 2]) -> Result<G2Affine, ProverError> {
    let x = Fq2::new(fq(&v[0][0])?, fq(&v[0][1])?);
    let y = Fq2::new(fq(&v[1][0])?, fq(&v[1][1])?);
    if x == Fq2::from(0u64) && y == Fq2::from(0u64) {
        return Ok(G2Affine::identity());
    }
    let p = G2Affine::new_unchecked(x, y);
    if !p.is_on_curve() || !p.is_in_correct_subgroup_assuming_on_curve() {
        return Err(ProverError::Malformed("G2 point is not in the prime-order subgroup".into()));
    }
    Ok(p)
}

#[derive(Serialize, Deserialize)]
struct VkJson {
    protocol: String,
    curve: String,
    #[serde(rename = "nPublic")]
    n_public: usize,
    vk_alpha_1: [String; 2],
    vk_beta_2: [[String; 2]; 2],
    vk_gamma_2: [[String; 2]; 2],
    vk_delta_2: [[String; 2]; 2],
    #[serde(rename = "IC")]
    ic: Vec<[String; 2]>,
    circuit_label: String,
    circuit_digest: CircuitDigest,
    dev_insecure_setup: bool,
    template: Value,
}

impl VerifyingKey {
    pub(crate) fn new(
        ark: ark_groth16::VerifyingKey<Bn254>,
        digest: CircuitDigest,
        label: String,
        template: FormTemplate,
        dev_insecure: bool,
    ) -> Self {
        let prepared = ark_groth16::prepare_verifying_key(&ark);
        VerifyingKey { ark, prepared, digest, label, template, dev_insecure }
    }

    pub fn circuit_digest(&self) -> CircuitDigest {
        self.digest
    }

    pub fn circuit_label(&self) -> &str {
        &self.label
    }

    pub fn template(&self) -> &FormTemplate {
        &self.template
    }

    pub fn dev_insecure(&self) -> bool {
        self.dev_insecure
    }

    pub fn num_inputs(&self) -> usize {
        self.ark.gamma_abc_g1.len() - 1
    }

    pub(crate) fn prepared(&self) -> &PreparedVerifyingKey<Bn254> {
        &self.prepared
    }

    pub fn to_json(&self) -> String {
        let doc = VkJson {
            protocol: "groth16".into(),
            curve: "bn254".into(),
            n_public: self.num_inputs(),
            vk_alpha_1: g1_to_json(&self.ark.alpha_g1),
            vk_beta_2: g2_to_json(&self.ark.beta_g2),
            vk_gamma_2: g2_to_json(&self.ark.gamma_g2),
            vk_delta_2: g2_to_json(&self.ark.delta_g2),
            ic: self.ark.gamma_abc_g1.iter().map(g1_to_json).collect(),
            circuit_label: self.label.clone(),
            circuit_digest: self.digest,
            dev_insecure_setup: self.dev_insecure,
            template: serde_json::to_value(&self.template).expect("template serializes"),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("vk serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ProverError> {
        let doc: VkJson =
            serde_json::from_str(text).map_err(|e| ProverError::Malformed(format!("verification key: {e}")))?;
        if doc.protocol != "groth16" || doc.curve != "bn254" {
            return Err(ProverError::Malformed(format!("unsupported protocol {}/{}", doc.protocol, doc.curve)));
        }
        if doc.ic.len() != doc.n_public + 1 {
            return Err(ProverError::Malformed("IC length does not match nPublic".into()));
        }
        let template: FormTemplate =
            serde_json::from_value(doc.template).map_err(|e| ProverError::Malformed(format!("template: {e}")))?;
        let ark = ark_groth16::VerifyingKey::<Bn254> {
            alpha_g1: g1_from_json(&doc.vk_alpha_1)?,
            beta_g2: g2_from_json(&doc.vk_beta_2)?,
            gamma_g2: g2_from_json(&doc.vk_gamma_2)?,
            delta_g2: g2_from_json(&doc.vk_delta_2)?,
            gamma_abc_g1: doc.ic.iter().map(g1_from_json).collect::<Result<_, _>>()?,
        };
        Ok(VerifyingKey::new(ark, doc.circuit_digest, doc.circuit_label, template, doc.dev_insecure_setup))
    }
}
