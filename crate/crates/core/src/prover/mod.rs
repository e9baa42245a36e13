//! Groth16 over BN254, backed by arkworks: per-circuit setup, proving,
//! verification and the `proof.json` / `signals.json` /
//! `verification_key.json` formats.

pub mod artifacts;
pub mod keys;

use ark_bn254::Bn254;
use ark_ff::UniformRand;
use ark_groth16::Groth16;
use ark_relations::r1cs::{
    ConstraintSynthesizer, ConstraintSystemRef, LinearCombination as ArkLc, SynthesisError, Variable as ArkVar,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::circuits::{ConstraintSystem, WitnessAssignment};
use crate::crypto::field::decimal_vec;
use crate::crypto::Fr;
use crate::form::FormTemplate;

pub use artifacts::{export_artifacts, import_artifacts, ProofJson};
pub use keys::{ProvingKey, VerifyingKey};

/// Minimum setup entropy in bytes.
pub const MIN_ENTROPY: usize = 32;

#[derive(Debug, Error)]
pub enum ProverError {
    #[error("setup entropy must be at least {MIN_ENTROPY} bytes, got {0}")]
    EntropyTooShort(usize),
    #[error("witness violates constraint {0}")]
    UnsatisfiedWitness(usize),
    #[error("witness was built for circuit {witness} but the key is for {key}")]
    DigestMismatch { key: String, witness: String },
    #[error("malformed artifact: {0}")]
    Malformed(String),
    #[error("proving backend: {0}")]
    Backend(#[from] SynthesisError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Proof(pub ark_groth16::Proof<Bn254>);

/// Public inputs in circuit order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PublicSignals(#[serde(with = "decimal_vec")] pub Vec<Fr>);

impl PublicSignals {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Replays a finished [`ConstraintSystem`] into arkworks. Inputs and
/// witnesses are allocated in flat-index order so variable numbering is
/// preserved exactly.
struct Replay<'a> {
    cs: &'a ConstraintSystem,
}

impl ConstraintSynthesizer<Fr> for Replay<'_> {
    fn generate_constraints(self, ark: ConstraintSystemRef<Fr>) -> Result<(), SynthesisError> {
        let mut vars = Vec::with_capacity(self.cs.num_variables());
        vars.push(ArkVar::One);
        for _ in 0..self.cs.num_inputs {
            vars.push(ark.new_input_variable(|| Ok(Fr::from(0u64)))?);
        }
        for _ in 0..self.cs.num_aux {
            vars.push(ark.new_witness_variable(|| Ok(Fr::from(0u64)))?);
        }
        let lc = |row: &crate::circuits::r1cs::SparseRow| ArkLc(row.0.iter().map(|(i, c)| (*c, vars[*i])).collect());
        for c in &self.cs.constraints {
            ark.enforce_constraint(lc(&c.a), lc(&c.b), lc(&c.c))?;
        }
        Ok(())
    }
}

/// Local single-party setup. The toxic waste is derived from `entropy` and
/// the circuit digest, so the resulting keys are marked insecure for
/// production use, and circuits whose matrices coincide still get unrelated
/// keys.
pub fn trusted_setup(
    cs: &ConstraintSystem,
    template: &FormTemplate,
    entropy: &[u8],
) -> Result<(ProvingKey, VerifyingKey), ProverError> {
    if entropy.len() < MIN_ENTROPY {
        return Err(ProverError::EntropyTooShort(entropy.len()));
    }
    let seed = Sha256::new().chain_update(entropy).chain_update(cs.digest().0).finalize();
    let mut rng = ChaCha20Rng::from_seed(seed.into());
    let ark_pk = Groth16::<Bn254>::generate_random_parameters_with_reduction(Replay { cs }, &mut rng)?;
    let pk = ProvingKey::new(cs.clone(), template.clone(), true, ark_pk);
    let vk = pk.verifying_key();
    Ok((pk, vk))
}

pub fn prove(pk: &ProvingKey, w: &WitnessAssignment) -> Result<(Proof, PublicSignals), ProverError> {
    if w.circuit_digest != pk.circuit_digest() {
        return Err(ProverError::DigestMismatch {
            key: pk.circuit_digest().to_hex(),
            witness: w.circuit_digest.to_hex(),
        });
    }
    if let Some(i) = pk.circuit().first_unsatisfied(&w.values) {
        return Err(ProverError::UnsatisfiedWitness(i));
    }
    let mut rng = rand::thread_rng();
    let r = Fr::rand(&mut rng);
    let s = Fr::rand(&mut rng);
    let cs = pk.circuit();
    let proof = Groth16::<Bn254>::create_proof_with_reduction_and_matrices(
        pk.ark(),
        r,
        s,
        pk.matrices(),
        1 + cs.num_inputs,
        cs.num_constraints(),
        &w.values,
    )?;
    Ok((Proof(proof), PublicSignals(w.public_inputs().to_vec())))
}

/// Total: any malformed or mismatched input is a rejection.
pub fn verify_proof(vk: &VerifyingKey, proof: &Proof, signals: &PublicSignals) -> bool {
    if signals.len() != vk.num_inputs() {
        return false;
    }
    Groth16::<Bn254>::verify_proof(vk.prepared(), &proof.0, &signals.0).unwrap_or(false)
}
