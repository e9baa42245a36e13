//! The three parties: the tax service that signs, the taxpayer's local
//! redact-and-prove step, and the verifier that checks disclosures against
//! an allowlist of signer keys. [`http`] puts each behind a JSON API.

pub mod http;
pub mod keys;
pub mod redact;
pub mod tts;
pub mod verify;

use thiserror::Error;

use crate::circuits::CircuitError;
use crate::form::FormError;
use crate::prover::ProverError;

pub use keys::{PublicKeyFile, SecretKeyFile, TrustedKeys};
pub use redact::{
    prove_claim, redact_all_except, redact_and_prove, render_document, DisclosureBundle, DisclosureOptions, Manifest,
};
pub use tts::{tts_sign_document, TtsService};
pub use verify::{verify_bundle, verify_with_keys, ClaimStatement, RejectReason, Verdict, VerdictReport};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Prover(#[from] ProverError),
    #[error("unknown template {0:?}")]
    UnknownTemplate(String),
    #[error("{0}")]
    InvalidRequest(String),
}

impl ServiceError {
    /// Stable machine-readable code for API responses.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::Form(FormError::UnknownKey(_)) => "UNKNOWN_KEY",
            ServiceError::Form(FormError::Overflow { .. }) => "OVERFLOW",
            ServiceError::Form(_) => "INVALID_DOCUMENT",
            ServiceError::Circuit(CircuitError::SignatureMismatch) => "SIGNATURE_MISMATCH",
            ServiceError::Circuit(CircuitError::MaskInvalid(_)) => "MASK_INVALID",
            ServiceError::Circuit(CircuitError::Unsatisfied(_)) => "UNSATISFIED_WITNESS",
            ServiceError::Circuit(CircuitError::InvalidClaim(_)) => "INVALID_CLAIM",
            ServiceError::Circuit(CircuitError::Form(FormError::UnknownKey(_))) => "UNKNOWN_KEY",
            ServiceError::Circuit(_) => "CIRCUIT_ERROR",
            ServiceError::Prover(ProverError::UnsatisfiedWitness(_)) => "UNSATISFIED_WITNESS",
            ServiceError::Prover(_) => "PROVER_ERROR",
            ServiceError::UnknownTemplate(_) => "UNKNOWN_TEMPLATE",
            ServiceError::InvalidRequest(_) => "INVALID_REQUEST",
        }
    }

    /// Whether the caller, rather than this process, is at fault.
    pub fn is_client_error(&self) -> bool {
        !matches!(
            self,
            ServiceError::Circuit(CircuitError::Unsatisfied(_) | CircuitError::Decode(_))
                | ServiceError::Prover(ProverError::UnsatisfiedWitness(_) | ProverError::Backend(_))
        )
    }
}
