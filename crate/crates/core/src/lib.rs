//! Selective disclosure of authority-signed tax documents.
//!
//! A trusted tax service signs the MiMC-7 hash of a canonical document
//! buffer. The taxpayer proves in zero knowledge (Groth16 over BN254) that a
//! redacted copy of that buffer derives from the signed original, and any
//! third party verifies the proof offline against the service's public key.
//!
//! ```text
//! form      templates, canonical buffers, redaction masks
//! crypto    MiMC-7, Baby Jubjub, EdDSA
//! circuits  R1CS builder, gadgets, redaction and claim circuits
//! prover    Groth16 setup/prove/verify and proof.json/signals.json
//! services  signing, redact-and-prove, verification, HTTP facades
//! fixtures  the bundled 2020 Form 1040 template and a sample return
//! ```

pub mod bundle;
pub mod circuits;
pub mod crypto;
pub mod fixtures;
pub mod form;
pub mod prover;
pub mod services;
