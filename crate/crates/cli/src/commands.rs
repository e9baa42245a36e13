use std::collections::BTreeSet;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::RngCore;
use zktax::bundle::SignedDocumentBundle;
use zktax::circuits::{build_redaction_circuit, CircuitError};
use zktax::crypto::keygen;
use zktax::fixtures::form_1040_template;
use zktax::form::{load_template, parse_buffer, AsciiBuffer, FormTemplate, TaxDocument};
use zktax::prover::{trusted_setup, ProofJson, ProvingKey, VerifyingKey};
use zktax::services::http::{self, LocalState, Router, VerifyState};
use zktax::services::{
    redact_all_except, redact_and_prove, render_document, tts_sign_document, verify_bundle, DisclosureBundle,
    DisclosureOptions, Manifest, PublicKeyFile, RejectReason, SecretKeyFile, ServiceError, TrustedKeys, TtsService,
    Verdict, VerdictReport,
};

use crate::files::{read_bytes, read_json, read_text, read_value, require_file, write_atomic};
use crate::{CliError, Command, TemplateArg};

const PROVING_KEY_FILE: &str = "proving.key";
const VERIFYING_KEY_FILE: &str = "verification_key.json";

impl From<ServiceError> for CliError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Form(_)
            | ServiceError::Circuit(CircuitError::Form(_) | CircuitError::TemplateMismatch { .. })
            | ServiceError::UnknownTemplate(_)
            | ServiceError::InvalidRequest(_) => CliError::Usage(e.to_string()),
            _ => CliError::Crypto(e.to_string()),
        }
    }
}

pub fn run(command: Command, artifact_dir: &Path) -> Result<(), CliError> {
    let default_pk = || artifact_dir.join(PROVING_KEY_FILE);
    let default_vk = || artifact_dir.join(VERIFYING_KEY_FILE);
    match command {
        Command::Keygen { out, public_out, label, seed_hex } => keygen_cmd(&out, public_out, &label, seed_hex),
        Command::Setup { template, out_dir, entropy_hex } => {
            setup_cmd(&template, &out_dir.unwrap_or_else(|| artifact_dir.to_path_buf()), entropy_hex)
        }
        Command::Sign { input, template, key, out } => sign_cmd(&input, &template, &key, &out),
        Command::RedactProve { bundle, redact_all_except, redact, pk, out, include_signature } => redact_prove_cmd(
            &bundle,
            redact_all_except,
            redact,
            &pk.unwrap_or_else(default_pk),
            &out,
            include_signature,
        ),
        Command::Verify { input, vk, trust, json } => verify_cmd(&input, &vk.unwrap_or_else(default_vk), &trust, json),
        Command::Inspect { path } => inspect_cmd(&path),
        Command::ServeTts { key, template, addr } => {
            let template = load_template_arg(&template)?;
            let file: SecretKeyFile = read_json(&key)?;
            let sk = file.secret_key().map_err(|e| CliError::Usage(format!("{}: {e}", key.display())))?;
            let service = Arc::new(TtsService::new(file.label, sk, [template]));
            serve(http::tts_router(service), addr)
        }
        Command::ServeVerify { vk, trust, addr } => {
            let paths = if vk.is_empty() { vec![default_vk()] } else { vk };
            let keys = paths.iter().map(|p| load_vk(p)).collect::<Result<Vec<_>, _>>()?;
            let trusted = load_trusted(&trust)?;
            serve(http::verify_router(Arc::new(VerifyState { keys, trusted })), addr)
        }
        Command::ServeLocal { bundle, pk, addr, include_signature } => {
            http::ensure_loopback(&addr)?;
            let pk_path = pk.unwrap_or_else(default_pk);
            require_file(&bundle)?;
            require_file(&pk_path)?;
            let bundle: SignedDocumentBundle = read_json(&bundle)?;
            let proving_key = load_pk(&pk_path)?;
            let template = proving_key.template().clone();
            check_bundle_template(&bundle, &template)?;
            let state = LocalState {
                bundle,
                template,
                proving_key: Arc::new(proving_key),
                options: DisclosureOptions { include_signature, include_rendering: true },
                busy: Default::default(),
            };
            serve(http::local_router(Arc::new(state)), addr)
        }
    }
}

fn load_template_arg(arg: &TemplateArg) -> Result<FormTemplate, CliError> {
    match &arg.template {
        Some(path) => load_template(&read_text(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display()))),
        None => Ok(form_1040_template()),
    }
}

fn load_pk(path: &Path) -> Result<ProvingKey, CliError> {
    ProvingKey::from_bytes(&read_bytes(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_vk(path: &Path) -> Result<VerifyingKey, CliError> {
    VerifyingKey::from_json(&read_text(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_trusted(paths: &[PathBuf]) -> Result<TrustedKeys, CliError> {
    let mut trusted = TrustedKeys::new();
    for p in paths {
        trusted.insert(read_json::<PublicKeyFile>(p)?);
    }
    Ok(trusted)
}

fn check_bundle_template(bundle: &SignedDocumentBundle, template: &FormTemplate) -> Result<(), CliError> {
    if bundle.template_id != template.id() {
        return Err(CliError::Usage(format!(
            "bundle is for template {} but the proving key is for {}",
            bundle.template_id,
            template.id()
        )));
    }
    Ok(())
}

fn to_json_bytes<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn keygen_cmd(out: &Path, public_out: Option<PathBuf>, label: &str, seed_hex: Option<String>) -> Result<(), CliError> {
    let seed: [u8; 32] = match seed_hex {
        Some(h) => hex::decode(h.trim())
            .ok()
            .and_then(|b| b.try_into().ok())
            .ok_or_else(|| CliError::Usage("--seed-hex must be 64 hex characters".into()))?,
        None => {
            let mut s = [0u8; 32];
            rand::rngs::OsRng.fill_bytes(&mut s);
            s
        }
    };
    let (sk, pk) = keygen(seed);
    let file = SecretKeyFile::new(label, &sk);
    let public_out = public_out.unwrap_or_else(|| out.with_extension("pub"));
    write_atomic(out, &to_json_bytes(&file), true)?;
    write_atomic(&public_out, &to_json_bytes(&file.public()), false)?;
    println!("wrote {} and {}", out.display(), public_out.display());
    println!("public key x={} y={}", pk.0.x, pk.0.y);
    Ok(())
}

fn setup_cmd(template: &TemplateArg, out_dir: &Path, entropy_hex: Option<String>) -> Result<(), CliError> {
    let template = load_template_arg(template)?;
    let entropy = match entropy_hex {
        Some(h) => hex::decode(h.trim()).map_err(|_| CliError::Usage("--entropy-hex is not hex".into()))?,
        None => {
            let mut e = vec![0u8; 64];
            rand::rngs::OsRng.fill_bytes(&mut e);
            e
        }
    };
    if entropy.len() < zktax::prover::MIN_ENTROPY {
        return Err(CliError::Usage(format!("setup entropy must be at least {} bytes", zktax::prover::MIN_ENTROPY)));
    }
    let cs = build_redaction_circuit(&template).map_err(|e| CliError::Usage(e.to_string()))?;
    let (pk, vk) = trusted_setup(&cs, &template, &entropy).map_err(|e| CliError::Crypto(e.to_string()))?;
    let pk_path = out_dir.join(PROVING_KEY_FILE);
    let vk_path = out_dir.join(VERIFYING_KEY_FILE);
    write_atomic(&pk_path, &pk.to_bytes(), false)?;
    write_atomic(&vk_path, vk.to_json().as_bytes(), false)?;
    println!(
        "circuit {} ({} constraints, {} public inputs) digest {}",
        cs.label,
        cs.num_constraints(),
        cs.num_inputs,
        pk.circuit_digest()
    );
    println!("wrote {} and {}", pk_path.display(), vk_path.display());
    println!("WARNING: single-party development setup; not for production use");
    Ok(())
}

fn sign_cmd(input: &Path, template: &TemplateArg, key: &Path, out: &Path) -> Result<(), CliError> {
    let template = load_template_arg(template)?;
    require_file(input)?;
    require_file(key)?;
    let doc = TaxDocument::from_flat_json(&read_value(input)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
    let file: SecretKeyFile = read_json(key)?;
    let sk = file.secret_key().map_err(|e| CliError::Usage(format!("{}: {e}", key.display())))?;
    let bundle = tts_sign_document(&doc, &template, &sk)?;
    write_atomic(out, &to_json_bytes(&bundle), false)?;
    println!("signed {} document as {}; wrote {}", template.id(), file.label, out.display());
    Ok(())
}

fn redact_prove_cmd(
    bundle_path: &Path,
    keep: Option<Vec<String>>,
    redact: Option<Vec<String>>,
    pk_path: &Path,
    out: &Path,
    include_signature: bool,
) -> Result<(), CliError> {
    require_file(bundle_path)?;
    require_file(pk_path)?;
    let bundle: SignedDocumentBundle = read_json(bundle_path)?;
    let to_set = |v: Vec<String>| v.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    let selection: (bool, BTreeSet<String>) = match (keep, redact) {
        (Some(k), None) => (true, to_set(k)),
        (None, Some(r)) => (false, to_set(r)),
        (None, None) => return Err(CliError::Usage("pass --redact-all-except or --redact".into())),
        (Some(_), Some(_)) => unreachable!("clap rejects both"),
    };
    let pk = load_pk(pk_path)?;
    let template = pk.template().clone();
    check_bundle_template(&bundle, &template)?;
    let redact_keys = if selection.0 {
        redact_all_except(&template, &selection.1)?
    } else {
        if let Some(k) = selection.1.iter().find(|k| !template.is_known_key(k)) {
            return Err(CliError::Usage(format!("unknown field key {k:?}")));
        }
        selection.1
    };
    let options = DisclosureOptions { include_signature, include_rendering: true };
    let disclosure = redact_and_prove(&bundle, &redact_keys, &template, &pk, options)?;
    for (name, contents) in disclosure.to_files() {
        write_atomic(&out.join(name), contents.as_bytes(), false)?;
    }
    println!("redacted {} field(s); wrote {}", redact_keys.len(), out.display());
    Ok(())
}

fn read_disclosure(dir: &Path) -> Result<Result<DisclosureBundle, String>, CliError> {
    if !dir.is_dir() {
        return Err(CliError::Usage(format!("{} is not a disclosure directory", dir.display())));
    }
    let mut texts = Vec::new();
    for name in DisclosureBundle::FILES {
        texts.push(read_text(&dir.join(name))?);
    }
    Ok(DisclosureBundle::from_files(&texts[0], &texts[1], &texts[2]))
}

fn print_report(report: &VerdictReport, template: &FormTemplate) {
    match report.verdict {
        Verdict::Accepted => println!("ACCEPTED: {}", report.message),
        Verdict::Rejected => {
            let reason = serde_json::to_value(report.reason).ok().and_then(|v| v.as_str().map(String::from));
            println!("REJECTED {}: {}", reason.unwrap_or_default(), report.message);
        }
    }
    if report.insecure_setup {
        println!("WARNING: the verifying key comes from an insecure development setup");
    }
    if let Some(doc) = &report.document {
        println!();
        print!("{}", render_document(doc, template));
    }
    if let Some(claim) = &report.claim {
        println!("claim: {}", serde_json::to_string(claim).expect("claim serializes"));
    }
}

fn verify_cmd(input: &Path, vk_path: &Path, trust: &[PathBuf], json: bool) -> Result<(), CliError> {
    require_file(vk_path)?;
    for t in trust {
        require_file(t)?;
    }
    let disclosure = read_disclosure(input)?;
    let vk = load_vk(vk_path)?;
    let trusted = load_trusted(trust)?;
    let report = match disclosure {
        Ok(d) => verify_bundle(&d, &vk, &trusted),
        Err(message) => VerdictReport {
            verdict: Verdict::Rejected,
            reason: Some(RejectReason::Malformed),
            message,
            circuit_label: vk.circuit_label().to_string(),
            signer: None,
            insecure_setup: vk.dev_insecure(),
            document: None,
            claim: None,
        },
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print_report(&report, vk.template());
    }
    if report.accepted() {
        Ok(())
    } else {
        Err(CliError::Rejected)
    }
}

fn inspect_cmd(path: &Path) -> Result<(), CliError> {
    println!("UNVERIFIED: contents shown as-is; nothing below has been checked");
    if path.is_dir() {
        let d = read_disclosure(path)?.map_err(CliError::Usage)?;
        let manifest = Manifest {
            template_id: d.template_id.clone(),
            circuit_digest: d.circuit_digest.clone(),
            rendering: None,
            signature: d.signature.clone(),
        };
        println!("disclosure for template {}", manifest.template_id);
        if let Some(digest) = &manifest.circuit_digest {
            println!("circuit digest {digest}");
        }
        println!("{} public signals", d.signals.len());
        if d.signals.len() > 2 {
            let n = d.signals.len() - 2;
            println!("claimed signer x={} y={}", d.signals[n], d.signals[n + 1]);
            let bytes: Option<Vec<u8>> = d.signals[..n].iter().map(|s| s.parse::<u8>().ok()).collect();
            if let Some(buf) = bytes.and_then(|b| AsciiBuffer::from_padded(b).ok()) {
                println!("redacted buffer: {}", buf.json());
                if d.template_id == form_1040_template().id() {
                    if let Ok(doc) = parse_buffer(&buf, &form_1040_template()) {
                        print!("{}", render_document(&doc, &form_1040_template()));
                    }
                }
            }
        }
        if d.signature.is_some() {
            println!("note: this disclosure includes the document signature");
        }
        return Ok(());
    }
    let bytes = read_bytes(path)?;
    if bytes.starts_with(b"ZKTXPK1") {
        let pk = ProvingKey::from_bytes(&bytes).map_err(|e| CliError::Usage(e.to_string()))?;
        println!(
            "proving key for {} ({} constraints) digest {}{}",
            pk.circuit().label,
            pk.circuit().num_constraints(),
            pk.circuit_digest(),
            if pk.dev_insecure() { ", insecure development setup" } else { "" }
        );
        return Ok(());
    }
    let value: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Usage(format!("{}: not JSON or a proving key: {e}", path.display())))?;
    if let Ok(bundle) = serde_json::from_value::<SignedDocumentBundle>(value.clone()) {
        println!("signed bundle for template {} (PRIVATE: contains the full document)", bundle.template_id);
        println!("signer x={} y={}", bundle.public_key.0.x, bundle.public_key.0.y);
        println!("{}", serde_json::to_string_pretty(&bundle.document).expect("document serializes"));
    } else if let Ok(proof) = serde_json::from_value::<ProofJson>(value.clone()) {
        println!("{} proof over {}", proof.protocol, proof.curve);
        println!("{}", serde_json::to_string_pretty(&proof).expect("proof serializes"));
    } else if value.get("vk_alpha_1").is_some() {
        let vk =
            VerifyingKey::from_json(&String::from_utf8_lossy(&bytes)).map_err(|e| CliError::Usage(e.to_string()))?;
        println!(
            "verifying key for {} ({} public inputs) digest {}{}",
            vk.circuit_label(),
            vk.num_inputs(),
            vk.circuit_digest(),
            if vk.dev_insecure() { ", insecure development setup" } else { "" }
        );
    } else {
        println!("{}", serde_json::to_string_pretty(&value).expect("JSON re-serializes"));
    }
    Ok(())
}

fn serve(router: Router, addr: SocketAddr) -> Result<(), CliError> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
    runtime
        .block_on(http::serve(router, addr, |bound| {
            println!("listening on http://{bound}");
            let _ = std::io::stdout().flush();
        }))
        .map_err(|e| CliError::Io(format!("{addr}: {e}")))
}
