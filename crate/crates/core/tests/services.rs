mod common;

use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::sync::{Arc, OnceLock};

use serde_json::{json, Value};
use zktax::circuits::{build_claim_circuit, build_redaction_circuit, CircuitError, ClaimSpec, Relation};
use zktax::crypto::keygen;
use zktax::fixtures::{compact_1040_template, sample_document_for};
use zktax::form::{apply_mask_plain, fields_to_mask, parse_buffer, FormError, FormTemplate, TaxDocument};
use zktax::prover::{trusted_setup, ProvingKey, VerifyingKey};
use zktax::services::http::{local_router, serve, tts_router, verify_router, LocalState, Router, VerifyState};
use zktax::services::{
    prove_claim, redact_all_except, redact_and_prove, render_document, verify_bundle, verify_with_keys,
    DisclosureBundle, DisclosureOptions, RejectReason, ServiceError, TrustedKeys, TtsService,
};

use common::{sign, tts_key};

fn template() -> FormTemplate {
    compact_1040_template()
}

fn keys() -> &'static (Arc<ProvingKey>, VerifyingKey) {
    static KEYS: OnceLock<(Arc<ProvingKey>, VerifyingKey)> = OnceLock::new();
    KEYS.get_or_init(|| {
        let t = template();
        let (pk, vk) = trusted_setup(&build_redaction_circuit(&t).unwrap(), &t, &[5; 32]).unwrap();
        (Arc::new(pk), vk)
    })
}

fn trusted() -> TrustedKeys {
    TrustedKeys::new().with("irs", tts_key().public_key())
}

fn set(keys: &[&str]) -> BTreeSet<String> {
    keys.iter().map(|k| k.to_string()).collect()
}

/// The headline disclosure: everything but name and total income redacted.
fn headline() -> &'static DisclosureBundle {
    static BUNDLE: OnceLock<DisclosureBundle> = OnceLock::new();
    BUNDLE.get_or_init(|| {
        let t = template();
        let bundle = sign(&sample_document_for(&t), &t);
        let redact = redact_all_except(&t, &set(&["fname", "lname", "f_15"])).unwrap();
        redact_and_prove(&bundle, &redact, &t, &keys().0, DisclosureOptions::default()).unwrap()
    })
}

#[test]
fn tts_signs_deterministically() {
    let t = template();
    let service = TtsService::new("irs", tts_key(), [t.clone()]);
    let doc = sample_document_for(&t);
    let a = service.sign(&doc, &t.id()).unwrap();
    let b = service.sign(&doc, &t.id()).unwrap();
    assert_eq!(a, b);
    assert!(a.is_valid(&t));
    assert_eq!(a.document.get("year"), Some("2020"));
    assert!(matches!(service.sign(&doc, "1040-1999"), Err(ServiceError::UnknownTemplate(_))));
    let err = service.sign(&doc.clone().with_value("f_999", "1"), &t.id()).unwrap_err();
    assert!(matches!(err, ServiceError::Form(FormError::UnknownKey(ref k)) if k == "f_999"), "{err}");
    let long = service.sign(&doc.clone().with_value("f_1", "1,000,000,000,000,000"), &t.id()).unwrap_err();
    assert_eq!(long.code(), "INVALID_DOCUMENT");
}

#[test]
fn headline_disclosure_reveals_only_kept_fields() {
    let t = template();
    let d = headline();
    let report = verify_bundle(d, &keys().1, &trusted());
    assert!(report.accepted(), "{report:?}");
    assert_eq!(report.signer.as_deref(), Some("irs"));
    assert!(report.insecure_setup);
    let doc = report.document.unwrap();
    let sample = sample_document_for(&t);
    for key in t.field_keys() {
        let shown = doc.get(key).unwrap().trim_end();
        if ["fname", "lname", "f_15"].contains(&key) {
            assert_eq!(shown, sample.get(key).unwrap());
        } else {
            assert_eq!(shown, "", "{key} leaked");
        }
    }
    assert_eq!(doc.get("year"), Some("2020"));
    assert!(d.signature.is_none() && d.rendering.is_none());
}

#[test]
fn report_matches_host_redaction() {
    let t = template();
    let bundle = sign(&sample_document_for(&t), &t);
    let redact = redact_all_except(&t, &set(&["fname", "lname", "f_15"])).unwrap();
    let mask = fields_to_mask(&bundle.document, &redact, &t).unwrap();
    let expected = parse_buffer(&apply_mask_plain(&bundle.buffer(&t).unwrap(), &mask).unwrap(), &t).unwrap();
    assert_eq!(verify_bundle(headline(), &keys().1, &trusted()).document, Some(expected));
}

#[test]
fn empty_redaction_discloses_everything() {
    let t = template();
    let bundle = sign(&sample_document_for(&t), &t);
    let options = DisclosureOptions { include_signature: true, include_rendering: true };
    let d = redact_and_prove(&bundle, &BTreeSet::new(), &t, &keys().0, options).unwrap();
    let report = verify_bundle(&d, &keys().1, &trusted());
    let doc: TaxDocument = report.document.unwrap();
    for key in t.field_keys() {
        assert_eq!(doc.get(key).unwrap().trim_end(), bundle.document.get(key).unwrap());
    }
    assert_eq!(d.signature.as_ref(), Some(&bundle.signature));
    assert_eq!(d.rendering.as_deref(), Some(render_document(&doc, &t).as_str()));
}

#[test]
fn tampered_document_is_refused() {
    let t = template();
    let mut bundle = sign(&sample_document_for(&t), &t);
    bundle.document.set("f_15", "9");
    let err = redact_and_prove(&bundle, &BTreeSet::new(), &t, &keys().0, DisclosureOptions::default()).unwrap_err();
    assert!(matches!(err, ServiceError::Circuit(CircuitError::SignatureMismatch)));
    assert_eq!(err.to_string(), "tax information and signature did not match");
    let bundle = sign(&sample_document_for(&t), &t);
    let err = redact_and_prove(&bundle, &set(&["f_999"]), &t, &keys().0, DisclosureOptions::default()).unwrap_err();
    assert_eq!(err.code(), "UNKNOWN_KEY");
    assert!(redact_all_except(&t, &set(&["nope"])).is_err());
}

#[test]
fn every_reject_reason() {
    let (_, vk) = keys();
    let d = headline().clone();

    let untrusted = TrustedKeys::new().with("other", keygen([3; 32]).1);
    assert_eq!(verify_bundle(&d, vk, &untrusted).reason, Some(RejectReason::UntrustedSigner));

    let mut bumped = d.clone();
    let i = bumped.signals.iter().position(|s| s == "32").unwrap();
    bumped.signals[i] = "33".into();
    assert_eq!(verify_bundle(&bumped, vk, &trusted()).reason, Some(RejectReason::BadProof));

    let mut digest = d.clone();
    digest.circuit_digest = Some("00".repeat(32));
    assert_eq!(verify_bundle(&digest, vk, &trusted()).reason, Some(RejectReason::CircuitMismatch));
    let mut template_id = d.clone();
    template_id.template_id = "1040-2019".into();
    assert_eq!(verify_bundle(&template_id, vk, &trusted()).reason, Some(RejectReason::CircuitMismatch));

    for mutate in [
        |d: &mut DisclosureBundle| d.signals[0] = "x".into(),
        |d: &mut DisclosureBundle| {
            d.signals.pop();
        },
        |d: &mut DisclosureBundle| d.proof.pi_a[0] = "12".into(),
        |d: &mut DisclosureBundle| d.proof.curve = "bls12-381".into(),
    ] {
        let mut bad = d.clone();
        mutate(&mut bad);
        assert_eq!(verify_bundle(&bad, vk, &trusted()).reason, Some(RejectReason::Malformed));
    }
    assert_eq!(verify_with_keys(&d, &[], &trusted()).reason, Some(RejectReason::CircuitMismatch));
    let mut anonymous = d.clone();
    anonymous.circuit_digest = None;
    assert!(verify_with_keys(&anonymous, std::slice::from_ref(vk), &trusted()).accepted());
}

#[test]
fn disclosure_files_round_trip() {
    let d = headline();
    let files = d.to_files();
    assert_eq!(files.clone().map(|(name, _)| name), DisclosureBundle::FILES);
    let back = DisclosureBundle::from_files(&files[0].1, &files[1].1, &files[2].1).unwrap();
    assert_eq!(&back, d);
    assert!(DisclosureBundle::from_files("{}", &files[1].1, &files[2].1).is_err());
}

#[test]
fn claim_proofs_verify_with_their_statement() {
    let t = template();
    let spec = ClaimSpec::Compare { key_a: "f_1".into(), key_b: "f_2a".into(), relation: Relation::Gt };
    let (pk, vk) = trusted_setup(&build_claim_circuit(&t, &spec).unwrap(), &t, &[6; 32]).unwrap();
    let bundle = sign(&sample_document_for(&t), &t);
    let d = prove_claim(&bundle, &spec, &t, &pk).unwrap();
    let report = verify_with_keys(&d, &[keys().1.clone(), vk.clone()], &trusted());
    assert!(report.accepted(), "{report:?}");
    assert_eq!(report.claim, Some(spec.clone()));
    assert!(report.document.is_none());
    assert_eq!(d.signals[0], "2");

    let mut flipped = d.clone();
    flipped.signals[0] = "0".into();
    assert_eq!(verify_bundle(&flipped, &vk, &trusted()).reason, Some(RejectReason::BadProof));

    let false_claim = ClaimSpec::Compare { key_a: "f_2a".into(), key_b: "f_1".into(), relation: Relation::Gt };
    assert!(prove_claim(&bundle, &false_claim, &t, &pk).is_err());
}

async fn spawn(router: Router) -> SocketAddr {
    let (tx, rx) = tokio::sync::oneshot::channel();
    tokio::spawn(serve(router, "127.0.0.1:0".parse().unwrap(), move |addr| {
        let _ = tx.send(addr);
    }));
    rx.await.unwrap()
}

#[tokio::test(flavor = "multi_thread")]
async fn tts_over_http() {
    let t = template();
    let addr = spawn(tts_router(Arc::new(TtsService::new("irs", tts_key(), [t.clone()])))).await;
    let client = reqwest::Client::new();
    let base = format!("http://{addr}");

    let pubkey: Value = client.get(format!("{base}/pubkey")).send().await.unwrap().json().await.unwrap();
    assert_eq!(pubkey["label"], "irs");
    assert_eq!(pubkey["pk"], serde_json::to_value(tts_key().public_key()).unwrap());

    let doc = sample_document_for(&t).to_flat_json();
    let res = client
        .post(format!("{base}/sign"))
        .json(&json!({"document": doc, "template_id": t.id()}))
        .send()
        .await
        .unwrap();
    assert_eq!(res.status(), 200);
    let bundle: zktax::bundle::SignedDocumentBundle = res.json().await.unwrap();
    assert_eq!(bundle, sign(&sample_document_for(&t), &t));

    let res =
        client.post(format!("{base}/sign")).json(&json!({"document": doc, "template_id": "x"})).send().await.unwrap();
    assert_eq!(res.status(), 422);
    let err: Value = res.json().await.unwrap();
    assert_eq!(err["code"], "UNKNOWN_TEMPLATE");
    assert!(err["message"].is_string());

    let res =
        client.post(format!("{base}/sign")).body("{").header("content-type", "application/json").send().await.unwrap();
    assert_eq!(res.status(), 400);
    assert_eq!(res.json::<Value>().await.unwrap()["code"], "INVALID_REQUEST");

    let res = client.get(format!("{base}/nowhere")).send().await.unwrap();
    assert_eq!(res.status(), 404);
    assert_eq!(res.json::<Value>().await.unwrap()["code"], "NOT_FOUND");
}

#[tokio::test(flavor = "multi_thread")]
async fn verifier_over_http() {
    let state = VerifyState { keys: vec![keys().1.clone()], trusted: trusted() };
    let addr = spawn(verify_router(Arc::new(state))).await;
    let client = reqwest::Client::new();
    let base = format!("http://{addr}");
    let d = tokio::task::spawn_blocking(headline).await.unwrap();

    let report: Value = client.post(format!("{base}/verify")).json(d).send().await.unwrap().json().await.unwrap();
    assert_eq!(report["verdict"], "accepted");
    assert_eq!(report["signer"], "irs");
    assert_eq!(report["document"]["fname"], "Alex J.");

    let mut bad = d.clone();
    bad.signals[2] = "1".into();
    let report: Value = client.post(format!("{base}/verify")).json(&bad).send().await.unwrap().json().await.unwrap();
    assert_eq!(report["verdict"], "rejected");
    assert_eq!(report["reason"], "BAD_PROOF");

    let trusted_keys: Value = client.get(format!("{base}/trusted-keys")).send().await.unwrap().json().await.unwrap();
    assert!(trusted_keys.to_string().contains("irs"));
}

#[tokio::test(flavor = "multi_thread")]
async fn local_prover_over_http() {
    let t = template();
    let state = LocalState {
        bundle: sign(&sample_document_for(&t), &t),
        template: t.clone(),
        proving_key: tokio::task::spawn_blocking(|| keys().0.clone()).await.unwrap(),
        options: DisclosureOptions::default(),
        busy: Default::default(),
    };
    let addr = spawn(local_router(Arc::new(state))).await;
    let client = reqwest::Client::new();
    let base = format!("http://{addr}");

    let view: Value = client.get(format!("{base}/document")).send().await.unwrap().json().await.unwrap();
    assert_eq!(view["template_id"], "1040-2020");
    assert_eq!(view["fields"].as_array().unwrap().len(), t.fields.len());
    assert_eq!(view["fields"][0]["key"], "fname");

    let redact = redact_all_except(&t, &set(&["fname", "lname", "f_15"])).unwrap();
    let res = client.post(format!("{base}/prove")).json(&json!({"redact_keys": redact})).send().await.unwrap();
    assert_eq!(res.status(), 200);
    let d: DisclosureBundle = res.json().await.unwrap();
    assert!(verify_bundle(&d, &keys().1, &trusted()).accepted());

    let res = client.post(format!("{base}/prove")).json(&json!({"redact_keys": ["f_999"]})).send().await.unwrap();
    assert_eq!(res.status(), 422);
    assert_eq!(res.json::<Value>().await.unwrap()["code"], "UNKNOWN_KEY");
}

#[test]
fn local_prover_refuses_public_bind() {
    use zktax::services::http::ensure_loopback;
    assert!(ensure_loopback(&"127.0.0.1:1".parse().unwrap()).is_ok());
    assert!(ensure_loopback(&"[::1]:1".parse().unwrap()).is_ok());
    assert!(ensure_loopback(&"0.0.0.0:1".parse().unwrap()).is_err());
}
