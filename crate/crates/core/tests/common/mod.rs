#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use zktax::bundle::SignedDocumentBundle;
use zktax::crypto::{keygen, SecretKey};
use zktax::form::{FieldKind, FieldSpec, FormTemplate, TaxDocument};
use zktax::services::tts_sign_document;

pub fn field(key: &str, kind: FieldKind, width: Option<usize>) -> FieldSpec {
    FieldSpec { key: key.into(), label: key.to_uppercase(), kind, width }
}

/// Two fixed-width fields; the signed document fits in 62 bytes.
pub fn tiny_template() -> FormTemplate {
    FormTemplate::new(
        "1040".into(),
        "2020".into(),
        62,
        vec![field("a", FieldKind::Text, Some(8)), field("b", FieldKind::Numeric, Some(8))],
    )
    .unwrap()
}

pub fn tts_key() -> SecretKey {
    keygen([0x11; 32]).0
}

pub fn sign(doc: &TaxDocument, template: &FormTemplate) -> SignedDocumentBundle {
    tts_sign_document(doc, template, &tts_key()).unwrap()
}

const TEXT_CHARS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789 .-'#&/";

pub fn random_text(rng: &mut impl Rng, max: usize) -> String {
    let len = rng.gen_range(0..=max);
    let mut s: String = (0..len).map(|_| TEXT_CHARS[rng.gen_range(0..TEXT_CHARS.len())] as char).collect();
    while s.ends_with(' ') {
        s.pop();
    }
    s
}

/// Comma-grouped amount that fits `width` characters.
pub fn random_amount(rng: &mut impl Rng, width: usize) -> (u64, String) {
    loop {
        let digits = rng.gen_range(1..=12u32);
        let v = rng.gen_range(0..10u64.pow(digits));
        let s = group(v);
        if s.len() <= width {
            return (v, s);
        }
    }
}

pub fn group(v: u64) -> String {
    let raw = v.to_string();
    let mut out = String::new();
    for (i, c) in raw.chars().enumerate() {
        if i > 0 && (raw.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Random valid document for `template`.
pub fn random_document(rng: &mut impl Rng, template: &FormTemplate) -> TaxDocument {
    let mut doc = TaxDocument::new();
    for f in &template.fields {
        let width = f.width.unwrap_or(12);
        let v = match f.kind {
            FieldKind::Text => random_text(rng, width),
            FieldKind::Numeric => random_amount(rng, width).1,
        };
        doc.set(f.key.clone(), v);
    }
    doc.with_metadata(template)
}

pub fn random_subset(rng: &mut impl Rng, template: &FormTemplate) -> BTreeSet<String> {
    template.all_keys().filter(|_| rng.gen_bool(0.5)).map(String::from).collect()
}
