//! Bundled templates and sample documents.

use crate::form::{load_template, FormTemplate, TaxDocument};

/// 2020 IRS Form 1040 (first page and main tax lines), `N = 1500`.
pub const FORM_1040_DESCRIPTOR: &str = include_str!("../fixtures/1040.json");

/// A filled 1040 for a fictional taxpayer.
pub const SAMPLE_1040: &str = include_str!("../fixtures/sample_1040.json");

/// Keys kept visible in the headline scenario.
pub const DISCLOSED_KEYS: [&str; 3] = ["fname", "lname", "f_15"];

pub fn form_1040_template() -> FormTemplate {
    load_template(FORM_1040_DESCRIPTOR).expect("bundled template is valid")
}

pub fn sample_1040_document() -> TaxDocument {
    let value: serde_json::Value = serde_json::from_str(SAMPLE_1040).expect("bundled sample is JSON");
    TaxDocument::from_flat_json(&value).expect("bundled sample is a flat document")
}

/// A cut-down 1040 with ten fields that fits a 310-byte buffer.
pub fn compact_1040_template() -> FormTemplate {
    let full = form_1040_template();
    let keep = ["fname", "lname", "SSN", "f_1", "f_2a", "f_2b", "f_9", "f_11", "f_15", "f_24"];
    let fields = full.fields.into_iter().filter(|f| keep.contains(&f.key.as_str())).collect();
    FormTemplate::new(full.form, full.year, 310, fields).expect("subset of a valid template")
}

/// The sample document restricted to `template`'s fields.
pub fn sample_document_for(template: &FormTemplate) -> TaxDocument {
    let full = sample_1040_document();
    let mut doc = TaxDocument::new();
    for key in template.all_keys() {
        if let Some(v) = full.get(key) {
            doc.set(key, v);
        }
    }
    doc
}
