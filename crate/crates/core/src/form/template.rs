use std::collections::HashSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{is_value_byte, FormError};

/// Keys appended after the template fields, in this order.
pub const METADATA_KEYS: [&str; 2] = ["year", "form"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Text,
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub key: String,
    pub label: String,
    pub kind: FieldKind,
    /// Fixed serialized width; values are right-padded with spaces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTemplate")]
pub struct FormTemplate {
    pub form: String,
    pub year: String,
    pub max_buffer_len: usize,
    pub fields: Vec<FieldSpec>,
}

#[derive(Deserialize)]
struct RawTemplate {
    #[serde(default)]
    form: String,
    #[serde(default)]
    year: String,
    max_buffer_len: Option<usize>,
    #[serde(default)]
    fields: Vec<FieldSpec>,
}

impl TryFrom<RawTemplate> for FormTemplate {
    type Error = FormError;

    fn try_from(raw: RawTemplate) -> Result<Self, FormError> {
        let max_buffer_len = raw.max_buffer_len.filter(|n| *n > 0).ok_or(FormError::MissingBufferLen)?;
        FormTemplate::new(raw.form, raw.year, max_buffer_len, raw.fields)
    }
}

pub fn load_template(descriptor: &str) -> Result<FormTemplate, FormError> {
    let raw: RawTemplate = serde_json::from_str(descriptor).map_err(|e| FormError::Descriptor(e.to_string()))?;
    FormTemplate::try_from(raw)
}

fn valid_key(key: &str) -> bool {
    !key.is_empty() && key.bytes().all(is_value_byte)
}

impl FormTemplate {
    pub fn new(form: String, year: String, max_buffer_len: usize, fields: Vec<FieldSpec>) -> Result<Self, FormError> {
        if max_buffer_len == 0 {
            return Err(FormError::MissingBufferLen);
        }
        for meta in [&form, &year] {
            if !meta.bytes().all(is_value_byte) {
                return Err(FormError::InvalidValue {
                    key: "metadata".into(),
                    reason: format!("{meta:?} contains a forbidden character"),
                });
            }
        }
        let mut seen = HashSet::new();
        for f in &fields {
            if !valid_key(&f.key) {
                return Err(FormError::InvalidKey(f.key.clone()));
            }
            if METADATA_KEYS.contains(&f.key.as_str()) {
                return Err(FormError::ReservedKey(f.key.clone()));
            }
            if !seen.insert(f.key.as_str()) {
                return Err(FormError::DuplicateKey(f.key.clone()));
            }
        }
        Ok(FormTemplate { form, year, max_buffer_len, fields })
    }

    /// `"<form>-<year>"`, e.g. `1040-2020`.
    pub fn id(&self) -> String {
        format!("{}-{}", self.form, self.year)
    }

    pub fn field(&self, key: &str) -> Option<&FieldSpec> {
        self.fields.iter().find(|f| f.key == key)
    }

    pub fn field_keys(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|f| f.key.as_str())
    }

    /// Field keys followed by the metadata keys.
    pub fn all_keys(&self) -> impl Iterator<Item = &str> {
        self.field_keys().chain(METADATA_KEYS)
    }

    pub fn is_known_key(&self, key: &str) -> bool {
        METADATA_KEYS.contains(&key) || self.field(key).is_some()
    }

    /// Byte range of `key`'s value that holds for every valid document, or
    /// `None` when a variable-width field precedes it (or it is one).
    pub fn fixed_value_range(&self, key: &str) -> Option<Range<usize>> {
        let mut pos = 1;
        for (i, f) in self.fields.iter().enumerate() {
            if i > 0 {
                pos += 1;
            }
            let start = pos + f.key.len() + 4;
            let width = f.width?;
            if f.key == key {
                return Some(start..start + width);
            }
            pos = start + width + 1;
        }
        None
    }

    pub fn to_descriptor(&self) -> String {
        serde_json::to_string_pretty(self).expect("template serializes")
    }
}
