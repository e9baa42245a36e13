use std::collections::BTreeMap;

use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use super::{is_value_byte, FieldKind, FormError, FormTemplate};

/// A filled-in form: field values plus the optional `year`/`form` metadata
/// the signing authority stamps on.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TaxDocument {
    pub values: BTreeMap<String, String>,
    pub year: Option<String>,
    pub form: Option<String>,
}

impl TaxDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_value(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.set(key, value);
        self
    }

    /// Routes `year`/`form` to metadata, everything else to field values.
    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        let value = value.into();
        match key.as_str() {
            "year" => self.year = Some(value),
            "form" => self.form = Some(value),
            _ => {
                self.values.insert(key, value);
            }
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        match key {
            "year" => self.year.as_deref(),
            "form" => self.form.as_deref(),
            _ => self.values.get(key).map(String::as_str),
        }
    }

    /// Stamps the template's form and year as metadata.
    pub fn with_metadata(mut self, template: &FormTemplate) -> Self {
        self.year = Some(template.year.clone());
        self.form = Some(template.form.clone());
        self
    }

    pub fn from_flat_json(value: &Value) -> Result<Self, FormError> {
        let obj =
            value.as_object().ok_or_else(|| FormError::Descriptor("document must be a flat JSON object".into()))?;
        let mut doc = TaxDocument::new();
        for (k, v) in obj {
            let s = v.as_str().ok_or_else(|| FormError::InvalidValue {
                key: k.clone(),
                reason: "values must be JSON strings".into(),
            })?;
            doc.set(k.clone(), s);
        }
        Ok(doc)
    }

    pub fn to_flat_json(&self) -> Value {
        let mut obj: Map<String, Value> =
            self.values.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        if let Some(y) = &self.year {
            obj.insert("year".into(), Value::String(y.clone()));
        }
        if let Some(f) = &self.form {
            obj.insert("form".into(), Value::String(f.clone()));
        }
        Value::Object(obj)
    }

    /// Checks the document is complete and well-formed for `template`.
    pub fn validate(&self, template: &FormTemplate) -> Result<(), FormError> {
        if let Some(unknown) = self.values.keys().find(|k| template.field(k).is_none()) {
            return Err(FormError::UnknownKey(unknown.clone()));
        }
        for field in &template.fields {
            let value = self.values.get(&field.key).ok_or_else(|| FormError::MissingField(field.key.clone()))?;
            let invalid = |reason: String| FormError::InvalidValue { key: field.key.clone(), reason };
            if let Some(b) = value.bytes().find(|b| !is_value_byte(*b)) {
                return Err(invalid(format!("byte {b:#04x} is not allowed")));
            }
            if field.kind == FieldKind::Numeric && !value.bytes().all(|b| b.is_ascii_digit() || b == b',') {
                return Err(invalid(format!("{value:?} is not a digits-and-commas amount")));
            }
            if let Some(width) = field.width {
                if value.len() > width {
                    return Err(invalid(format!("{} bytes exceed the field width {width}", value.len())));
                }
                if value.ends_with(' ') {
                    return Err(invalid("fixed-width values cannot end with a space".into()));
                }
            }
        }
        for (key, found, expected) in [("year", &self.year, &template.year), ("form", &self.form, &template.form)] {
            if let Some(found) = found {
                if found != expected {
                    return Err(FormError::MetadataMismatch {
                        key: key.into(),
                        expected: expected.clone(),
                        found: found.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

impl Serialize for TaxDocument {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_flat_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TaxDocument {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        TaxDocument::from_flat_json(&v).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::load_template;

    fn template() -> FormTemplate {
        load_template(
            r#"{"form":"1040","year":"2020","max_buffer_len":155,"fields":[
                {"key":"fname","label":"First name","kind":"text"},
                {"key":"f_1","label":"Wages","kind":"numeric","width":9}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn flat_json_routes_metadata() {
        let v: Value = serde_json::from_str(r#"{"fname":"name","f_1":"393,229","year":"2020","form":"1040"}"#).unwrap();
        let doc = TaxDocument::from_flat_json(&v).unwrap();
        assert_eq!(doc.values.len(), 2);
        assert_eq!(doc.year.as_deref(), Some("2020"));
        assert_eq!(doc.get("form"), Some("1040"));
        assert_eq!(doc.to_flat_json(), v);
        doc.validate(&template()).unwrap();
    }

    #[test]
    fn validation_errors() {
        let t = template();
        let base = TaxDocument::new().with_value("fname", "a").with_value("f_1", "1");
        base.validate(&t).unwrap();
        assert_eq!(base.clone().with_value("f_999", "1").validate(&t), Err(FormError::UnknownKey("f_999".into())));
        assert_eq!(
            TaxDocument::new().with_value("fname", "a").validate(&t),
            Err(FormError::MissingField("f_1".into()))
        );
        for bad in ["1.5", "abc", "1 000"] {
            assert!(matches!(base.clone().with_value("f_1", bad).validate(&t), Err(FormError::InvalidValue { .. })));
        }
        for bad in ["say \"hi\"", "back\\slash", "tab\t", "ünï"] {
            assert!(matches!(base.clone().with_value("fname", bad).validate(&t), Err(FormError::InvalidValue { .. })));
        }
        assert!(matches!(
            base.clone().with_value("f_1", "1,000,000,000").validate(&t),
            Err(FormError::InvalidValue { .. })
        ));
        assert!(matches!(
            base.clone().with_value("year", "2019").validate(&t),
            Err(FormError::MetadataMismatch { .. })
        ));
    }
}
