use std::collections::BTreeMap;
use std::ops::Range;

use super::{is_value_byte, FormError, FormTemplate, TaxDocument, METADATA_KEYS};

/// Fixed-length 7-bit byte array: a canonical JSON prefix and zero padding.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AsciiBuffer {
    bytes: Vec<u8>,
    used_len: usize,
}

impl AsciiBuffer {
    /// Accepts `bytes` if every byte is < 128 and nothing nonzero follows
    /// the first zero byte.
    pub fn from_padded(bytes: Vec<u8>) -> Result<Self, FormError> {
        if let Some((offset, b)) = bytes.iter().enumerate().find(|(_, b)| **b >= 128) {
            return Err(FormError::Malformed { offset, reason: format!("byte {b:#04x} is not ASCII") });
        }
        let used_len = bytes.iter().position(|b| *b == 0).unwrap_or(bytes.len());
        if let Some(offset) = bytes[used_len..].iter().position(|b| *b != 0) {
            return Err(FormError::Malformed {
                offset: used_len + offset,
                reason: "nonzero byte inside padding".into(),
            });
        }
        Ok(AsciiBuffer { bytes, used_len })
    }

    pub(crate) fn from_parts(bytes: Vec<u8>, used_len: usize) -> Self {
        AsciiBuffer { bytes, used_len }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    pub fn used_len(&self) -> usize {
        self.used_len
    }

    /// The JSON region as text (all bytes are ASCII).
    pub fn json(&self) -> &str {
        std::str::from_utf8(&self.bytes[..self.used_len]).expect("ASCII")
    }
}

/// Where one key's value characters sit in the canonical serialization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueSpan {
    pub key: String,
    pub range: Range<usize>,
}

/// Canonical JSON bytes (unpadded) and the value span of every key.
pub fn layout(doc: &TaxDocument, template: &FormTemplate) -> Result<(Vec<u8>, Vec<ValueSpan>), FormError> {
    doc.validate(template)?;
    let mut entries: Vec<(&str, String)> = template
        .fields
        .iter()
        .map(|f| {
            let v = &doc.values[&f.key];
            let padded = match f.width {
                Some(w) => format!("{v:<w$}"),
                None => v.clone(),
            };
            (f.key.as_str(), padded)
        })
        .collect();
    for key in METADATA_KEYS {
        if let Some(v) = doc.get(key) {
            entries.push((key, v.to_string()));
        }
    }

    let mut out = Vec::with_capacity(template.max_buffer_len);
    let mut spans = Vec::with_capacity(entries.len());
    out.push(b'{');
    for (i, (key, value)) in entries.iter().enumerate() {
        if i > 0 {
            out.push(b',');
        }
        out.push(b'"');
        out.extend_from_slice(key.as_bytes());
        out.extend_from_slice(b"\":\"");
        let start = out.len();
        out.extend_from_slice(value.as_bytes());
        spans.push(ValueSpan { key: key.to_string(), range: start..out.len() });
        out.push(b'"');
    }
    out.push(b'}');
    Ok((out, spans))
}

pub fn canonicalize(doc: &TaxDocument, template: &FormTemplate) -> Result<AsciiBuffer, FormError> {
    let (mut bytes, _) = layout(doc, template)?;
    let used_len = bytes.len();
    if used_len > template.max_buffer_len {
        return Err(FormError::Overflow { needed: used_len, capacity: template.max_buffer_len });
    }
    bytes.resize(template.max_buffer_len, 0);
    Ok(AsciiBuffer::from_parts(bytes, used_len))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn malformed(&self, reason: impl Into<String>) -> FormError {
        FormError::Malformed { offset: self.pos, reason: reason.into() }
    }

    fn expect(&mut self, b: u8) -> Result<(), FormError> {
        match self.bytes.get(self.pos) {
            Some(&got) if got == b => {
                self.pos += 1;
                Ok(())
            }
            Some(&got) => Err(self.malformed(format!("expected {:?}, found {:?}", b as char, got as char))),
            None => Err(self.malformed(format!("expected {:?}, found end of data", b as char))),
        }
    }

    /// Reads a quoted string whose body uses only value bytes.
    fn string(&mut self) -> Result<&'a str, FormError> {
        self.expect(b'"')?;
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'"' {
                let s = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ASCII");
                self.pos += 1;
                return Ok(s);
            }
            if !is_value_byte(b) {
                return Err(self.malformed(format!("byte {b:#04x} not allowed in a string")));
            }
            self.pos += 1;
        }
        Err(self.malformed("unterminated string"))
    }
}

/// Inverse of [`canonicalize`]. Accepts only the canonical shape: every
/// template key once, in template order, then any metadata keys in order.
/// Redacted values come back as their space runs, except that trailing
/// spaces of fixed-width fields are always stripped.
pub fn parse_buffer(buf: &AsciiBuffer, template: &FormTemplate) -> Result<TaxDocument, FormError> {
    let json = &buf.as_bytes()[..buf.used_len()];
    let mut cur = Cursor { bytes: json, pos: 0 };
    let mut pairs: Vec<(&str, &str)> = Vec::new();
    cur.expect(b'{')?;
    if json.get(cur.pos) == Some(&b'}') {
        cur.pos += 1;
    } else {
        loop {
            let key = cur.string()?;
            cur.expect(b':')?;
            let value = cur.string()?;
            pairs.push((key, value));
            match json.get(cur.pos) {
                Some(b',') => cur.pos += 1,
                Some(b'}') => {
                    cur.pos += 1;
                    break;
                }
                _ => return Err(cur.malformed("expected ',' or '}'")),
            }
        }
    }
    if cur.pos != json.len() {
        return Err(cur.malformed("trailing bytes after object"));
    }

    let mut expected = template.fields.iter().map(|f| f.key.as_str()).chain(METADATA_KEYS).peekable();
    let mut doc = TaxDocument { values: BTreeMap::new(), year: None, form: None };
    for (key, value) in pairs {
        if !template.is_known_key(key) {
            return Err(FormError::UnknownKey(key.to_string()));
        }
        // Skip optional metadata keys until we reach this one.
        loop {
            match expected.next() {
                Some(k) if k == key => break,
                Some(k) if METADATA_KEYS.contains(&k) => continue,
                Some(k) => return Err(FormError::MissingField(k.to_string())),
                None => {
                    return Err(FormError::Malformed {
                        offset: 0,
                        reason: format!("key {key:?} repeated or out of order"),
                    })
                }
            }
        }
        let value = match template.field(key).and_then(|f| f.width) {
            Some(_) => value.trim_end_matches(' '),
            None => value,
        };
        doc.set(key, value);
    }
    if let Some(missing) = expected.find(|k| !METADATA_KEYS.contains(k)) {
        return Err(FormError::MissingField(missing.to_string()));
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::{load_template, FieldKind, FieldSpec};
    use proptest::prelude::*;

    fn small_template() -> FormTemplate {
        load_template(
            r#"{"form":"1040","year":"2020","max_buffer_len":155,"fields":[
                {"key":"fname","label":"First name","kind":"text"},
                {"key":"f_1","label":"Wages","kind":"numeric"}]}"#,
        )
        .unwrap()
    }

    fn listing_doc() -> TaxDocument {
        TaxDocument::new()
            .with_value("fname", "name")
            .with_value("f_1", "393,229")
            .with_value("year", "2020")
            .with_value("form", "1040")
    }

    #[test]
    fn canonical_bytes_for_listing_document() {
        let buf = canonicalize(&listing_doc(), &small_template()).unwrap();
        let expected = br#"{"fname":"name","f_1":"393,229","year":"2020","form":"1040"}"#;
        assert_eq!(&buf.as_bytes()[..expected.len()], expected);
        assert_eq!(buf.used_len(), expected.len());
        assert_eq!(buf.len(), 155);
        assert!(buf.as_bytes()[expected.len()..].iter().all(|b| *b == 0));
        assert_eq!(buf, canonicalize(&listing_doc(), &small_template()).unwrap());
    }

    #[test]
    fn empty_template_gives_empty_object() {
        let t = load_template(r#"{"form":"x","year":"1","max_buffer_len":8,"fields":[]}"#).unwrap();
        let buf = canonicalize(&TaxDocument::new(), &t).unwrap();
        assert_eq!(buf.used_len(), 2);
        assert_eq!(buf.as_bytes(), b"{}\0\0\0\0\0\0");
        assert_eq!(parse_buffer(&buf, &t).unwrap(), TaxDocument::new());
    }

    #[test]
    fn overflow_is_reported() {
        let t = small_template();
        let doc = TaxDocument::new().with_value("fname", "x".repeat(155)).with_value("f_1", "1");
        assert!(matches!(canonicalize(&doc, &t), Err(FormError::Overflow { capacity: 155, .. })));
    }

    #[test]
    fn parse_round_trip_and_errors() {
        let t = small_template();
        let buf = canonicalize(&listing_doc(), &t).unwrap();
        assert_eq!(parse_buffer(&buf, &t).unwrap(), listing_doc());

        let truncated = br#"{"fname":"name","f_1":"393,229}"#.to_vec();
        let buf = AsciiBuffer::from_padded(truncated).unwrap();
        assert!(matches!(parse_buffer(&buf, &t), Err(FormError::Malformed { .. })));

        let unknown = br#"{"fname":"name","f_9":"1"}"#.to_vec();
        let buf = AsciiBuffer::from_padded(unknown).unwrap();
        assert_eq!(parse_buffer(&buf, &t), Err(FormError::UnknownKey("f_9".into())));

        let swapped = br#"{"f_1":"1","fname":"name"}"#.to_vec();
        assert!(parse_buffer(&AsciiBuffer::from_padded(swapped).unwrap(), &t).is_err());

        let missing = br#"{"fname":"name"}"#.to_vec();
        assert_eq!(
            parse_buffer(&AsciiBuffer::from_padded(missing).unwrap(), &t),
            Err(FormError::MissingField("f_1".into()))
        );

        let whitespace = br#"{ "fname":"name","f_1":"1"}"#.to_vec();
        assert!(parse_buffer(&AsciiBuffer::from_padded(whitespace).unwrap(), &t).is_err());
    }

    #[test]
    fn padded_buffer_validation() {
        assert!(AsciiBuffer::from_padded(vec![b'{', b'}', 0, 1]).is_err());
        assert!(AsciiBuffer::from_padded(vec![b'{', 0x80]).is_err());
        assert_eq!(AsciiBuffer::from_padded(vec![b'{', b'}']).unwrap().used_len(), 2);
    }

    #[test]
    fn fixed_width_fields_pad_and_trim() {
        let t = FormTemplate::new(
            "f".into(),
            "y".into(),
            64,
            vec![
                FieldSpec { key: "a".into(), label: "A".into(), kind: FieldKind::Text, width: Some(6) },
                FieldSpec { key: "n".into(), label: "N".into(), kind: FieldKind::Numeric, width: Some(4) },
            ],
        )
        .unwrap();
        let doc = TaxDocument::new().with_value("a", "Al B").with_value("n", "12");
        let (bytes, spans) = layout(&doc, &t).unwrap();
        assert_eq!(bytes, br#"{"a":"Al B  ","n":"12  "}"#);
        assert_eq!(spans[0].range, t.fixed_value_range("a").unwrap());
        assert_eq!(spans[1].range, t.fixed_value_range("n").unwrap());
        let buf = canonicalize(&doc, &t).unwrap();
        assert_eq!(parse_buffer(&buf, &t).unwrap(), doc);
    }

    fn arb_value(numeric: bool) -> BoxedStrategy<String> {
        if numeric {
            "[0-9,]{0,10}".boxed()
        } else {
            // Printable ASCII without quote or backslash.
            "[ !#-\\[\\]-~]{0,12}".boxed()
        }
    }

    fn arb_template_and_doc() -> impl Strategy<Value = (FormTemplate, TaxDocument)> {
        prop::collection::vec((any::<bool>(), any::<bool>()), 0..8)
            .prop_flat_map(|kinds| {
                let values: Vec<_> = kinds.iter().map(|(numeric, _)| arb_value(*numeric)).collect();
                (Just(kinds), values, any::<bool>())
            })
            .prop_map(|(kinds, values, with_meta)| {
                let fields: Vec<FieldSpec> = kinds
                    .iter()
                    .enumerate()
                    .map(|(i, (numeric, fixed))| FieldSpec {
                        key: format!("k{i}"),
                        label: format!("Field {i}"),
                        kind: if *numeric { FieldKind::Numeric } else { FieldKind::Text },
                        width: fixed.then_some(12),
                    })
                    .collect();
                let t = FormTemplate::new("1040".into(), "2020".into(), 400, fields).unwrap();
                let mut doc = TaxDocument::new();
                for (i, v) in values.into_iter().enumerate() {
                    let v = if t.fields[i].width.is_some() { v.trim_end().to_string() } else { v };
                    doc.set(format!("k{i}"), v);
                }
                if with_meta {
                    doc = doc.with_metadata(&t);
                }
                (t, doc)
            })
    }

    proptest! {
        #[test]
        fn parse_inverts_canonicalize((t, doc) in arb_template_and_doc()) {
            let buf = canonicalize(&doc, &t).unwrap();
            prop_assert_eq!(buf.len(), t.max_buffer_len);
            prop_assert!(serde_json::from_str::<serde_json::Value>(buf.json()).is_ok());
            prop_assert_eq!(parse_buffer(&buf, &t).unwrap(), doc.clone());
            prop_assert_eq!(canonicalize(&doc, &t).unwrap(), buf);
        }
    }
}
