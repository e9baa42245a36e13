//! Tax-form templates, canonical ASCII serialization and byte-level redaction.
//!
//! A document serializes to `{"k1":"v1","k2":"v2",...}` in template field
//! order, without whitespace, with the `year`/`form` metadata keys last and
//! `0x00` padding up to the template's buffer length. Fields that declare a
//! `width` are right-padded with spaces to exactly that many bytes, which
//! pins their byte offsets independently of the values before them.

mod canonical;
mod document;
mod mask;
mod template;

use thiserror::Error;

pub use canonical::{canonicalize, layout, parse_buffer, AsciiBuffer, ValueSpan};
pub use document::TaxDocument;
pub use mask::{apply_mask_plain, fields_to_mask, RedactionMask};
pub use template::{load_template, FieldKind, FieldSpec, FormTemplate, METADATA_KEYS};

/// The redaction character written over masked value bytes.
pub const REDACTION_BYTE: u8 = 0x20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("template descriptor: {0}")]
    Descriptor(String),
    #[error("template descriptor is missing a positive max_buffer_len")]
    MissingBufferLen,
    #[error("duplicate field key {0:?}")]
    DuplicateKey(String),
    #[error("field key {0:?} must be nonempty printable ASCII without quotes or backslashes")]
    InvalidKey(String),
    #[error("field key {0:?} is reserved for document metadata")]
    ReservedKey(String),
    #[error("unknown field key {0:?}")]
    UnknownKey(String),
    #[error("document is missing field {0:?}")]
    MissingField(String),
    #[error("invalid value for {key:?}: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("metadata {key:?} is {found:?} but the template expects {expected:?}")]
    MetadataMismatch { key: String, expected: String, found: String },
    #[error("serialized document needs {needed} bytes but the buffer holds {capacity}")]
    Overflow { needed: usize, capacity: usize },
    #[error("buffer has {buffer} bytes but mask has {mask} bits")]
    LengthMismatch { buffer: usize, mask: usize },
    #[error("mask bit {index} is {value}, expected 0 or 1")]
    NonBooleanBit { index: usize, value: u8 },
    #[error("malformed buffer at byte {offset}: {reason}")]
    Malformed { offset: usize, reason: String },
}

/// Printable ASCII minus `"` and `\`, so values never need escaping.
pub(crate) fn is_value_byte(b: u8) -> bool {
    (0x20..=0x7e).contains(&b) && b != b'"' && b != b'\\'
}
