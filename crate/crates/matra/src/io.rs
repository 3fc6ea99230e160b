//! Reading and writing `*.matra.json` documents.
//!
//! Documents are strict: any field the schema does not name is rejected.
//! Serialization is canonical (fixed key order, two-space indentation,
//! trailing newline) so the same model always produces the same bytes.

use matra_core::model::{ReferenceProblem, ThreatModel, FORMAT_VERSION};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown field at line {line}, column {column}: {message}")]
    UnknownField { line: usize, column: usize, message: String },
    #[error("schema error at line {line}, column {column}: {message}")]
    Schema { line: usize, column: usize, message: String },
    #[error("unsupported matra_version \"{0}\" (expected \"{FORMAT_VERSION}\")")]
    UnsupportedVersion(String),
    #[error("dangling reference: {0}")]
    DanglingReference(ReferenceProblem),
    #[error("duplicate id: {0}")]
    DuplicateId(ReferenceProblem),
}

impl LoadError {
    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            LoadError::Syntax { .. } => "syntax",
            LoadError::UnknownField { .. } => "unknown-field",
            LoadError::Schema { .. } => "schema",
            LoadError::UnsupportedVersion(_) => "unsupported-version",
            LoadError::DanglingReference(_) => "dangling-reference",
            LoadError::DuplicateId(_) => "duplicate-id",
        }
    }
}

impl From<serde_json::Error> for LoadError {
    fn from(e: serde_json::Error) -> Self {
        let (line, column) = (e.line(), e.column());
        let message = e.to_string();
        match e.classify() {
            serde_json::error::Category::Data if message.starts_with("unknown field") => {
                LoadError::UnknownField { line, column, message }
            }
            serde_json::error::Category::Data => LoadError::Schema { line, column, message },
            _ => LoadError::Syntax { line, column, message },
        }
    }
}

/// Parses a document without checking cross-references.
pub fn parse_model(document: &[u8]) -> Result<ThreatModel, LoadError> {
    Ok(serde_json::from_slice(document)?)
}

/// Parses and links a document. Fails on the first structural problem.
pub fn load_model(document: &[u8]) -> Result<ThreatModel, LoadError> {
    let model = parse_model(document)?;
    if model.matra_version != FORMAT_VERSION {
        return Err(LoadError::UnsupportedVersion(model.matra_version));
    }
    model.check_references().map_err(|p| match p {
        ReferenceProblem::Duplicate { .. } => LoadError::DuplicateId(p),
        ReferenceProblem::Dangling { .. } => LoadError::DanglingReference(p),
    })?;
    Ok(model)
}

pub fn serialize_model(model: &ThreatModel) -> String {
    to_json(model)
}

/// Canonical JSON for any interchange value (models, assessments, diffs,
/// validation reports).
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    // Plain data with string keys only; serialization cannot fail.
    let mut out = serde_json::to_string_pretty(value).expect("interchange values serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_a_syntax_error() {
        assert!(matches!(load_model(b""), Err(LoadError::Syntax { .. })));
        assert!(matches!(load_model(b"{\"matra_version\": "), Err(LoadError::Syntax { .. })));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = load_model(b"{\n  \"matra_version\": \"1\",\n  oops\n}").unwrap_err();
        match err {
            LoadError::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shipped_model_is_canonical() {
        let model = load_model(crate::OPENCLAW_MODEL.as_bytes()).unwrap();
        assert_eq!(serialize_model(&model), crate::OPENCLAW_MODEL);
    }
}
