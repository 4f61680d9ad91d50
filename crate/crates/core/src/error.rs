use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed XML in {source_uri}: {message}")]
    MalformedXml { source_uri: String, message: String },

    #[error("no schema element declarations found under types in {source_uri}")]
    NoTypesSection { source_uri: String },

    #[error("unsupported: nested complex type in element `{element}` (sub-element `{sub_element}`)")]
    NestedComplexType { element: String, sub_element: String },

    #[error("element declaration without a name attribute{}", context_suffix(.context))]
    MissingName { context: Option<String> },

    #[error("duplicate sub-element name `{field}` in element `{element}`")]
    DuplicateField { element: String, field: String },

    #[error("facet `{facet}` on field `{field}` ({base_type}): {message}")]
    FacetTypeMismatch {
        field: String,
        base_type: String,
        facet: String,
        message: String,
    },

    #[error("field `{field}`: minInclusive {min} exceeds maxInclusive {max}")]
    InvertedBounds { field: String, min: String, max: String },

    #[error("field `{field}` is unbounded: no boundary value set exists")]
    Unbounded { field: String },

    #[error("field `{field}` has non-numeric type `{base_type}`: no boundary value set exists")]
    NonNumeric { field: String, base_type: String },

    #[error("nominal value {value} for field `{field}` is not strictly inside [{min}, {max}]")]
    InvalidNominal {
        field: String,
        value: String,
        min: String,
        max: String,
    },

    #[error("test case {case} fields {found:?} do not match constrained fields {expected:?}")]
    FieldMismatch {
        case: String,
        expected: Vec<String>,
        found: Vec<String>,
    },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid test suite: {0}")]
    InvalidSuite(String),

    #[error("invalid classification: {0}")]
    InvalidClassification(String),
}

fn context_suffix(context: &Option<String>) -> String {
    match context {
        Some(c) => format!(" (in `{c}`)"),
        None => String::new(),
    }
}
