use thiserror::Error;

use crate::groups::Element;

/// Everything that can go wrong while building or checking an approximation.
///
/// Violated bounds are *not* errors: they are reported as findings in the
/// relevant report type. Errors are reserved for inputs that cannot be
/// evaluated at all.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Mismatched groups, shapes, or dimensions; singular matrices.
    #[error("structural error: {0}")]
    Structural(String),

    /// The operation needs something the group cannot provide (usually
    /// enumeration of an infinite group).
    #[error("capability error: {0}")]
    Capability(String),

    /// A length function was applied outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    /// An extensional map is missing values it needs.
    #[error("coverage error: no assignment for {}", render_list(.missing))]
    Coverage { missing: Vec<Element> },

    /// A finite quotient fails to separate the required set.
    #[error("quotient does not separate: {left} and {right} have the same image")]
    Separation { left: Element, right: Element },

    /// A Følner provider could not meet the requested ratio.
    #[error("Følner provider failed: achieved ratio {achieved} exceeds requested {requested}")]
    Folner { achieved: f64, requested: f64 },

    /// Scenario file failed to parse or validate.
    #[error("schema error: {0}")]
    Schema(String),
}

fn render_list(items: &[Element]) -> String {
    let shown: Vec<String> = items.iter().take(8).map(|e| e.to_string()).collect();
    let mut out = shown.join(", ");
    if items.len() > 8 {
        out.push_str(&format!(" (and {} more)", items.len() - 8));
    }
    out
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}

pub(crate) fn capability(msg: impl Into<String>) -> Error {
    Error::Capability(msg.into())
}

pub(crate) fn parameter(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
