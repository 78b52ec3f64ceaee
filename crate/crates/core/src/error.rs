use thiserror::Error;

use crate::group::GroupSpec;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("element {value} is not valid in group `{group}`")]
    InvalidElement { group: GroupSpec, value: i64 },
    #[error("sets live in different groups (`{0}` vs `{1}`)")]
    GroupMismatch(GroupSpec, GroupSpec),
    #[error("integer overflow in group arithmetic")]
    Overflow,
    #[error("empty set where a nonempty set is required")]
    EmptySet,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("parse error on line {line}: {message}")]
    ParseLine { line: usize, message: String },
    #[error("set of size {size} exceeds the oracle cap {cap}")]
    OracleCap { size: usize, cap: usize },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("dyadic selection needs {0}")]
    DyadicInput(&'static str),
    #[error("transform residual {residual} exceeds 1/4")]
    TransformPrecision { residual: f64 },
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
