use thiserror::Error;

use crate::gtrelations::{FamilyProperty, Label};
use crate::sequences::Space;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid representation: {0}")]
    Invalid(String),

    #[error("operand type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: Space, found: Space },

    #[error("relation {0} has no binary predicate")]
    NotBinary(Label),

    #[error("set is finite: {0}")]
    FiniteSet(&'static str),

    #[error("family member {index} is finite")]
    FiniteMember { index: usize },

    #[error("empty family")]
    EmptyFamily,

    #[error("family violates property {phi}: {detail}")]
    PhiViolation { phi: FamilyProperty, detail: String },

    #[error("not implemented: {0}")]
    NotImplemented(&'static str),

    #[error("label mismatch: {left} does not match {right}")]
    LabelMismatch { left: Label, right: Label },

    #[error("carrier mismatch: {left} vs {right} points")]
    CarrierMismatch { left: usize, right: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("carrier has no transversal")]
    MissingTransversal,

    #[error("carrier has no chain")]
    MissingChain,
}
