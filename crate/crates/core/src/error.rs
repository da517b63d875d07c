use thiserror::Error;

use crate::field::FieldError;
use crate::group::GroupError;
use crate::partial_actions::ActionError;

/// Errors from the three algebras and the maps between them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("elements live over different carriers")]
    CarrierMismatch,
    #[error("elements live over different actions or relations")]
    ContextMismatch,
    #[error("support violation: {0}")]
    Support(String),
    #[error("not multiplicative: {0}")]
    NotMultiplicative(String),
    #[error("not bijective: {0}")]
    NotBijective(String),
    #[error("action is not free: {0}")]
    NotFree(String),
    #[error("({0}, {1}) is not in R")]
    NotInRelation(String, String),
    #[error("invalid input: {0}")]
    Invalid(String),
}
