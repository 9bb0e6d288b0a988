//! Crate-wide error type.

use thiserror::Error;

use crate::graph::{EdgeId, NodeId};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("morphism is not a proper inclusion: {0}")]
    NotProperInclusion(String),
    #[error("dangling condition violated at {0:?}")]
    Dangling(Vec<(EdgeId, NodeId)>),
    #[error("condition is not linear: {0}")]
    NonLinear(String),
    #[error("condition is not proper: {0}")]
    NonProper(String),
    #[error("condition is not basic: {0}")]
    NonBasic(String),
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("interface type mismatch: {0}")]
    InterfaceMismatch(String),
    #[error("incompatible repairing-set targets: {0}")]
    IncompatibleTargets(String),
    #[error("invalid transformation: {0}")]
    InvalidTransformation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
