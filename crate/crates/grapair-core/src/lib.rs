//! Graph repair engine.
//!
//! Evaluates nested graph conditions, applies double-pushout rewrite rules
//! with application conditions and interfaces, synthesizes repair programs
//! from proper conditions, and compiles rule-based repair programs from a
//! user-supplied rule set.

pub mod condition;
pub mod dot;
pub mod embedding;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod json;
pub mod morphism;
pub mod program;
pub mod pushout;
pub mod railroad;
pub mod repair;
pub mod rulebased;
pub mod rules;
pub mod shift;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeId, Graph, Label, NodeId, Violation};
pub use morphism::{Morphism, PartialMorphism};
