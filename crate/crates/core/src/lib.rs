//! Exact computer algebra for partial skew group rings of free partial
//! actions on finite sets, realized as convolution algebras over the orbit
//! equivalence relation.
pub mod cli;
pub mod document;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod function_algebra;
pub mod group;
pub mod partial_actions;
pub mod relation_algebra;
pub mod sample;
pub mod selftest;
pub mod skew_ring;
pub mod span;
