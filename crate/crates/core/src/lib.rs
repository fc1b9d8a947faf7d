//! Logic of first-order ignorance and Rumsfeld ignorance over
//! bi-relational Kripke models.
//!
//! The crate provides a formula parser and printer, a bi-model evaluator,
//! Δ-bisimulation checking, bounded countermodel search over frame
//! classes, a Hilbert derivation checker, and a replayable corpus of
//! worked models and derivations.

pub mod bisim;
pub mod corpus;
pub mod formula;
pub mod kripke;
pub mod proofs;
pub mod search;
pub mod semantics;

pub use formula::{parse, render, Formula};
pub use kripke::{BiModel, FrameClass, FrameProperty, Inclusion, Which};
pub use semantics::{eval, PointedModel};
