//! Exact finite-field tooling for studying list decoding and list recovery of
//! random linear codes at small block lengths.
//!
//! Modules build on each other bottom-up: [`galois`] and [`fqla`] provide field
//! and linear-algebra primitives, [`codes`] samples and enumerates codes,
//! [`pluralities`] and [`sigma`] compute the statistics of message sets,
//! [`checkers`] decides each decoding property by brute force, [`bounds`]
//! evaluates closed-form rate and list-size formulas, and [`harness`] runs
//! seeded experiments and handles file formats.

pub mod error;
pub mod galois;
pub mod fqla;
pub mod rational;
pub mod codes;
pub mod pluralities;
pub mod sigma;
pub mod checkers;
pub mod bounds;
pub mod harness;

pub use error::{Error, Result};
pub use galois::{Fe, Field, FieldSpec};
pub use fqla::{MatrixFq, VectorFq, WitnessPair};
pub use rational::Rational;
