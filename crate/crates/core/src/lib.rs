//! Desk-scale workbench for Borel cardinal invariant properties of countable
//! equivalence relations.
//!
//! * [`sequences`]: ultimately periodic sets and eventually periodic
//!   difference functions with decidable almost-relations.
//! * [`gtrelations`]: challenge/response relations, family properties and
//!   witness checks for the nine properties b, d, s, r, p, t, a, i, u.
//! * [`morphisms`]: Galois-Tukey morphisms, their law and invariance checks,
//!   and the interval-splitting and independence constructions.
//! * [`diagonal`]: diagonalization witnesses over finite carriers with
//!   permutation actions.
//! * [`unions`]: finite equivalence-relation grids and the exhaustion
//!   machinery for increasing unions.
//! * [`diagram`]: the implication diagram between the properties.

pub mod error;
pub mod sample;
pub mod sequences;
pub mod gtrelations;
pub mod morphisms;
pub mod diagonal;
pub mod unions;
pub mod diagram;

pub use error::{Error, Result};
pub use sequences::{Element, EpdFun, Space, UpSet};
