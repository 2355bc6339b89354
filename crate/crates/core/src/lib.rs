//! Small sumsets in elementary abelian 2-groups.
//!
//! * [`group`]: set algebra over `F_2^n` (sumsets, spans, periods,
//!   representation counts, subgroups, quotients).
//! * [`structure`]: Kemperman's elementary pairs and recursive structure
//!   certificates for pairs with `|A+B| < |A|+|B|`, with an independent
//!   verifier.
//! * [`theorems`]: hypothesis/conclusion checks for the sumset-complement
//!   theorems on concrete pairs.
//! * [`constructions`]: the extremal and necessity example families.
//! * [`search`]: affine canonical forms and exhaustive or seeded sweeps.

pub mod constructions;
pub mod error;
pub mod group;
mod par;
pub mod search;
pub mod structure;
pub mod theorems;

pub use error::{Error, Result};
pub use group::{Coset, Element, GroupCtx, SetF2, Subgroup};
