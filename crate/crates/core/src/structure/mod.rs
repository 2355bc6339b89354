//! Kemperman elementary pairs and recursive structure certificates.
//!
//! A pair `(A, B)` with `|A+B| < |A|+|B|` either fails Kemperman's
//! condition (then `A+B` is periodic and the pair is pushed to the quotient
//! by its period), is elementary, or splits along a proper subgroup `F`
//! into a small critical pair `(A0, B0)` plus full `F`-cosets, with an
//! elementary image in `G/F`. [`certify`] builds that tree and
//! [`verify_certificate`] re-checks it from scratch.

mod certificate;
mod elementary;

pub use certificate::{
    certify, check_certificate, find_lev_decomposition, verify_certificate, Certificate,
    ClassifyOutcome, LevDecomposition, Rejection,
};
pub use elementary::{
    check_elementary, classify_elementary, verify_elementary, ElementaryKind, ElementaryWitness,
    Side,
};

use crate::error::{Error, Result};
use crate::group::{self, SetF2};

/// Kemperman's condition: `pi(A+B) = {0}` or `mu_{A,B} = 1`.
pub fn kemperman_condition(a: &SetF2, b: &SetF2) -> Result<bool> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let s = group::sumset(a, b)?;
    Ok(group::period(&s).is_trivial() || group::mu(a, b)? == 1)
}
