//! Hypothesis and conclusion checks for the sumset-complement theorems.
//!
//! Every check returns a [`Verdict`] whose [`Outcome`] separates
//! "hypotheses fail" (vacuous) from "hypotheses hold and the conclusion
//! holds" (confirmed) and from a counterexample (violation). All size
//! comparisons are exact integer arithmetic.

use std::fmt;

use serde::Serialize;

use crate::error::{ensure_same_rank, Error, Result};
use crate::group::{self, Coset, SetF2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Main,
    #[serde(rename = "asym")]
    Asymmetric,
    Hp,
    Kneser,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::Main => "main",
            Theorem::Asymmetric => "asym",
            Theorem::Hp => "hp",
            Theorem::Kneser => "kneser",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    /// Some hypothesis fails; nothing is claimed.
    Vacuous,
    Confirmed,
    /// Hypotheses hold but the conclusion fails.
    Violation,
}

/// Per-clause hypothesis breakdown. Clauses that do not apply to a theorem
/// are `None`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    /// `<A> = G`.
    pub span_a_full: bool,
    /// `<B> = G`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span_b_full: Option<bool>,
    /// `|A+B| < |A| + |B|` (for `hp`: `|2A| < 2|A|`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sumset_below_sum: Option<bool>,
    /// `|A+B| < |G|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sumset_proper: Option<bool>,
    /// `2^k |B| >= (2^k - k - 1) |G|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size_bound: Option<bool>,
    /// `4|A+B| < 4|A| + 3|B|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kneser_inequality: Option<bool>,
}

impl Hypotheses {
    pub fn all(&self) -> bool {
        self.span_a_full
            && [
                self.span_b_full,
                self.sumset_below_sum,
                self.sumset_proper,
                self.size_bound,
                self.kneser_inequality,
            ]
            .iter()
            .all(|c| c.unwrap_or(true))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub theorem: Theorem,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub outcome: Outcome,
    pub hypotheses_hold: bool,
    pub hypotheses: Hypotheses,
    #[serde(rename = "conclusion")]
    pub conclusion_holds: bool,
    pub size_a: usize,
    pub size_b: usize,
    pub sumset_size: usize,
    pub complement_size: usize,
    /// Affine span of the complement of the sumset; `None` when `A+B = G`.
    pub complement_span: Option<Coset>,
    /// `|G| / |span subgroup|`; `None` when the complement is empty.
    #[serde(rename = "span_index")]
    pub complement_span_index: Option<u64>,
    /// Complement is a proper subset of its span.
    #[serde(rename = "strict")]
    pub strict_containment: bool,
    /// Complement is itself a coset of a subgroup of index exactly `2^k`
    /// (`k = 3` outside the asymmetric check), the extremal case.
    pub boundary: bool,
    #[serde(rename = "mu")]
    pub mu_value: u64,
    pub details: String,
}

impl Verdict {
    pub fn is_violation(&self) -> bool {
        self.outcome == Outcome::Violation
    }
}

struct Profile {
    sumset: SetF2,
    complement: SetF2,
    span: Option<Coset>,
    mu: u64,
}

impl Profile {
    fn new(a: &SetF2, b: &SetF2) -> Result<Self> {
        ensure_same_rank(a.rank(), b.rank())?;
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySet);
        }
        let sumset = group::sumset(a, b)?;
        let complement = sumset.complement();
        let span = if complement.is_empty() {
            None
        } else {
            Some(group::affine_span(&complement)?)
        };
        Ok(Self {
            mu: group::mu(a, b)?,
            sumset,
            complement,
            span,
        })
    }

    fn index(&self) -> Option<u64> {
        self.span.as_ref().map(Coset::index)
    }

    fn strict(&self) -> bool {
        self.span
            .as_ref()
            .is_some_and(|c| self.complement.len() < c.len())
    }

    /// Complement equals a coset of a subgroup of index exactly `index`.
    fn is_coset_of_index(&self, index: u64) -> bool {
        self.index() == Some(index) && !self.strict()
    }

    /// Complement empty, or inside a coset of a subgroup of index
    /// `min_index`, and strictly inside one when `mu = 1`. A complement
    /// whose span has index above `min_index` is strictly inside a coset of
    /// index `min_index` containing that span.
    fn contained_with_index(&self, min_index: u64) -> bool {
        match self.index() {
            None => true,
            Some(index) => {
                index >= min_index && (self.mu != 1 || !self.is_coset_of_index(min_index))
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn verdict(
        self,
        theorem: Theorem,
        k: Option<u32>,
        a: &SetF2,
        b: &SetF2,
        hypotheses: Hypotheses,
        conclusion_holds: bool,
        details: String,
    ) -> Verdict {
        let hypotheses_hold = hypotheses.all();
        let outcome = match (hypotheses_hold, conclusion_holds) {
            (false, _) => Outcome::Vacuous,
            (true, true) => Outcome::Confirmed,
            (true, false) => Outcome::Violation,
        };
        Verdict {
            theorem,
            k,
            outcome,
            hypotheses_hold,
            hypotheses,
            conclusion_holds,
            size_a: a.len(),
            size_b: b.len(),
            sumset_size: self.sumset.len(),
            complement_size: self.complement.len(),
            complement_span_index: self.index(),
            strict_containment: self.strict(),
            boundary: self.is_coset_of_index(1u64 << k.unwrap_or(3)),
            mu_value: self.mu,
            complement_span: self.span,
            details,
        }
    }
}

fn spans_group(s: &SetF2) -> Result<bool> {
    Ok(group::affine_span(s)?.subgroup().dim() == s.rank())
}

fn pair_hypotheses(a: &SetF2, b: &SetF2, p: &Profile) -> Result<Hypotheses> {
    let order = a.ctx().order();
    Ok(Hypotheses {
        span_a_full: spans_group(a)?,
        span_b_full: Some(spans_group(b)?),
        sumset_below_sum: Some(p.sumset.len() < a.len() + b.len()),
        sumset_proper: Some(p.sumset.len() < order),
        ..Default::default()
    })
}

fn describe(p: &Profile) -> String {
    match (&p.span, p.index()) {
        (Some(span), Some(index)) => format!(
            "complement of size {} spans a coset of size {} (index {index}, rep {})",
            p.complement.len(),
            span.len(),
            span.rep()
        ),
        _ => "A+B = G".to_string(),
    }
}

/// If `<A> = <B> = G` and `|A+B| < min(|A|+|B|, |G|)`, the complement of
/// `A+B` lies in a coset of a subgroup of index 8, strictly when
/// `mu_{A,B} = 1`.
pub fn check_main(a: &SetF2, b: &SetF2) -> Result<Verdict> {
    let p = Profile::new(a, b)?;
    let hyp = pair_hypotheses(a, b, &p)?;
    let conclusion = p.contained_with_index(8);
    let details = describe(&p);
    Ok(p.verdict(Theorem::Main, None, a, b, hyp, conclusion, details))
}

/// As [`check_main`] with the extra hypothesis
/// `|B| >= (1 - (k+1)/2^k) |G|` for `k >= 4`, concluding index `2^k`.
pub fn check_asymmetric(a: &SetF2, b: &SetF2, k: u32) -> Result<Verdict> {
    if k < 4 {
        return Err(Error::Parameter(format!(
            "k must be at least 4 (k = 3 is the main theorem), got {k}"
        )));
    }
    if k > 62 {
        return Err(Error::Parameter(format!("k = {k} is too large")));
    }
    let p = Profile::new(a, b)?;
    let mut hyp = pair_hypotheses(a, b, &p)?;
    hyp.size_bound = Some(asymmetric_size_bound(b.len(), a.rank(), k));
    let conclusion = p.contained_with_index(1u64 << k);
    let details = describe(&p);
    Ok(p.verdict(Theorem::Asymmetric, Some(k), a, b, hyp, conclusion, details))
}

/// `2^k |B| >= (2^k - k - 1) 2^n`, exactly.
pub fn asymmetric_size_bound(size_b: usize, rank: u32, k: u32) -> bool {
    let lhs = (size_b as u128) << k;
    let rhs = ((1u128 << k) - k as u128 - 1) << rank;
    lhs >= rhs
}

/// If `<A> = G` and `|2A| < 2|A|`, then `2A = G` or the complement of `2A`
/// is a coset of a subgroup of index at least 8; hence `|2A| >= 7|G|/8`.
pub fn check_hp(a: &SetF2) -> Result<Verdict> {
    let p = Profile::new(a, a)?;
    let order = a.ctx().order();
    let hyp = Hypotheses {
        span_a_full: spans_group(a)?,
        sumset_below_sum: Some(p.sumset.len() < 2 * a.len()),
        ..Default::default()
    };
    let is_coset_of_index_8 = p.index().is_some_and(|i| i >= 8) && !p.strict();
    let density = 8 * p.sumset.len() >= 7 * order;
    let conclusion = (p.complement.is_empty() || is_coset_of_index_8) && density;
    let details = format!(
        "{}; 8|2A| = {} vs 7|G| = {}",
        describe(&p),
        8 * p.sumset.len(),
        7 * order
    );
    Ok(p.verdict(Theorem::Hp, None, a, a, hyp, conclusion, details))
}

/// If `<A> = <B> = G` and `|A+B| < |A| + 3|B|/4`, then `A+B = G`.
pub fn check_kneser_corollary(a: &SetF2, b: &SetF2) -> Result<Verdict> {
    let p = Profile::new(a, b)?;
    let hyp = Hypotheses {
        span_a_full: spans_group(a)?,
        span_b_full: Some(spans_group(b)?),
        kneser_inequality: Some(kneser_inequality(a.len(), b.len(), p.sumset.len())),
        ..Default::default()
    };
    let conclusion = p.complement.is_empty();
    let details = describe(&p);
    Ok(p.verdict(Theorem::Kneser, None, a, b, hyp, conclusion, details))
}

/// `4|A+B| < 4|A| + 3|B|`.
pub fn kneser_inequality(size_a: usize, size_b: usize, size_sum: usize) -> bool {
    4 * size_sum < 4 * size_a + 3 * size_b
}

/// Dispatches on the theorem name; `k` is required for `asym` only.
pub fn check(theorem: Theorem, a: &SetF2, b: &SetF2, k: Option<u32>) -> Result<Verdict> {
    match theorem {
        Theorem::Main => check_main(a, b),
        Theorem::Asymmetric => {
            let k = k.ok_or_else(|| Error::Parameter("asym needs k".into()))?;
            check_asymmetric(a, b, k)
        }
        Theorem::Hp => check_hp(a),
        Theorem::Kneser => check_kneser_corollary(a, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupCtx;

    fn set(n: u32, elems: &[u32]) -> SetF2 {
        SetF2::from_elements(GroupCtx::new(n).unwrap(), elems.iter().copied()).unwrap()
    }

    #[test]
    fn main_tight_example() {
        // k = 3, |F| = 2: A = {0,1,2,4} + F, B = {3,5,6,7} + F
        let a = set(4, &[0, 1, 2, 4, 8, 9, 10, 12]);
        let b = set(4, &[3, 5, 6, 7, 11, 13, 14, 15]);
        let v = check_main(&a, &b).unwrap();
        assert!(v.hypotheses_hold);
        assert_eq!(v.outcome, Outcome::Confirmed);
        assert_eq!(v.sumset_size, 14);
        assert_eq!(v.complement_size, 2);
        assert_eq!(v.complement_span_index, Some(8));
        assert!(!v.strict_containment);
        assert!(v.boundary);
    }

    #[test]
    fn main_full_group_is_vacuous() {
        let g = SetF2::full(GroupCtx::new(3).unwrap());
        let v = check_main(&g, &g).unwrap();
        assert_eq!(v.outcome, Outcome::Vacuous);
        assert_eq!(v.hypotheses.sumset_proper, Some(false));
        assert_eq!(v.complement_span_index, None);
    }

    #[test]
    fn main_noncoset_example() {
        let a = set(4, &[0, 1, 2, 4, 9, 10, 12]);
        let b = set(4, &[0, 3, 5, 6, 7, 11, 13, 14, 15]);
        let v = check_main(&a, &b).unwrap();
        assert_eq!(v.sumset_size, 15);
        assert_eq!(v.sumset_size, v.size_a + v.size_b - 1);
        assert_eq!(v.complement_size, 1);
        assert_eq!(v.mu_value, 1);
        // a single point is its own span, yet lies strictly in an index-8 coset
        assert!(!v.strict_containment);
        assert!(!v.boundary);
        assert_eq!(v.outcome, Outcome::Confirmed);
    }

    #[test]
    fn asymmetric_tight_example() {
        // k = 4, |F| = 2 in F_2^5
        let h_part: Vec<u32> = (0..16).filter(|x| ![0, 1, 2, 4, 8].contains(x)).collect();
        let a_elems: Vec<u32> = [0, 1, 2, 4, 8].iter().flat_map(|&x| [x, x | 16]).collect();
        let b_elems: Vec<u32> = h_part.iter().flat_map(|&x| [x, x | 16]).collect();
        let (a, b) = (set(5, &a_elems), set(5, &b_elems));
        assert_eq!(b.len(), 22);
        let v = check_asymmetric(&a, &b, 4).unwrap();
        assert!(v.hypotheses_hold);
        assert_eq!(v.complement_span_index, Some(16));
        assert!(!v.strict_containment);
        assert_eq!(v.outcome, Outcome::Confirmed);
        assert!(check_asymmetric(&a, &b, 3).is_err());
    }

    #[test]
    fn asymmetric_bound_failure_is_vacuous() {
        let a = set(4, &[0, 1, 2, 4, 8]);
        let b = set(4, &[3, 5, 6, 7, 9]);
        let v = check_asymmetric(&a, &b, 4).unwrap();
        assert_eq!(v.hypotheses.size_bound, Some(false));
        assert_eq!(v.outcome, Outcome::Vacuous);
    }

    #[test]
    fn size_bound_is_exact() {
        // n = 5, k = 4: |B| >= 22
        assert!(asymmetric_size_bound(22, 5, 4));
        assert!(!asymmetric_size_bound(21, 5, 4));
        // n = 4, k = 4: |B| >= 11
        assert!(asymmetric_size_bound(11, 4, 4));
        assert!(!asymmetric_size_bound(10, 4, 4));
    }

    #[test]
    fn hp_examples() {
        let g = SetF2::full(GroupCtx::new(3).unwrap());
        let v = check_hp(&g).unwrap();
        assert!(v.hypotheses_hold);
        assert_eq!(v.outcome, Outcome::Confirmed);

        let sub = set(3, &[0, 1, 2, 3]);
        let v = check_hp(&sub).unwrap();
        assert!(!v.hypotheses.span_a_full);
        assert_eq!(v.outcome, Outcome::Vacuous);

        // 2A = G \ {0}, a coset of the zero subgroup (index 8)
        let a = set(3, &[0, 1, 2, 4]);
        let v = check_hp(&a).unwrap();
        assert_eq!(v.sumset_size, 7);
        assert!(v.hypotheses_hold);
        assert_eq!(v.outcome, Outcome::Confirmed);
    }

    #[test]
    fn kneser_examples() {
        let g = SetF2::full(GroupCtx::new(3).unwrap());
        let v = check_kneser_corollary(&g, &g).unwrap();
        assert_eq!(v.outcome, Outcome::Confirmed);
        // B index-8 subgroup, A four B-cosets that are not a coset
        let b = set(4, &[0, 8]);
        let a = set(4, &[0, 1, 2, 4, 8, 9, 10, 12]);
        let v = check_kneser_corollary(&a, &b).unwrap();
        assert_eq!(v.hypotheses.span_b_full, Some(false));
        assert_eq!(v.hypotheses.kneser_inequality, Some(true));
        assert!(!v.conclusion_holds);
        assert_eq!(v.outcome, Outcome::Vacuous);
    }

    #[test]
    fn base_case_small_groups() {
        // |G| <= 4 and full spans force A+B = G
        for n in 0..=2u32 {
            let ctx = GroupCtx::new(n).unwrap();
            let total = 1u64 << (1u32 << n);
            for ma in 1..total {
                for mb in 1..total {
                    let a = SetF2::from_mask(ctx, ma).unwrap();
                    let b = SetF2::from_mask(ctx, mb).unwrap();
                    if spans_group(&a).unwrap() && spans_group(&b).unwrap() {
                        assert!(group::sumset(&a, &b).unwrap().is_full());
                    }
                }
            }
        }
    }

    #[test]
    fn index_inequalities_from_the_proof() {
        // 2m + 2 <= 2^m + 1 exactly when m >= 3
        for m in 1u32..=30 {
            assert_eq!(2 * m as u64 + 2 <= (1u64 << m) + 1, m >= 3, "m = {m}");
        }
        // m <= (k+1) 2^(m-k), i.e. m 2^(k-m) <= k+1, fails for 3 <= m < k
        for k in 4u32..=30 {
            for m in 3..k {
                assert!((m as u64) << (k - m) > k as u64 + 1, "m = {m}, k = {k}");
            }
        }
        // the rank bound (n+1)/2^n <= (k+1)/2^k forces n >= k for n >= 1
        for k in 4u32..=30 {
            for n in 1..k {
                assert!(
                    ((n as u64 + 1) << (k - n)) > k as u64 + 1,
                    "n = {n}, k = {k}"
                );
            }
        }
    }
}
